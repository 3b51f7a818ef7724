"""
Spatial and statistical summaries of estimated correlators.
"""

import io
from collections import defaultdict
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from .errors import ValidationError
from .loaders import ConfigLoader, config_value
from .models import (
    UNREACHABLE,
    CorrelatorSet,
    DistanceBin,
    DistanceMatrix,
    DistanceSummary,
    FloorClassification,
    FloorFlag,
    HistogramResult,
    MatrixReport,
)


def histogram(values: Sequence[float], edges: Sequence[float]) -> HistogramResult:
    """
    Count values into half-open bins [edges[k], edges[k+1]).

    Values below the first edge go to underflow and values at or above the
    last edge go to overflow; neither is folded into an edge bin.

    Raises:
        ValidationError: Fewer than two edges, non-increasing edges or NaN values.
    """
    edges_arr = np.asarray(edges, dtype=float)
    if edges_arr.ndim != 1 or edges_arr.size < 2:
        raise ValidationError("histogram needs at least two edges")
    if np.any(np.diff(edges_arr) <= 0):
        raise ValidationError(f"histogram edges must be strictly increasing: {list(edges)}")
    values_arr = np.asarray(values, dtype=float)
    if np.any(np.isnan(values_arr)):
        raise ValidationError("histogram values contain NaN (masked entries)")

    slot = np.searchsorted(edges_arr, values_arr, side="right") - 1
    num_bins = edges_arr.size - 1
    counts = np.bincount(slot[(slot >= 0) & (slot < num_bins)], minlength=num_bins)

    return HistogramResult(
        edges=[float(e) for e in edges_arr],
        counts=[int(c) for c in counts],
        underflow=int(np.sum(slot < 0)),
        overflow=int(np.sum(slot >= num_bins)),
    )


def default_edges(config: Optional[ConfigLoader] = None) -> List[float]:
    """Logarithmically spaced edges for absolute values (20 bins over [1e-5, 1])."""
    num_bins = int(config_value(config, "analysis.histogram.num_bins", 20))
    low = float(config_value(config, "analysis.histogram.min_edge", 1e-5))
    high = float(config_value(config, "analysis.histogram.max_edge", 1.0))
    return [float(e) for e in np.logspace(np.log10(low), np.log10(high), num_bins + 1)]


def signed_edges(values: Sequence[float], num_bins: int = 20) -> List[float]:
    """Linear edges symmetric about zero that cover every value."""
    values_arr = np.asarray(values, dtype=float)
    span = float(np.max(np.abs(values_arr))) if values_arr.size else 0.0
    if span == 0.0:
        span = 1.0
    edges = np.linspace(-span, span, num_bins + 1)
    edges[-1] = np.nextafter(span, np.inf)
    return [float(e) for e in edges]


def _quartile_bin(distance: int, values: List[float]) -> DistanceBin:
    if not values:
        return DistanceBin(distance=distance, count=0)
    data = np.asarray(values)
    # numpy's default "linear" method: rank h = (m-1)p + 1, interpolated
    q1, median, q3 = np.quantile(data, [0.25, 0.5, 0.75])
    return DistanceBin(
        distance=distance,
        count=int(data.size),
        minimum=float(data.min()),
        q1=float(q1),
        median=float(median),
        q3=float(q3),
        maximum=float(data.max()),
        mean=float(data.mean()),
    )


def bin_by_distance(matrix: np.ndarray, distances: DistanceMatrix) -> DistanceSummary:
    """
    Group |matrix[i, j]| by minimum connected distance over ordered pairs.

    Both (i, j) and (j, i) enter their bin. Masked (NaN) entries and
    unreachable pairs are excluded and counted. Distances with no pairs give
    bins with count 0 and no statistics.

    Raises:
        ValidationError: Matrix and distance dimensions differ.
    """
    matrix = np.asarray(matrix, dtype=float)
    n = distances.num_qubits
    if matrix.shape != (n, n):
        raise ValidationError(
            f"num_qubits mismatch: matrix is {matrix.shape[0]}x{matrix.shape[1]}, "
            f"distances are {n}x{n}"
        )

    groups: Dict[int, List[float]] = defaultdict(list)
    unreachable = masked = 0
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            d = distances[i, j]
            if d == UNREACHABLE:
                unreachable += 1
            elif np.isnan(matrix[i, j]):
                masked += 1
            else:
                groups[d].append(abs(float(matrix[i, j])))

    max_distance = int(distances.values.max()) if n > 1 else 0
    bins = [_quartile_bin(d, groups.get(d, [])) for d in range(1, max_distance + 1)]
    return DistanceSummary(bins=bins, unreachable_pairs=unreachable, masked_pairs=masked)


def noise_floor_classification(
    corr: CorrelatorSet,
    multiplier: Optional[float] = None,
    config: Optional[ConfigLoader] = None,
) -> FloorClassification:
    """
    Flag each |A_ij| and |C_ij| against k times its sampling bound.

    An entry is ABOVE_FLOOR only if strictly greater than the floor.

    Args:
        corr: Estimated correlators (must carry a shot count).
        multiplier: Significance multiplier k; defaults to config or 1.
    """
    if corr.bounds is None:
        raise ValidationError("correlators carry no shot count; noise floor is undefined")
    k = float(multiplier if multiplier is not None else config_value(config, "analysis.floor_multiplier", 1.0))
    a_floor = k * corr.bounds.eps_or_A
    c_floor = k * corr.bounds.C

    def flags(matrix: np.ndarray, floor: float) -> List[List[Optional[FloorFlag]]]:
        return [
            [
                None if np.isnan(value)
                else FloorFlag.ABOVE_FLOOR if abs(value) > floor
                else FloorFlag.BELOW_FLOOR
                for value in row
            ]
            for row in matrix
        ]

    return FloorClassification(
        multiplier=k,
        A_floor=a_floor,
        C_floor=c_floor,
        A=flags(corr.A, a_floor),
        C=flags(corr.C, c_floor),
    )


def matrix_report(corr: CorrelatorSet, distances: DistanceMatrix) -> MatrixReport:
    """
    Full A, C and distance tables, aligned by qubit index.

    Masked cells and unreachable distances are empty in CSV and null in JSON.
    """
    n = corr.num_qubits
    if distances.num_qubits != n:
        raise ValidationError(
            f"num_qubits mismatch: correlators have {n}, topology has {distances.num_qubits}"
        )
    qubits = pd.RangeIndex(n)
    d_table = pd.DataFrame(
        distances.values, index=qubits, columns=qubits
    ).mask(distances.values == UNREACHABLE).astype("Int64")
    return MatrixReport(
        A=pd.DataFrame(corr.A, index=qubits, columns=qubits),
        C=pd.DataFrame(corr.C, index=qubits, columns=qubits),
        distances=d_table,
    )


def parse_matrix_csv(text: str) -> np.ndarray:
    """Read a table written by MatrixReport.to_csv back into a float matrix."""
    frame = pd.read_csv(io.StringIO(text), index_col=0, float_precision="round_trip")
    return frame.to_numpy(dtype=float)


def correlation_summary(
    corr: CorrelatorSet,
    floors: Optional[FloorClassification] = None,
) -> Dict[str, Any]:
    """
    Compare correlator magnitudes with the single-qubit readout errors.
    """
    abs_A = np.abs(corr.offdiagonal("A"))
    abs_C = np.abs(corr.offdiagonal("C"))
    mean_eps = float(np.mean(corr.epsilon))
    max_A = float(abs_A.max()) if abs_A.size else 0.0
    max_C = float(abs_C.max()) if abs_C.size else 0.0

    summary: Dict[str, Any] = {
        "mean_epsilon": mean_eps,
        "max_epsilon": float(np.max(corr.epsilon)),
        "max_abs_A": max_A,
        "median_abs_A": float(np.median(abs_A)) if abs_A.size else 0.0,
        "max_abs_C": max_C,
        "median_abs_C": float(np.median(abs_C)) if abs_C.size else 0.0,
        "max_A_to_mean_epsilon": max_A / mean_eps if mean_eps > 0 else None,
        "max_C_to_mean_epsilon": max_C / mean_eps if mean_eps > 0 else None,
    }
    if floors is not None:
        summary["A_above_floor"] = floors.count_above("A")
        summary["C_above_floor"] = floors.count_above("C")
    return summary
