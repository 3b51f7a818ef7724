"""
Data models for readout-error characterization.
"""

from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import Any, Dict, List, Mapping, Optional, Tuple

import numpy as np
import pandas as pd

from .errors import ValidationError


# Sentinel stored in DistanceMatrix for disconnected qubit pairs.
UNREACHABLE = -1

GROUND_LABEL = "ground"

Edge = Tuple[int, int]
BitVector = Tuple[int, ...]


def masked_to_list(matrix: np.ndarray) -> List[List[Optional[float]]]:
    """Convert a matrix with NaN-masked cells into nested lists with None."""
    return [
        [None if np.isnan(value) else float(value) for value in row]
        for row in matrix
    ]


def list_to_masked(rows: List[List[Optional[float]]]) -> np.ndarray:
    """Inverse of masked_to_list."""
    return np.array(
        [[np.nan if value is None else float(value) for value in row] for row in rows],
        dtype=float,
    )


def _frozen_array(values: Any, dtype: Any) -> np.ndarray:
    array = np.array(values, dtype=dtype)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class Topology:
    """Device coupling graph; edges are normalized (i < j) and sorted."""
    num_qubits: int
    edges: Tuple[Edge, ...]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "num_qubits": self.num_qubits,
            "edges": [list(edge) for edge in self.edges],
        }


@dataclass(frozen=True)
class DistanceMatrix:
    """All-pairs hop counts; UNREACHABLE marks disconnected pairs."""
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _frozen_array(self.values, np.int64))

    @property
    def num_qubits(self) -> int:
        return int(self.values.shape[0])

    def __getitem__(self, index: Tuple[int, int]) -> int:
        return int(self.values[index])

    def is_reachable(self, i: int, j: int) -> bool:
        return self.values[i, j] != UNREACHABLE

    def to_list(self) -> List[List[Optional[int]]]:
        """Nested lists with None for unreachable pairs."""
        return [
            [None if d == UNREACHABLE else int(d) for d in row]
            for row in self.values
        ]


@dataclass(frozen=True)
class NoiseModel:
    """
    Generative correlated readout-noise model.

    p01[i] is P(read 1 | true 0) and p10[i] is P(read 0 | true 1) for qubit i.
    spectator01[(i, j)] shifts qubit i's 0->1 flip probability when the true
    state of qubit j is 1; spectator10 does the same for the 1->0 flip.
    pairflip[(i, j)] (i < j) is the per-shot probability of an event that
    flips the readout bits of both i and j.
    """
    num_qubits: int
    p01: Tuple[float, ...]
    p10: Tuple[float, ...]
    spectator01: Mapping[Edge, float] = field(default_factory=dict)
    spectator10: Mapping[Edge, float] = field(default_factory=dict)
    pairflip: Mapping[Edge, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        n = self.num_qubits
        if n < 1:
            raise ValidationError(f"num_qubits must be >= 1, got {n}")

        for name in ("p01", "p10"):
            values = tuple(float(v) for v in getattr(self, name))
            if len(values) != n:
                raise ValidationError(
                    f"{name} has {len(values)} entries, expected {n}"
                )
            for qubit, value in enumerate(values):
                if not 0.0 <= value <= 1.0:
                    raise ValidationError(
                        f"{name}[{qubit}] = {value} is outside [0, 1]"
                    )
            object.__setattr__(self, name, values)

        for name in ("spectator01", "spectator10"):
            shifts: Dict[Edge, float] = {}
            for (i, j), delta in dict(getattr(self, name)).items():
                _check_pair(name, i, j, n)
                shifts[(int(i), int(j))] = float(delta)
            object.__setattr__(self, name, MappingProxyType(shifts))

        pairs: Dict[Edge, float] = {}
        for (i, j), q in dict(self.pairflip).items():
            _check_pair("pairflip", i, j, n)
            key = (min(i, j), max(i, j))
            if key in pairs:
                raise ValidationError(f"pairflip lists pair {key} twice")
            if not 0.0 <= float(q) <= 1.0:
                raise ValidationError(f"pairflip{key} = {q} is outside [0, 1]")
            pairs[(int(key[0]), int(key[1]))] = float(q)
        object.__setattr__(self, "pairflip", MappingProxyType(dict(sorted(pairs.items()))))

    @classmethod
    def noiseless(cls, num_qubits: int) -> "NoiseModel":
        """Model with no readout errors at all."""
        return cls(num_qubits, (0.0,) * num_qubits, (0.0,) * num_qubits)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "num_qubits": self.num_qubits,
            "p01": list(self.p01),
            "p10": list(self.p10),
            "spectator01": [[i, j, d] for (i, j), d in sorted(self.spectator01.items())],
            "spectator10": [[i, j, d] for (i, j), d in sorted(self.spectator10.items())],
            "pairflip": [[i, j, q] for (i, j), q in self.pairflip.items()],
        }


def _check_pair(name: str, i: int, j: int, n: int) -> None:
    if not (0 <= i < n and 0 <= j < n):
        raise ValidationError(f"{name} entry ({i}, {j}) has a qubit outside [0, {n})")
    if i == j:
        raise ValidationError(f"{name} entry ({i}, {j}) is a self-pair")


@dataclass(frozen=True)
class ExactDistribution:
    """
    Exact outcome distribution. Index k corresponds to the bitstring
    format(k, f"0{n}b"), so character position q is qubit q.
    """
    num_qubits: int
    probabilities: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "probabilities", _frozen_array(self.probabilities, float)
        )

    def bitstring(self, index: int) -> str:
        return format(index, f"0{self.num_qubits}b")

    def probability(self, bitstring: str) -> float:
        return float(self.probabilities[int(bitstring, 2)])

    def as_dict(self, include_zero: bool = False) -> Dict[str, float]:
        return {
            self.bitstring(index): float(p)
            for index, p in enumerate(self.probabilities)
            if include_zero or p > 0.0
        }


@dataclass(frozen=True)
class Preparation:
    """One of the n+1 prepared basis states: ground, or a single excitation."""
    num_qubits: int
    qubit: Optional[int] = None

    @property
    def is_ground(self) -> bool:
        return self.qubit is None

    @property
    def label(self) -> str:
        return GROUND_LABEL if self.qubit is None else f"x_{self.qubit}"

    @property
    def true_state(self) -> BitVector:
        return tuple(
            1 if qubit == self.qubit else 0 for qubit in range(self.num_qubits)
        )

    @classmethod
    def from_label(cls, label: str, num_qubits: int) -> "Preparation":
        if label == GROUND_LABEL:
            return cls(num_qubits)
        if label.startswith("x_") and label[2:].isdigit():
            qubit = int(label[2:])
            if qubit < num_qubits:
                return cls(num_qubits, qubit)
        raise ValidationError(f"unknown preparation label '{label}'")


@dataclass(frozen=True)
class CountsTable:
    """
    Bitstring histograms for the ground state and every single-excitation
    state. Bitstrings are canonical: character k is qubit k.
    """
    num_qubits: int
    shots: int
    histograms: Mapping[str, Mapping[str, float]]

    def __post_init__(self) -> None:
        n = self.num_qubits
        if n < 1:
            raise ValidationError(f"num_qubits must be >= 1, got {n}")
        if self.shots < 1:
            raise ValidationError(f"shots must be >= 1, got {self.shots}")

        required = [GROUND_LABEL] + [f"x_{k}" for k in range(n)]
        for label in required:
            if label not in self.histograms:
                raise ValidationError(f"missing preparation '{label}'")
        extra = sorted(set(self.histograms) - set(required))
        if extra:
            raise ValidationError(f"unexpected preparation(s): {', '.join(extra)}")

        ordered: Dict[str, Mapping[str, float]] = {}
        for label in required:
            hist = dict(sorted(self.histograms[label].items()))
            for bitstring, count in hist.items():
                if len(bitstring) != n or set(bitstring) - {"0", "1"}:
                    raise ValidationError(
                        f"malformed bitstring '{bitstring}' in '{label}' "
                        f"(expected {n} characters of 0/1)"
                    )
                if count < 0:
                    raise ValidationError(
                        f"negative count {count} for '{bitstring}' in '{label}'"
                    )
            total = sum(hist.values())
            if not np.isclose(total, self.shots, rtol=1e-12, atol=0.0):
                raise ValidationError(
                    f"count total mismatch for '{label}': {total} != {self.shots}"
                )
            ordered[label] = MappingProxyType(hist)
        object.__setattr__(self, "histograms", MappingProxyType(ordered))

    @property
    def labels(self) -> List[str]:
        return list(self.histograms)

    @property
    def ground(self) -> Mapping[str, float]:
        return self.histograms[GROUND_LABEL]

    def excited(self, qubit: int) -> Mapping[str, float]:
        return self.histograms[f"x_{qubit}"]

    def to_dict(self, bit_order: str = "msb") -> Dict[str, Any]:
        """Serializable form; 'lsb' writes every bitstring reversed."""
        reverse = bit_order == "lsb"
        return {
            "num_qubits": self.num_qubits,
            "shots": self.shots,
            "bit_order": bit_order,
            "preparations": {
                label: dict(sorted(
                    ((b[::-1] if reverse else b), c) for b, c in hist.items()
                ))
                for label, hist in self.histograms.items()
            },
        }


@dataclass(frozen=True)
class SamplingBounds:
    """Worst-case standard errors at N shots."""
    shots: int
    single_prob: float
    eps_or_A: float
    C: float
    global_bound: float

    def to_dict(self) -> Dict[str, float]:
        return {
            "single_prob": self.single_prob,
            "eps_or_A": self.eps_or_A,
            "C": self.C,
            "global": self.global_bound,
        }


@dataclass
class CorrelatorSet:
    """
    Estimated (or exact) symmetrized errors and two-qubit correlators.

    The diagonals of A and C are masked with NaN.
    """
    num_qubits: int
    epsilon: np.ndarray
    A: np.ndarray
    C: np.ndarray
    shots: Optional[int] = None
    bounds: Optional[SamplingBounds] = None
    exact: bool = False
    standard_errors: Optional[Dict[str, np.ndarray]] = None

    def offdiagonal(self, name: str) -> np.ndarray:
        """Flattened off-diagonal entries of 'A' or 'C' (row-major order)."""
        matrix = getattr(self, name)
        mask = ~np.eye(self.num_qubits, dtype=bool)
        return matrix[mask]

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "num_qubits": self.num_qubits,
            "exact": self.exact,
            "shots": self.shots,
            "epsilon": [float(e) for e in self.epsilon],
            "A": masked_to_list(self.A),
            "C": masked_to_list(self.C),
            "bounds": self.bounds.to_dict() if self.bounds else None,
        }
        if self.standard_errors is not None:
            data["standard_errors"] = {
                "epsilon": [float(e) for e in self.standard_errors["epsilon"]],
                "A": masked_to_list(self.standard_errors["A"]),
            }
        return data


@dataclass
class HistogramResult:
    """Histogram with underflow and overflow kept out of the bins."""
    edges: List[float]
    counts: List[int]
    underflow: int = 0
    overflow: int = 0

    @property
    def total(self) -> int:
        return sum(self.counts) + self.underflow + self.overflow

    def to_dict(self) -> Dict[str, Any]:
        return {
            "edges": list(self.edges),
            "counts": list(self.counts),
            "underflow": self.underflow,
            "overflow": self.overflow,
        }


@dataclass
class DistanceBin:
    """Summary statistics for one distance; statistics are None when empty."""
    distance: int
    count: int
    minimum: Optional[float] = None
    q1: Optional[float] = None
    median: Optional[float] = None
    q3: Optional[float] = None
    maximum: Optional[float] = None
    mean: Optional[float] = None

    @property
    def is_empty(self) -> bool:
        return self.count == 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "distance": self.distance,
            "count": self.count,
            "min": self.minimum,
            "q1": self.q1,
            "median": self.median,
            "q3": self.q3,
            "max": self.maximum,
            "mean": self.mean,
        }


@dataclass
class DistanceSummary:
    """Per-distance statistics of |matrix entries| over ordered pairs."""
    bins: List[DistanceBin]
    unreachable_pairs: int = 0
    masked_pairs: int = 0

    def get(self, distance: int) -> Optional[DistanceBin]:
        for bin_ in self.bins:
            if bin_.distance == distance:
                return bin_
        return None

    @property
    def pair_count(self) -> int:
        return sum(b.count for b in self.bins)

    def medians(self) -> Dict[int, float]:
        """Median per nonempty distance."""
        return {b.distance: b.median for b in self.bins if not b.is_empty}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "bins": [b.to_dict() for b in self.bins],
            "unreachable_pairs": self.unreachable_pairs,
            "masked_pairs": self.masked_pairs,
        }


class FloorFlag(str, Enum):
    """Whether a correlator magnitude exceeds its sampling-noise floor."""
    ABOVE_FLOOR = "ABOVE_FLOOR"
    BELOW_FLOOR = "BELOW_FLOOR"


FlagMatrix = List[List[Optional[FloorFlag]]]


@dataclass
class FloorClassification:
    """Per-entry noise-floor flags for A and C (None on the diagonal)."""
    multiplier: float
    A_floor: float
    C_floor: float
    A: FlagMatrix
    C: FlagMatrix

    def count_above(self, name: str) -> int:
        return sum(
            flag is FloorFlag.ABOVE_FLOOR
            for row in getattr(self, name)
            for flag in row
        )

    def to_dict(self) -> Dict[str, Any]:
        def encode(flags: FlagMatrix) -> List[List[Optional[str]]]:
            return [[None if f is None else f.value for f in row] for row in flags]

        return {
            "multiplier": self.multiplier,
            "floors": {"A": self.A_floor, "C": self.C_floor},
            "above_floor": {"A": self.count_above("A"), "C": self.count_above("C")},
            "A": encode(self.A),
            "C": encode(self.C),
        }


@dataclass
class MatrixReport:
    """Aligned full-matrix tables for heat-map plotting."""
    A: pd.DataFrame
    C: pd.DataFrame
    distances: pd.DataFrame

    def to_csv(self, name: str) -> str:
        """CSV text of 'A', 'C' or 'distances'; masked cells are empty."""
        return getattr(self, name).to_csv(index_label="qubit")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "A": masked_to_list(self.A.to_numpy(dtype=float)),
            "C": masked_to_list(self.C.to_numpy(dtype=float)),
            "distances": [
                [None if pd.isna(d) else int(d) for d in row]
                for row in self.distances.itertuples(index=False)
            ],
        }


@dataclass
class AnalysisSummary:
    """Everything the analyze stage reports for one CorrelatorSet."""
    num_qubits: int
    histograms: Dict[str, HistogramResult]
    signed_histograms: Dict[str, HistogramResult]
    distance_summary: DistanceSummary
    distance_summary_C: DistanceSummary
    matrices: MatrixReport
    correlation_summary: Dict[str, Any]
    floor_flags: Optional[FloorClassification] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "num_qubits": self.num_qubits,
            "histograms": {k: h.to_dict() for k, h in self.histograms.items()},
            "histograms_signed": {k: h.to_dict() for k, h in self.signed_histograms.items()},
            "distance_summary": [b.to_dict() for b in self.distance_summary.bins],
            "distance_summary_C": [b.to_dict() for b in self.distance_summary_C.bins],
            "unreachable_pairs": self.distance_summary.unreachable_pairs,
            "floor_flags": self.floor_flags.to_dict() if self.floor_flags else None,
            "correlation_summary": self.correlation_summary,
            "matrices": self.matrices.to_dict(),
        }
