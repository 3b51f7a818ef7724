"""
Estimators for symmetrized readout errors and two-qubit error correlators.

All estimators take a CountsTable and return plain numpy arrays; A and C
have their diagonals masked with NaN. Histogram entries are processed in
sorted bitstring order, so results do not depend on input ordering.
"""

import math
from typing import Dict, Mapping, Tuple

import numpy as np

from .errors import ValidationError
from .models import CorrelatorSet, CountsTable, SamplingBounds


def _histogram_arrays(hist: Mapping[str, float]) -> Tuple[np.ndarray, np.ndarray]:
    """Bit matrix (entries x qubits) and weight vector of a histogram."""
    if not hist:
        raise ValidationError("histogram is empty")
    items = sorted(hist.items())
    bits = np.array([[c == "1" for c in b] for b, _ in items], dtype=np.int64)
    weights = np.array([c for _, c in items])
    if weights.dtype.kind not in "iu":
        weights = weights.astype(float)
    total = weights.sum()
    if total <= 0:
        raise ValidationError("histogram has zero total count")
    return bits, weights


def _one_probs(hist: Mapping[str, float]) -> np.ndarray:
    bits, weights = _histogram_arrays(hist)
    return (weights @ bits) / weights.sum()


def marginal_one_prob(hist: Mapping[str, float], qubit: int) -> float:
    """
    Fraction of shots in which `qubit` reads 1.

    Args:
        hist: Histogram bitstring -> count (canonical bit order).
        qubit: Qubit index.

    Returns:
        Estimated probability of reading 1 on the qubit.
    """
    bits, weights = _histogram_arrays(hist)
    n = bits.shape[1]
    if not 0 <= qubit < n:
        raise ValidationError(f"qubit {qubit} out of range for {n}-qubit histogram")
    return float(weights @ bits[:, qubit] / weights.sum())


def _excited_one_probs(counts: CountsTable) -> np.ndarray:
    """Row j holds P(bit i = 1 | EXCITED(j)) for every i."""
    return np.array([_one_probs(counts.excited(j)) for j in range(counts.num_qubits)])


def estimate_epsilon(counts: CountsTable) -> np.ndarray:
    """
    eps_i = (P(bit i = 1 | ground) + P(bit i = 0 | EXCITED(i))) / 2.
    """
    p1_ground = _one_probs(counts.ground)
    p1_self = np.diag(_excited_one_probs(counts))
    return 0.5 * (p1_ground + (1.0 - p1_self))


def estimate_A(counts: CountsTable) -> np.ndarray:
    """
    A_ij = P(bit i = 1 | ground) - P(bit i = 1 | EXCITED(j)), diagonal masked.

    A is not symmetric; A_ij and A_ji come from different preparations.
    """
    p1_ground = _one_probs(counts.ground)
    A = p1_ground[:, None] - _excited_one_probs(counts).T
    np.fill_diagonal(A, np.nan)
    return A


def estimate_C(counts: CountsTable) -> np.ndarray:
    """
    Covariance of the read-0 indicators in the ground preparation.

    C_ij = P(bit i = 0 and bit j = 0) - P(bit i = 0) P(bit j = 0), symmetric,
    diagonal masked.
    """
    bits, weights = _histogram_arrays(counts.ground)
    zeros = 1 - bits
    total = weights.sum()
    joint = ((zeros * weights[:, None]).T @ zeros) / total
    p0 = (weights @ zeros) / total
    C = joint - np.outer(p0, p0)
    C = 0.5 * (C + C.T)
    np.fill_diagonal(C, np.nan)
    return C


def sampling_bounds(shots: int) -> SamplingBounds:
    """
    Worst-case standard errors at N shots.

    A single estimated probability has standard error sqrt(p(1-p)/N) <=
    1/(2 sqrt(N)). Epsilon and A combine two such probabilities, bounded by
    1/sqrt(2N); C is bounded by 1/(2 sqrt(N)). The global bound 1/sqrt(2N)
    covers all three.
    """
    if shots < 1:
        raise ValidationError(f"shots must be >= 1, got {shots}")
    single = 1.0 / (2.0 * math.sqrt(shots))
    pair = 1.0 / math.sqrt(2.0 * shots)
    return SamplingBounds(
        shots=shots,
        single_prob=single,
        eps_or_A=pair,
        C=single,
        global_bound=pair,
    )


def standard_errors(counts: CountsTable) -> Dict[str, np.ndarray]:
    """
    Plug-in standard errors sqrt(p(1-p)/N) evaluated at the estimates.

    Returns:
        {"epsilon": vector, "A": matrix with masked diagonal}.
    """
    N = counts.shots
    p1_ground = _one_probs(counts.ground)
    p1_excited = _excited_one_probs(counts)
    var_ground = p1_ground * (1.0 - p1_ground) / N
    var_excited = p1_excited * (1.0 - p1_excited) / N

    se_eps = 0.5 * np.sqrt(var_ground + np.diag(var_excited))
    se_A = np.sqrt(var_ground[:, None] + var_excited.T)
    np.fill_diagonal(se_A, np.nan)
    return {"epsilon": se_eps, "A": se_A}


def characterize(counts: CountsTable) -> CorrelatorSet:
    """
    Estimate epsilon, A and C from a complete CountsTable.

    Args:
        counts: Histograms for the ground state and all single excitations.

    Returns:
        CorrelatorSet with estimates, sampling bounds and plug-in standard errors.
    """
    return CorrelatorSet(
        num_qubits=counts.num_qubits,
        epsilon=estimate_epsilon(counts),
        A=estimate_A(counts),
        C=estimate_C(counts),
        shots=counts.shots,
        bounds=sampling_bounds(counts.shots),
        standard_errors=standard_errors(counts),
    )
