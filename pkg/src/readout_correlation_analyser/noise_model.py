"""
Correlated readout-noise simulator and exact enumeration oracle.

A shot of true state s reads b_i = s_i XOR F_i XOR (XOR of G_ij over pairs
containing i), where F_i ~ Bernoulli(effective flip probability of qubit i)
and G_ij ~ Bernoulli(pairflip[(i, j)]), all independent. Spectator shifts
condition on the true (prepared) state, never on the measured one.
"""

import logging
import threading
from collections import Counter
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import OracleTooLargeError, ValidationError
from .models import (
    CorrelatorSet,
    CountsTable,
    ExactDistribution,
    NoiseModel,
    Preparation,
)

logger = logging.getLogger(__name__)

DEFAULT_MAX_ENUMERATION_LOG2 = 24

# Shots drawn per vectorized batch; keeps memory flat for large N.
_CHUNK_SHOTS = 1 << 16


def _check_state(model: NoiseModel, true_state: Sequence[int]) -> Tuple[int, ...]:
    state = tuple(int(b) for b in true_state)
    if len(state) != model.num_qubits:
        raise ValidationError(
            f"true state has length {len(state)}, model has {model.num_qubits} qubits"
        )
    if set(state) - {0, 1}:
        raise ValidationError(f"true state {state} must contain only 0 and 1")
    return state


def _unclamped_flip_probs(model: NoiseModel, state: Tuple[int, ...]) -> np.ndarray:
    probs = np.where(np.array(state) == 1, model.p10, model.p01).astype(float)
    for shifts, target_bit in ((model.spectator01, 0), (model.spectator10, 1)):
        for (i, j), delta in shifts.items():
            if state[i] == target_bit and state[j] == 1:
                probs[i] += delta
    return probs


def effective_flip_probs(
    model: NoiseModel,
    true_state: Sequence[int],
) -> np.ndarray:
    """
    Per-qubit flip probabilities for a true state, after spectator shifts.

    Qubit i with true bit 0 uses p01[i] plus every spectator01 shift (i, j)
    whose spectator j is 1; true bit 1 uses p10 and spectator10. Results
    outside [0, 1] are clamped and logged at WARNING.

    Raises:
        ValidationError: State length does not match the model.
    """
    probs, _ = _flip_probs_with_clamps(model, true_state)
    return probs


def _flip_probs_with_clamps(
    model: NoiseModel,
    true_state: Sequence[int],
) -> Tuple[np.ndarray, List[int]]:
    state = _check_state(model, true_state)
    raw = _unclamped_flip_probs(model, state)
    clamped = [int(q) for q in np.flatnonzero((raw < 0.0) | (raw > 1.0))]
    for qubit in clamped:
        logger.warning(
            "clamped flip probability of qubit %d from %.6g for true state %s",
            qubit, raw[qubit], "".join(map(str, state)),
        )
    return np.clip(raw, 0.0, 1.0), clamped


def derive_seed(seed: int, index: int) -> int:
    """Sub-seed for preparation `index`, independent of execution order."""
    sequence = np.random.SeedSequence(seed, spawn_key=(index,))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def _rows_to_bitstrings(rows: np.ndarray) -> Counter:
    unique, counts = np.unique(rows, axis=0, return_counts=True)
    chars = (unique + ord("0")).astype(np.uint8)
    return Counter({
        row.tobytes().decode("ascii"): int(count)
        for row, count in zip(chars, counts)
    })


def sample_readout(
    model: NoiseModel,
    true_state: Sequence[int],
    shots: int,
    seed: int,
) -> Dict[str, int]:
    """
    Draw `shots` noisy readouts of a true basis state.

    Args:
        model: Noise model.
        true_state: Bit vector of length n.
        shots: Number of shots (>= 1).
        seed: Non-negative integer seed; equal inputs give equal histograms.

    Returns:
        Histogram bitstring -> count, sorted by bitstring.
    """
    if shots < 1:
        raise ValidationError(f"shots must be >= 1, got {shots}")
    if seed < 0:
        raise ValidationError(f"seed must be non-negative, got {seed}")
    probs, _ = _flip_probs_with_clamps(model, true_state)
    return _sample(model, np.array(true_state, dtype=np.uint8), probs, shots, seed)


def _sample(
    model: NoiseModel,
    state: np.ndarray,
    probs: np.ndarray,
    shots: int,
    seed: int,
) -> Dict[str, int]:
    rng = np.random.default_rng(seed)
    pairs = list(model.pairflip.items())
    pair_q = np.array([q for _, q in pairs], dtype=float)
    histogram: Counter = Counter()

    remaining = shots
    while remaining:
        size = min(remaining, _CHUNK_SHOTS)
        flips = rng.random((size, model.num_qubits)) < probs
        if pairs:
            events = rng.random((size, len(pairs))) < pair_q
            for k, ((i, j), _) in enumerate(pairs):
                flips[:, i] ^= events[:, k]
                flips[:, j] ^= events[:, k]
        readout = state ^ flips.astype(np.uint8)
        histogram.update(_rows_to_bitstrings(readout))
        remaining -= size

    return dict(sorted(histogram.items()))


def enumeration_log2(model: NoiseModel) -> int:
    """log2 of the number of (outcome, pair-event) combinations enumerated."""
    return model.num_qubits + len(model.pairflip)


def _check_guard(model: NoiseModel, max_log2: Optional[int]) -> None:
    limit = DEFAULT_MAX_ENUMERATION_LOG2 if max_log2 is None else max_log2
    required = enumeration_log2(model)
    if required > limit:
        raise OracleTooLargeError(required, limit)


def exact_distribution(
    model: NoiseModel,
    true_state: Sequence[int],
    max_log2: Optional[int] = None,
) -> ExactDistribution:
    """
    Exact readout distribution of a true state.

    Every flip source (individual flips and pair events) is an independent
    XOR mask, so summing over all their combinations reduces to applying each
    source in turn: p'(x) = (1 - f) p(x) + f p(x XOR mask).

    Raises:
        OracleTooLargeError: 2^n * 2^(pairs) exceeds 2^max_log2.
    """
    _check_guard(model, max_log2)
    probs, _ = _flip_probs_with_clamps(model, true_state)
    n = model.num_qubits
    index = np.arange(1 << n)

    dist = np.zeros(1 << n)
    dist[int("".join(str(b) for b in true_state), 2)] = 1.0

    for qubit, f in enumerate(probs):
        if f > 0.0:
            dist = (1.0 - f) * dist + f * dist[index ^ (1 << (n - 1 - qubit))]
    for (i, j), q in model.pairflip.items():
        if q > 0.0:
            mask = (1 << (n - 1 - i)) | (1 << (n - 1 - j))
            dist = (1.0 - q) * dist + q * dist[index ^ mask]

    return ExactDistribution(num_qubits=n, probabilities=dist)


def _one_masks(n: int) -> List[np.ndarray]:
    index = np.arange(1 << n)
    return [((index >> (n - 1 - q)) & 1).astype(bool) for q in range(n)]


def exact_correlators(
    model: NoiseModel,
    max_log2: Optional[int] = None,
) -> CorrelatorSet:
    """
    Infinite-shot epsilon, A and C from the exact distributions of the
    ground state and every single-excitation state. C uses the ground state.
    """
    _check_guard(model, max_log2)
    n = model.num_qubits
    ones = _one_masks(n)

    def p_one(dist: ExactDistribution) -> np.ndarray:
        return np.array([dist.probabilities[mask].sum() for mask in ones])

    ground = exact_distribution(model, Preparation(n).true_state, max_log2)
    p1_ground = p_one(ground)
    p1_excited = np.array([
        p_one(exact_distribution(model, Preparation(n, k).true_state, max_log2))
        for k in range(n)
    ])

    epsilon = 0.5 * (p1_ground + (1.0 - np.diag(p1_excited)))
    # p1_excited[j, i] is P(bit i = 1 | qubit j excited)
    A = p1_ground[:, None] - p1_excited.T

    probs = ground.probabilities
    p0 = 1.0 - p1_ground
    C = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            joint = probs[~ones[i] & ~ones[j]].sum()
            C[i, j] = joint - p0[i] * p0[j]

    np.fill_diagonal(A, np.nan)
    np.fill_diagonal(C, np.nan)
    return CorrelatorSet(num_qubits=n, epsilon=epsilon, A=A, C=C, exact=True)


def expected_counts(
    model: NoiseModel,
    shots: int,
    max_log2: Optional[int] = None,
) -> CountsTable:
    """CountsTable of exact expected (real-valued) counts, probability x N."""
    n = model.num_qubits
    histograms = {}
    for k in [None] + list(range(n)):
        prep = Preparation(n, k)
        dist = exact_distribution(model, prep.true_state, max_log2)
        histograms[prep.label] = {b: p * shots for b, p in dist.as_dict().items()}
    return CountsTable(num_qubits=n, shots=shots, histograms=histograms)


class ReadoutSimulator:
    """
    Backend that samples readouts from a NoiseModel.

    Safe to call from several threads; clamp events are counted across calls.
    """

    def __init__(self, model: NoiseModel):
        self.model = model
        self.clamp_warnings = 0
        self._lock = threading.Lock()

    @property
    def num_qubits(self) -> int:
        return self.model.num_qubits

    def run(self, true_state: Sequence[int], shots: int, seed: int) -> Dict[str, int]:
        """Histogram of `shots` noisy readouts of `true_state`."""
        if shots < 1:
            raise ValidationError(f"shots must be >= 1, got {shots}")
        probs, clamped = _flip_probs_with_clamps(self.model, true_state)
        if clamped:
            with self._lock:
                self.clamp_warnings += len(clamped)
        return _sample(
            self.model, np.array(true_state, dtype=np.uint8), probs, shots, seed
        )


__all__ = [
    "ReadoutSimulator",
    "derive_seed",
    "effective_flip_probs",
    "enumeration_log2",
    "exact_correlators",
    "exact_distribution",
    "expected_counts",
    "sample_readout",
]
