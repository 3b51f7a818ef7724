"""
The n+1 preparation protocol: ground state plus every single excitation.

Hardware counts conflate state-preparation and measurement errors; the
simulator applies noise only at readout.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Protocol, Sequence, Union

from .errors import BackendError, ValidationError
from .loaders import read_counts_document
from .models import CountsTable, Preparation
from .noise_model import derive_seed

logger = logging.getLogger(__name__)

BIT_ORDERS = ("msb", "lsb")


class ReadoutBackend(Protocol):
    """Anything that returns a readout histogram for a true basis state."""

    def run(self, true_state: Sequence[int], shots: int, seed: int) -> Dict[str, int]:
        ...


def preparation_set(n: int) -> List[Preparation]:
    """
    Ordered preparations [ground, x_0, ..., x_{n-1}].

    Args:
        n: Number of qubits (>= 1).
    """
    if n < 1:
        raise ValidationError(f"number of qubits must be >= 1, got {n}")
    return [Preparation(n)] + [Preparation(n, k) for k in range(n)]


def run_protocol(
    backend: ReadoutBackend,
    n: int,
    shots: int,
    seed: int,
    workers: int = 1,
) -> CountsTable:
    """
    Measure every preparation `shots` times and assemble a CountsTable.

    Preparation k (in preparation_set order) gets the sub-seed
    derive_seed(seed, k), so the table is identical for any worker count or
    execution order.

    Raises:
        BackendError: The backend failed or returned a wrong total for a
            preparation; the message names the preparation label.
    """
    if shots < 1:
        raise ValidationError(f"shots must be >= 1, got {shots}")
    backend_qubits = getattr(backend, "num_qubits", n)
    if backend_qubits != n:
        raise ValidationError(
            f"num_qubits mismatch: backend has {backend_qubits}, protocol requested {n}"
        )
    preparations = preparation_set(n)

    def measure(index: int) -> Dict[str, int]:
        prep = preparations[index]
        logger.info("measuring preparation %s (%d shots)", prep.label, shots)
        try:
            hist = backend.run(prep.true_state, shots, derive_seed(seed, index))
        except Exception as e:
            raise BackendError(prep.label, e) from e
        total = sum(hist.values())
        if total != shots:
            raise BackendError(prep.label, ValueError(f"returned {total} shots, expected {shots}"))
        return hist

    indices = range(len(preparations))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(measure, indices))
    else:
        results = [measure(index) for index in indices]

    histograms = {prep.label: hist for prep, hist in zip(preparations, results)}
    return CountsTable(num_qubits=n, shots=shots, histograms=histograms)


def ingest_counts(
    file: Union[str, Path],
    bit_order: Optional[str] = None,
) -> CountsTable:
    """
    Load a counts file and normalize bitstrings to canonical order.

    Args:
        file: Path to a counts JSON file.
        bit_order: 'msb' (character k is qubit k, stored as-is) or 'lsb'
            (character k is qubit n-1-k, reversed on load). Required unless
            the file declares its own order; must agree with it otherwise.

    Raises:
        ValidationError: Missing preparation, count total mismatch, malformed
            bitstring or conflicting bit order.
    """
    data = read_counts_document(file)
    declared = data.get("bit_order")
    for value in (declared, bit_order):
        if value is not None and value not in BIT_ORDERS:
            raise ValidationError(f"bit_order must be 'msb' or 'lsb', got '{value}'")
    if bit_order is None and declared is None:
        raise ValidationError(f"{file}: no bit order declared; pass bit_order explicitly")
    if bit_order is not None and declared is not None and bit_order != declared:
        raise ValidationError(
            f"{file}: bit_order '{bit_order}' conflicts with declared '{declared}'"
        )
    order = bit_order or declared
    n = data["num_qubits"]

    histograms: Dict[str, Dict[str, int]] = {}
    for label, hist in data["preparations"].items():
        Preparation.from_label(label, n)
        normalized: Dict[str, int] = {}
        for bitstring, count in hist.items():
            if len(bitstring) != n:
                raise ValidationError(
                    f"malformed bitstring '{bitstring}' in '{label}' "
                    f"(expected {n} characters)"
                )
            normalized[bitstring[::-1] if order == "lsb" else bitstring] = count
        histograms[label] = normalized

    logger.info("ingested %d preparations from %s", len(histograms), file)
    return CountsTable(num_qubits=n, shots=data["shots"], histograms=histograms)
