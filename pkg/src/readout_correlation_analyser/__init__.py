"""
Readout Correlation Analyser
============================

Characterizes correlated readout errors on multi-qubit devices from the
ground state and every single-excitation state.

This package provides:
- A correlated readout-noise simulator with an exact enumeration oracle
- Estimators for symmetrized errors, asymmetric correlators and covariances
- Distance-binned statistics on the device coupling graph
- Sampling-noise floors and JSON/CSV/text reports
"""

__version__ = "1.0.0"

from .errors import BackendError, OracleTooLargeError, ReadoutAnalysisError, ValidationError
from .estimators import characterize, sampling_bounds
from .models import CorrelatorSet, CountsTable, NoiseModel, Topology
from .noise_model import ReadoutSimulator, exact_correlators
from .protocol import ingest_counts, run_protocol
from .topology import build_topology, min_distances

__all__ = [
    "BackendError",
    "CorrelatorSet",
    "CountsTable",
    "NoiseModel",
    "OracleTooLargeError",
    "ReadoutAnalysisError",
    "ReadoutSimulator",
    "Topology",
    "ValidationError",
    "build_topology",
    "characterize",
    "exact_correlators",
    "ingest_counts",
    "min_distances",
    "run_protocol",
    "sampling_bounds",
]
