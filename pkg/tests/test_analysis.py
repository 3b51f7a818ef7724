"""
Tests for histograms, distance-binned summaries and noise-floor flags.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from readout_correlation_analyser.analysis import (
    bin_by_distance,
    correlation_summary,
    default_edges,
    histogram,
    matrix_report,
    noise_floor_classification,
    parse_matrix_csv,
    signed_edges,
)
from readout_correlation_analyser.errors import ValidationError
from readout_correlation_analyser.estimators import sampling_bounds
from readout_correlation_analyser.models import CorrelatorSet, FloorFlag
from readout_correlation_analyser.noise_model import exact_correlators
from readout_correlation_analyser.topology import build_topology, builtin_topology, min_distances


def correlators(A, C=None, shots=None, epsilon=None):
    A = np.array(A, dtype=float)
    n = A.shape[0]
    np.fill_diagonal(A, np.nan)
    if C is None:
        C = np.zeros((n, n))
    C = np.array(C, dtype=float)
    np.fill_diagonal(C, np.nan)
    return CorrelatorSet(
        num_qubits=n,
        epsilon=np.array(epsilon if epsilon is not None else [0.02] * n, dtype=float),
        A=A,
        C=C,
        shots=shots,
        bounds=sampling_bounds(shots) if shots else None,
    )


class TestHistogram:
    """Tests for half-open histograms."""

    def test_single_bin(self):
        result = histogram([0.5], [0, 1])
        assert result.counts == [1]

    def test_underflow_excluded(self):
        result = histogram([-0.1], [0, 1])
        assert result.counts == [0]
        assert result.underflow == 1

    def test_half_open(self):
        result = histogram([0, 0.999, 1.0], [0, 1])
        assert result.counts == [2]
        assert result.overflow == 1

    def test_invalid_edges(self):
        with pytest.raises(ValidationError, match="at least two edges"):
            histogram([0.1], [0])
        with pytest.raises(ValidationError, match="strictly increasing"):
            histogram([0.1], [0, 1, 1])

    def test_nan_rejected(self):
        with pytest.raises(ValidationError, match="NaN"):
            histogram([np.nan], [0, 1])

    def test_default_edges(self, config):
        edges = default_edges(config)
        assert len(edges) == 21
        assert edges[0] == pytest.approx(1e-5)
        assert edges[-1] == pytest.approx(1.0)

    def test_signed_edges_cover_values(self):
        values = [-0.03, 0.01, 0.03]
        result = histogram(values, signed_edges(values, 6))
        assert sum(result.counts) == 3

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.floats(-2, 2, allow_nan=False), max_size=50))
    def test_every_value_counted_once(self, values):
        result = histogram(values, [-1.0, -0.1, 0.0, 0.1, 1.0])
        assert result.total == len(values)


class TestBinByDistance:
    """Tests for quartile summaries per distance."""

    def test_linear_quartiles(self, path3):
        """Test quartiles of [0.01, 0.02, 0.03, 0.04] at distance 1."""
        A = [[0, 0.01, 0.5], [0.02, 0, 0.03], [0.5, 0.04, 0]]
        summary = bin_by_distance(correlators(A).A, min_distances(path3))
        d1 = summary.get(1)
        assert d1.count == 4
        assert d1.minimum == pytest.approx(0.01)
        assert d1.q1 == pytest.approx(0.0175)
        assert d1.median == pytest.approx(0.025)
        assert d1.q3 == pytest.approx(0.0325)
        assert d1.maximum == pytest.approx(0.04)
        assert d1.mean == pytest.approx(0.025)
        assert summary.get(2).count == 2

    def test_absolute_values(self, path3):
        A = [[0, -0.02, 0], [-0.02, 0, 0], [0, 0, 0]]
        assert bin_by_distance(correlators(A).A, min_distances(path3)).get(1).maximum == pytest.approx(0.02)

    def test_all_zero(self):
        distances = min_distances(builtin_topology("path", 4))
        summary = bin_by_distance(correlators(np.zeros((4, 4))).A, distances)
        for b in summary.bins:
            assert (b.minimum, b.q1, b.median, b.q3, b.maximum) == (0, 0, 0, 0, 0)
        assert summary.pair_count == 12

    def test_empty_bins_kept(self):
        """Test that a distance with no pairs gives an empty bin, not a gap."""
        topo = build_topology(4, [(0, 1), (1, 2), (2, 3)])
        distances = min_distances(topo)
        A = np.zeros((4, 4))
        A[0, 3] = np.nan
        A[3, 0] = np.nan
        summary = bin_by_distance(correlators(A).A, distances)
        d3 = summary.get(3)
        assert d3.is_empty
        assert d3.median is None
        assert summary.masked_pairs == 2

    def test_unreachable_pairs_counted(self):
        distances = min_distances(build_topology(3, [(0, 1)]))
        summary = bin_by_distance(correlators(np.full((3, 3), 0.01)).A, distances)
        assert summary.unreachable_pairs == 4
        assert summary.pair_count == 2

    def test_size_mismatch(self, path3):
        with pytest.raises(ValidationError, match="num_qubits mismatch"):
            bin_by_distance(np.zeros((2, 2)), min_distances(path3))

    @pytest.mark.parametrize("constant", [False, True])
    def test_spatial_decay(self, decaying_model, constant):
        """Test medians decay with distance, and stay flat for a constant shift."""
        topo = builtin_topology("path", 10)
        corr = exact_correlators(decaying_model(topo, constant=constant))
        medians = bin_by_distance(corr.A, min_distances(topo)).medians()
        values = [medians[d] for d in sorted(medians)]
        assert len(values) == 9
        if constant:
            assert max(values) - min(values) <= 1e-12
        else:
            assert all(a > b for a, b in zip(values, values[1:]))

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(-1, 1, allow_nan=False), min_size=6, max_size=6))
    def test_quartiles_ordered(self, entries):
        A = np.zeros((3, 3))
        A[~np.eye(3, dtype=bool)] = entries
        summary = bin_by_distance(correlators(A).A, min_distances(builtin_topology("ring", 3)))
        b = summary.get(1)
        assert b.minimum <= b.q1 <= b.median <= b.q3 <= b.maximum


class TestNoiseFloor:
    """Tests for noise-floor classification."""

    def test_above_floor(self):
        flags = noise_floor_classification(correlators([[0, 0.01], [0, 0]], shots=81920))
        assert flags.A[0][1] is FloorFlag.ABOVE_FLOOR
        assert flags.A[1][0] is FloorFlag.BELOW_FLOOR
        assert flags.A[0][0] is None

    def test_below_floor(self):
        flags = noise_floor_classification(correlators([[0, 5e-4], [0, 0]], shots=819200))
        assert flags.A[0][1] is FloorFlag.BELOW_FLOOR

    def test_exactly_at_floor(self):
        floor = sampling_bounds(81920).eps_or_A
        flags = noise_floor_classification(correlators([[0, floor], [0, 0]], shots=81920))
        assert flags.A[0][1] is FloorFlag.BELOW_FLOOR

    def test_multiplier(self):
        corr = correlators([[0, 0.01], [0, 0]], shots=81920)
        assert noise_floor_classification(corr, multiplier=5).A[0][1] is FloorFlag.BELOW_FLOOR

    def test_requires_shots(self):
        with pytest.raises(ValidationError, match="no shot count"):
            noise_floor_classification(correlators([[0, 0.01], [0, 0]]))

    @settings(max_examples=50, deadline=None)
    @given(
        st.lists(st.floats(-0.05, 0.05, allow_nan=False), min_size=6, max_size=6),
        st.floats(0.1, 5),
        st.floats(0.1, 5),
    )
    def test_larger_multiplier_flags_fewer(self, entries, k1, k2):
        A = np.zeros((3, 3))
        A[~np.eye(3, dtype=bool)] = entries
        corr = correlators(A, shots=10000)
        low, high = sorted((k1, k2))
        assert (
            noise_floor_classification(corr, high).count_above("A")
            <= noise_floor_classification(corr, low).count_above("A")
        )


class TestMatrixReport:
    """Tests for full-matrix export."""

    def test_empty_diagonals(self):
        report = matrix_report(correlators([[0, 0.1], [0.2, 0]]), min_distances(builtin_topology("path", 2)))
        assert report.A.shape == (2, 2)
        assert report.to_dict()["A"] == [[None, 0.1], [0.2, None]]
        lines = report.to_csv("A").splitlines()
        assert lines[0] == "qubit,0,1"
        assert lines[1] == "0,,0.1"

    def test_path_distances(self, path3):
        report = matrix_report(correlators(np.zeros((3, 3))), min_distances(path3))
        assert report.to_dict()["distances"] == [[0, 1, 2], [1, 0, 1], [2, 1, 0]]

    def test_unreachable_empty(self):
        report = matrix_report(correlators(np.zeros((2, 2))), min_distances(build_topology(2, [])))
        assert report.to_dict()["distances"] == [[0, None], [None, 0]]
        assert report.to_csv("distances").splitlines()[1] == "0,0,"

    def test_csv_reparses_exactly(self):
        A = np.array([[0, 1 / 3, -2e-7], [0.123456789012345, 0, 1e-300], [-0.5, 2 / 7, 0]])
        C = np.array([[0, 1 / 7, -3e-9], [1 / 7, 0, 0.1008], [-3e-9, 0.1008, 0]])
        corr = correlators(A, C=C)
        report = matrix_report(corr, min_distances(builtin_topology("path", 3)))
        assert np.array_equal(parse_matrix_csv(report.to_csv("A")), corr.A, equal_nan=True)
        assert np.array_equal(parse_matrix_csv(report.to_csv("C")), corr.C, equal_nan=True)

    def test_c_table_empty_diagonal(self):
        corr = correlators(np.zeros((2, 2)), C=[[0, 0.004], [0.004, 0]])
        report = matrix_report(corr, min_distances(builtin_topology("path", 2)))
        assert report.to_dict()["C"] == [[None, 0.004], [0.004, None]]
        assert report.to_csv("C").splitlines()[2] == "1,0.004,"


class TestCorrelationSummary:
    """Tests for the correlation-to-error comparison."""

    def test_ratios(self):
        corr = correlators([[0, 0.01], [-0.004, 0]], C=[[0, 0.001], [0.001, 0]], shots=81920)
        floors = noise_floor_classification(corr)
        stats = correlation_summary(corr, floors)
        assert stats["max_abs_A"] == pytest.approx(0.01)
        assert stats["max_A_to_mean_epsilon"] == pytest.approx(0.5)
        assert stats["max_C_to_mean_epsilon"] == pytest.approx(0.05)
        assert stats["A_above_floor"] == 2
        assert stats["C_above_floor"] == 0
