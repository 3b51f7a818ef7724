"""
Tests for the preparation protocol, counts tables and counts ingestion.
"""

import json

import pytest

from readout_correlation_analyser.errors import BackendError, ValidationError
from readout_correlation_analyser.loaders import write_counts
from readout_correlation_analyser.models import CountsTable, NoiseModel, Preparation
from readout_correlation_analyser.noise_model import ReadoutSimulator
from readout_correlation_analyser.protocol import ingest_counts, preparation_set, run_protocol


class FailingBackend:
    """Backend that breaks on one preparation."""

    num_qubits = 2

    def run(self, true_state, shots, seed):
        if true_state == (0, 1):
            raise RuntimeError("device offline")
        return {"".join(map(str, true_state)): shots}


class ShortBackend:
    """Backend that drops a shot."""

    num_qubits = 1

    def run(self, true_state, shots, seed):
        return {"0": shots - 1}


class TestPreparations:
    """Tests for the n+1 preparation set."""

    def test_single_qubit(self):
        preps = preparation_set(1)
        assert [p.label for p in preps] == ["ground", "x_0"]
        assert preps[1].true_state == (1,)

    @pytest.mark.parametrize("n, size", [(15, 16), (65, 66)])
    def test_device_sizes(self, n, size):
        assert len(preparation_set(n)) == size

    def test_true_states(self):
        preps = preparation_set(3)
        assert preps[0].is_ground
        assert preps[0].true_state == (0, 0, 0)
        assert preps[3].true_state == (0, 0, 1)

    def test_from_label(self):
        assert Preparation.from_label("x_2", 3).qubit == 2
        with pytest.raises(ValidationError, match="unknown preparation label 'x_3'"):
            Preparation.from_label("x_3", 3)


class TestCountsTable:
    """Tests for CountsTable invariants."""

    def test_missing_preparation(self):
        histograms = {"ground": {"00000": 10}}
        histograms.update({f"x_{k}": {"00000": 10} for k in range(5) if k != 3})
        with pytest.raises(ValidationError, match="x_3"):
            CountsTable(5, 10, histograms)

    def test_total_mismatch(self):
        with pytest.raises(ValidationError, match="count total mismatch"):
            CountsTable(1, 10, {"ground": {"0": 9}, "x_0": {"1": 10}})

    def test_malformed_bitstring(self):
        with pytest.raises(ValidationError, match="malformed bitstring '0'"):
            CountsTable(2, 10, {"ground": {"0": 10}, "x_0": {"10": 10}, "x_1": {"01": 10}})

    def test_unexpected_label(self):
        with pytest.raises(ValidationError, match="unexpected"):
            CountsTable(1, 1, {"ground": {"0": 1}, "x_0": {"1": 1}, "x_1": {"1": 1}})

    def test_order_and_lsb_output(self, noiseless_counts):
        table = noiseless_counts(2, 4)
        assert table.labels == ["ground", "x_0", "x_1"]
        assert table.to_dict("lsb")["preparations"]["x_0"] == {"01": 4}


class TestRunProtocol:
    """Tests for run_protocol."""

    def test_noiseless_backend(self):
        table = run_protocol(ReadoutSimulator(NoiseModel.noiseless(2)), 2, 10, seed=5)
        assert table.ground == {"00": 10}
        assert table.excited(1) == {"01": 10}
        assert table.excited(0) == {"10": 10}

    def test_totals(self, small_model):
        table = run_protocol(ReadoutSimulator(small_model), 3, 81920, seed=9)
        assert len(table.histograms) == 4
        assert all(sum(h.values()) == 81920 for h in table.histograms.values())

    def test_same_seed_same_table(self, small_model):
        first = run_protocol(ReadoutSimulator(small_model), 3, 2000, seed=1)
        second = run_protocol(ReadoutSimulator(small_model), 3, 2000, seed=1)
        assert first.to_dict() == second.to_dict()

    def test_worker_count_irrelevant(self, small_model):
        """Test that parallel sampling reproduces the sequential table."""
        sequential = run_protocol(ReadoutSimulator(small_model), 3, 3000, seed=4)
        parallel = run_protocol(ReadoutSimulator(small_model), 3, 3000, seed=4, workers=4)
        assert sequential.to_dict() == parallel.to_dict()

    def test_backend_failure_names_label(self):
        with pytest.raises(BackendError, match="'x_1'.*device offline"):
            run_protocol(FailingBackend(), 2, 10, seed=0)

    def test_backend_wrong_total(self):
        with pytest.raises(BackendError, match="'ground'.*9 shots"):
            run_protocol(ShortBackend(), 1, 10, seed=0)

    def test_backend_size_mismatch(self, small_model):
        with pytest.raises(ValidationError, match="num_qubits mismatch"):
            run_protocol(ReadoutSimulator(small_model), 2, 10, seed=0)


class TestIngestCounts:
    """Tests for counts-file ingestion."""

    def counts_doc(self, bit_order=None):
        doc = {
            "num_qubits": 2,
            "shots": 7,
            "preparations": {
                "ground": {"00": 7},
                "x_0": {"01": 7},
                "x_1": {"10": 7},
            },
        }
        if bit_order:
            doc["bit_order"] = bit_order
        return doc

    def test_lsb_reversed(self, write_json):
        """Test that lsb '01' is canonical '10' (qubit 0 reads 1)."""
        table = ingest_counts(write_json("c.json", self.counts_doc()), "lsb")
        assert table.excited(0) == {"10": 7}
        assert table.excited(1) == {"01": 7}

    def test_declared_order_used(self, write_json):
        table = ingest_counts(write_json("c.json", self.counts_doc("lsb")))
        assert table.excited(0) == {"10": 7}

    def test_order_required(self, write_json):
        with pytest.raises(ValidationError, match="no bit order"):
            ingest_counts(write_json("c.json", self.counts_doc()))

    def test_conflicting_order(self, write_json):
        with pytest.raises(ValidationError, match="conflicts"):
            ingest_counts(write_json("c.json", self.counts_doc("msb")), "lsb")

    def test_wrong_length(self, write_json):
        doc = self.counts_doc("msb")
        doc["preparations"]["ground"] = {"000": 7}
        with pytest.raises(ValidationError, match="malformed bitstring '000'"):
            ingest_counts(write_json("c.json", doc))

    def test_total_mismatch(self, write_json):
        doc = self.counts_doc("msb")
        doc["preparations"]["ground"] = {"00": 6}
        with pytest.raises(ValidationError, match="count total mismatch"):
            ingest_counts(write_json("c.json", doc))

    def test_fractional_count_rejected(self, write_json):
        doc = self.counts_doc("msb")
        doc["preparations"]["ground"] = {"00": 6.5, "01": 0.5}
        with pytest.raises(ValidationError, match="non-negative integer"):
            ingest_counts(write_json("c.json", doc))

    @pytest.mark.parametrize("order", ["msb", "lsb"])
    def test_write_then_ingest_identity(self, tmp_path, small_model, order):
        table = run_protocol(ReadoutSimulator(small_model), 3, 500, seed=2)
        path = write_counts(table, tmp_path / "counts.json", order)
        assert ingest_counts(path).histograms == table.histograms
        assert json.loads(path.read_text())["bit_order"] == order
