"""
Utilities for loading configuration and reading/writing the toolkit's files.
"""

import json
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Union

import numpy as np
import yaml

from .errors import ValidationError
from .estimators import sampling_bounds
from .models import CorrelatorSet, CountsTable, NoiseModel, Topology, list_to_masked
from .topology import build_topology

PathLike = Union[str, Path]


class ConfigLoader:
    """Load and manage configuration files."""

    def __init__(self, config_path: Optional[PathLike] = None):
        """
        Initialize config loader.

        Args:
            config_path: Path to settings.yaml. If None, uses default location.
        """
        if config_path is None:
            # Default to config/settings.yaml relative to package root
            package_dir = Path(__file__).parent.parent.parent
            config_path = package_dir / "config" / "settings.yaml"

        self.config_path = Path(config_path)
        self._config: Optional[Dict[str, Any]] = None

    def load(self) -> Dict[str, Any]:
        """Load configuration from YAML file (empty if the file is absent)."""
        if self._config is None:
            if not self.config_path.exists():
                self._config = {}
            else:
                with open(self.config_path, "r", encoding="utf-8") as f:
                    try:
                        self._config = yaml.safe_load(f) or {}
                    except yaml.YAMLError as e:
                        detail = " ".join(str(e).split())
                        raise ValidationError(f"malformed settings file {self.config_path}: {detail}") from e
        return self._config

    def get(self, key: str, default: Any = None) -> Any:
        """Get a configuration value by key (supports dot notation)."""
        config = self.load()
        keys = key.split(".")
        value: Any = config
        for k in keys:
            if isinstance(value, dict):
                value = value.get(k)
            else:
                return default
            if value is None:
                return default
        return value


def config_value(config: Optional[ConfigLoader], key: str, default: Any) -> Any:
    """Value from an optional config, falling back to the built-in default."""
    if config is None:
        return default
    return config.get(key, default)


def read_json(path: PathLike) -> Any:
    """Parse a JSON file; syntax errors report line and column."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise ValidationError(f"{path} is not UTF-8 text: byte {e.start} cannot be decoded") from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ValidationError(
            f"malformed JSON in {path}: line {e.lineno} column {e.colno}: {e.msg}"
        ) from e


def dumps(data: Any, indent: int = 2) -> str:
    """Deterministic JSON text; floats keep full repr precision."""
    return json.dumps(data, indent=indent, allow_nan=False) + "\n"


def write_text_atomic(path: PathLike, text: str) -> Path:
    """Write text to a temp file next to `path`, then rename over it."""
    path = Path(path)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
    return path


def _require_object(data: Any, path: PathLike, required: Iterable[str], allowed: Iterable[str]) -> Dict[str, Any]:
    if not isinstance(data, dict):
        raise ValidationError(f"{path}: top-level JSON value must be an object")
    missing = [k for k in required if k not in data]
    if missing:
        raise ValidationError(f"{path}: missing key(s): {', '.join(missing)}")
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        raise ValidationError(f"{path}: unknown key(s): {', '.join(unknown)}")
    return data


def _as_int(value: Any, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(f"{what} must be an integer, got {value!r}")
    return value


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _number_list(value: Any, what: str) -> tuple:
    if not isinstance(value, list) or not all(_is_number(v) for v in value):
        raise ValidationError(f"'{what}' must be a list of numbers, got {value!r}")
    return tuple(float(v) for v in value)


def _masked_matrix(rows: Any, what: str, n: int) -> np.ndarray:
    """n x n matrix of numbers with null on the diagonal."""
    if (
        not isinstance(rows, list)
        or len(rows) != n
        or not all(isinstance(row, list) and len(row) == n for row in rows)
    ):
        raise ValidationError(f"'{what}' must be {n}x{n} (a list of {n} rows of {n} entries)")
    for i, row in enumerate(rows):
        for j, value in enumerate(row):
            if i == j and value is not None:
                raise ValidationError(f"'{what}'[{i}][{i}] is on the diagonal and must be null")
            if i != j and not _is_number(value):
                raise ValidationError(f"'{what}'[{i}][{j}] must be a number, got {value!r}")
    return list_to_masked(rows)


def load_topology(path: PathLike) -> Topology:
    """Read a topology file {"num_qubits": n, "edges": [[i, j], ...]}."""
    data = _require_object(read_json(path), path, ["num_qubits", "edges"], ["num_qubits", "edges"])
    n = _as_int(data["num_qubits"], "num_qubits")
    edges = data["edges"]
    if not isinstance(edges, list) or not all(isinstance(e, list) for e in edges):
        raise ValidationError(f"{path}: 'edges' must be a list of [i, j] pairs")
    return build_topology(n, [[_as_int(v, "edge endpoint") for v in e] for e in edges])


def _triples(entries: Any, name: str) -> Dict[tuple, float]:
    if not isinstance(entries, list):
        raise ValidationError(f"'{name}' must be a list of [i, j, value] triples")
    result: Dict[tuple, float] = {}
    for entry in entries:
        if not isinstance(entry, list) or len(entry) != 3:
            raise ValidationError(f"'{name}' entry {entry!r} must be [i, j, value]")
        i, j = _as_int(entry[0], f"{name} index"), _as_int(entry[1], f"{name} index")
        key = (i, j)
        if key in result:
            raise ValidationError(f"'{name}' lists ({i}, {j}) twice")
        if not _is_number(entry[2]):
            raise ValidationError(f"'{name}' value for ({i}, {j}) must be a number, got {entry[2]!r}")
        result[key] = float(entry[2])
    return result


MODEL_KEYS = ["num_qubits", "p01", "p10", "spectator01", "spectator10", "pairflip"]


def load_noise_model(path: PathLike) -> NoiseModel:
    """Read a noise-model file; sparse sections default to empty."""
    data = _require_object(read_json(path), path, ["num_qubits", "p01", "p10"], MODEL_KEYS)
    return NoiseModel(
        num_qubits=_as_int(data["num_qubits"], "num_qubits"),
        p01=_number_list(data["p01"], "p01"),
        p10=_number_list(data["p10"], "p10"),
        spectator01=_triples(data.get("spectator01", []), "spectator01"),
        spectator10=_triples(data.get("spectator10", []), "spectator10"),
        pairflip=_triples(data.get("pairflip", []), "pairflip"),
    )


def write_noise_model(model: NoiseModel, path: PathLike) -> Path:
    return write_text_atomic(path, dumps(model.to_dict()))


COUNTS_KEYS = ["num_qubits", "shots", "bit_order", "preparations"]


def read_counts_document(path: PathLike) -> Dict[str, Any]:
    """Raw counts document after structural checks (no bit-order handling)."""
    data = _require_object(
        read_json(path), path, ["num_qubits", "shots", "preparations"], COUNTS_KEYS
    )
    _as_int(data["num_qubits"], "num_qubits")
    _as_int(data["shots"], "shots")
    if not isinstance(data["preparations"], dict):
        raise ValidationError(f"{path}: 'preparations' must be an object")
    for label, hist in data["preparations"].items():
        if not isinstance(hist, dict):
            raise ValidationError(f"{path}: histogram '{label}' must be an object")
        for bitstring, count in hist.items():
            if isinstance(count, bool) or not isinstance(count, int) or count < 0:
                raise ValidationError(
                    f"{path}: count for '{bitstring}' in '{label}' must be a "
                    f"non-negative integer, got {count!r}"
                )
    return data


def write_counts(table: CountsTable, path: PathLike, bit_order: str = "msb") -> Path:
    """Write a CountsTable; 'lsb' stores every bitstring reversed."""
    if bit_order not in ("msb", "lsb"):
        raise ValidationError(f"bit_order must be 'msb' or 'lsb', got '{bit_order}'")
    return write_text_atomic(path, dumps(table.to_dict(bit_order)))


def write_correlators(corr: CorrelatorSet, path: PathLike) -> Path:
    return write_text_atomic(path, dumps(corr.to_dict()))


def load_correlators(path: PathLike) -> CorrelatorSet:
    """Read a correlator file written by write_correlators."""
    data = _require_object(
        read_json(path), path,
        ["num_qubits", "epsilon", "A", "C"],
        ["num_qubits", "exact", "shots", "epsilon", "A", "C", "bounds", "standard_errors"],
    )
    n = _as_int(data["num_qubits"], "num_qubits")
    try:
        A = _masked_matrix(data["A"], "A", n)
        C = _masked_matrix(data["C"], "C", n)
        epsilon = _number_list(data["epsilon"], "epsilon")
        if len(epsilon) != n:
            raise ValidationError(f"'epsilon' must have {n} entries")

        shots = data.get("shots")
        bounds = None
        if shots is not None:
            bounds = sampling_bounds(_as_int(shots, "shots"))
        standard_errors = None
        errors = data.get("standard_errors")
        if errors:
            if not isinstance(errors, dict) or set(errors) != {"epsilon", "A"}:
                raise ValidationError("'standard_errors' must be an object with keys 'epsilon' and 'A'")
            standard_errors = {
                "epsilon": np.array(_number_list(errors["epsilon"], "standard_errors.epsilon")),
                "A": _masked_matrix(errors["A"], "standard_errors.A", n),
            }
    except ValidationError as e:
        raise ValidationError(f"{path}: {e}") from e
    return CorrelatorSet(
        num_qubits=n,
        epsilon=np.array(epsilon, dtype=float),
        A=A,
        C=C,
        shots=shots,
        bounds=bounds,
        exact=bool(data.get("exact", False)),
        standard_errors=standard_errors,
    )


__all__ = [
    "ConfigLoader",
    "config_value",
    "dumps",
    "load_correlators",
    "load_noise_model",
    "load_topology",
    "read_counts_document",
    "read_json",
    "write_correlators",
    "write_counts",
    "write_noise_model",
    "write_text_atomic",
]
