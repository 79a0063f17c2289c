"""Model files: a strict JSON schema for systems and plants.

Two kinds are supported::

    {
      "schema_version": 1,
      "kind": "system",
      "n": 2,
      "A": [[...], ...],          # n x n, row-major nested arrays
      "V": [[...], ...],
      "mu0": [...],               # length n
      "Sigma0": [[...], ...],
      "cost": {"Q": [[...], ...], "alpha": -0.5, "horizon": "inf" | T}
    }

    {
      "schema_version": 1,
      "kind": "plant",
      "n": 2, "m": 1, "p": 2,
      "A": ..., "B": ..., "C": ..., "Q": ..., "R": ..., "V": ..., "W": ...,
      "alpha": -0.8,
      "mu0": [...], "Sigma0": [[...], ...],
      "horizon": "inf" | T
    }

Unknown fields are rejected at every level, dimensions must agree with the
declared n/m/p, and floats are written with shortest round-trip precision
(up to 17 significant digits), so save followed by load reproduces every
matrix entry bit-for-bit.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import ModelFormatError
from .systems import CostSpec, LqgPlant, LtiSystem, INFINITE_HORIZON

__all__ = ["ModelDocument", "load_model", "save_system_model", "save_plant_model",
           "to_jsonable", "dump_report"]

SCHEMA_VERSION = 1

_SYSTEM_FIELDS = {"schema_version", "kind", "n", "A", "V", "mu0", "Sigma0", "cost"}
_COST_FIELDS = {"Q", "alpha", "horizon"}
_PLANT_FIELDS = {"schema_version", "kind", "n", "m", "p", "A", "B", "C", "Q", "R",
                 "V", "W", "alpha", "mu0", "Sigma0", "horizon"}


@dataclass
class ModelDocument:
    """A parsed model file: exactly one of ``system`` or ``plant`` is set."""

    kind: str
    system: LtiSystem = None
    cost: CostSpec = None
    plant: LqgPlant = None
    mu0: np.ndarray = None
    Sigma0: np.ndarray = None
    horizon: float = INFINITE_HORIZON


def _require_keys(obj, allowed, required, where):
    if not isinstance(obj, dict):
        raise ModelFormatError(f"{where} must be a JSON object")
    unknown = set(obj) - allowed
    if unknown:
        raise ModelFormatError(f"{where}: unknown field(s) {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise ModelFormatError(f"{where}: missing field(s) {sorted(missing)}")


def _parse_matrix(obj, rows, cols, name):
    try:
        arr = np.array(obj, dtype=float)
    except (TypeError, ValueError):
        raise ModelFormatError(f"{name} must be a nested array of numbers")
    if arr.shape != (rows, cols):
        raise ModelFormatError(f"{name} must be {rows}x{cols}, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ModelFormatError(f"{name} contains non-finite entries")
    return arr


def _parse_vector(obj, n, name):
    try:
        arr = np.array(obj, dtype=float)
    except (TypeError, ValueError):
        raise ModelFormatError(f"{name} must be an array of numbers")
    if arr.shape != (n,):
        raise ModelFormatError(f"{name} must have length {n}, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ModelFormatError(f"{name} contains non-finite entries")
    return arr


def _parse_dim(obj, name):
    v = obj.get(name)
    if not isinstance(v, int) or isinstance(v, bool) or v < 1:
        raise ModelFormatError(f"{name} must be a positive integer")
    return v


def _parse_horizon(value, where):
    if value == "inf":
        return INFINITE_HORIZON
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        if not (math.isfinite(value) and value > 0):
            raise ModelFormatError(f"{where}: horizon must be positive and finite, or \"inf\"")
        return float(value)
    raise ModelFormatError(f"{where}: horizon must be a number or \"inf\"")


def load_model(path):
    """Parse and validate a model file; returns a :class:`ModelDocument`."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"{path}: not valid JSON ({exc})")
    if not isinstance(raw, dict):
        raise ModelFormatError(f"{path}: top level must be a JSON object")
    if raw.get("schema_version") != SCHEMA_VERSION:
        raise ModelFormatError(
            f"{path}: unsupported schema_version {raw.get('schema_version')!r} "
            f"(expected {SCHEMA_VERSION})"
        )
    kind = raw.get("kind")
    if kind == "system":
        return _load_system(raw, path)
    if kind == "plant":
        return _load_plant(raw, path)
    raise ModelFormatError(f"{path}: kind must be \"system\" or \"plant\", got {kind!r}")


def _load_system(raw, path):
    _require_keys(raw, _SYSTEM_FIELDS, _SYSTEM_FIELDS, path)
    n = _parse_dim(raw, "n")
    cost_raw = raw["cost"]
    _require_keys(cost_raw, _COST_FIELDS, _COST_FIELDS, f"{path}: cost")
    if not isinstance(cost_raw["alpha"], (int, float)) or isinstance(cost_raw["alpha"], bool):
        raise ModelFormatError(f"{path}: cost.alpha must be a number")
    sys = LtiSystem(
        A=_parse_matrix(raw["A"], n, n, "A"),
        V=_parse_matrix(raw["V"], n, n, "V"),
        mu0=_parse_vector(raw["mu0"], n, "mu0"),
        Sigma0=_parse_matrix(raw["Sigma0"], n, n, "Sigma0"),
    )
    cost = CostSpec(
        Q=_parse_matrix(cost_raw["Q"], n, n, "cost.Q"),
        alpha=float(cost_raw["alpha"]),
        horizon=_parse_horizon(cost_raw["horizon"], path),
    )
    return ModelDocument(kind="system", system=sys, cost=cost,
                         mu0=sys.mu0, Sigma0=sys.Sigma0, horizon=cost.horizon)


def _load_plant(raw, path):
    _require_keys(raw, _PLANT_FIELDS, _PLANT_FIELDS - {"horizon"}, path)
    n = _parse_dim(raw, "n")
    m = _parse_dim(raw, "m")
    p = _parse_dim(raw, "p")
    if not isinstance(raw["alpha"], (int, float)) or isinstance(raw["alpha"], bool):
        raise ModelFormatError(f"{path}: alpha must be a number")
    plant = LqgPlant(
        A=_parse_matrix(raw["A"], n, n, "A"),
        B=_parse_matrix(raw["B"], n, m, "B"),
        C=_parse_matrix(raw["C"], p, n, "C"),
        Q=_parse_matrix(raw["Q"], n, n, "Q"),
        R=_parse_matrix(raw["R"], m, m, "R"),
        V=_parse_matrix(raw["V"], n, n, "V"),
        W=_parse_matrix(raw["W"], p, p, "W"),
        alpha=float(raw["alpha"]),
    )
    mu0 = _parse_vector(raw["mu0"], n, "mu0")
    sigma0 = _parse_matrix(raw["Sigma0"], n, n, "Sigma0")
    horizon = _parse_horizon(raw.get("horizon", "inf"), path)
    return ModelDocument(kind="plant", plant=plant, mu0=mu0, Sigma0=sigma0,
                         horizon=horizon)


def to_jsonable(obj):
    """Convert numpy containers to plain JSON-serializable structures."""
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, dict):
        return {k: to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, float) and math.isinf(obj):
        return "inf" if obj > 0 else "-inf"
    return obj


def dump_report(obj):
    """Canonical JSON text for reports: sorted keys, newline-terminated.

    Floats use shortest round-trip formatting, so an identical computation
    yields byte-identical text.
    """
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True) + "\n"


def save_system_model(path, sys: LtiSystem, cost: CostSpec):
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "system",
        "n": sys.dim,
        "A": sys.A.tolist(),
        "V": sys.V.tolist(),
        "mu0": sys.mu0.tolist(),
        "Sigma0": sys.Sigma0.tolist(),
        "cost": {
            "Q": cost.Q.tolist(),
            "alpha": cost.alpha,
            "horizon": "inf" if cost.is_infinite else cost.horizon,
        },
    }
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(doc, indent=2) + "\n")


def save_plant_model(path, plant: LqgPlant, mu0, sigma0, horizon=INFINITE_HORIZON):
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "plant",
        "n": plant.n_states,
        "m": plant.n_inputs,
        "p": plant.n_outputs,
        "A": plant.A.tolist(),
        "B": plant.B.tolist(),
        "C": plant.C.tolist(),
        "Q": plant.Q.tolist(),
        "R": plant.R.tolist(),
        "V": plant.V.tolist(),
        "W": plant.W.tolist(),
        "alpha": plant.alpha,
        "mu0": np.asarray(mu0, dtype=float).tolist(),
        "Sigma0": np.asarray(sigma0, dtype=float).tolist(),
        "horizon": "inf" if math.isinf(horizon) else float(horizon),
    }
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(doc, indent=2) + "\n")
