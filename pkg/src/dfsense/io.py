"""JSON file formats.

network.json   {"signal": [[...]], "noise": [[...]], "time": 1.0}
strategy.json  {"type": "pure", "terms": [{"k": [...], "re": 0.7, "im": 0.0}, ...]}
               {"type": "sequential", "terms": [{"k": [...], "rate": 0.5}, ...]}
weights.json   {"w": [[...]]}

Matrices are row-major lists of rows. Unknown keys are ignored.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .model import (
    PureStrategy,
    SequentialStrategy,
    pure_strategy,
    sequential_strategy,
    validate_network,
    weight_matrix,
)


class FormatError(ValueError):
    """File is not valid JSON or lacks required keys."""


def _read(path) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"{path}: {exc}") from exc
    if not isinstance(data, dict):
        raise FormatError(f"{path}: top level must be an object")
    return data


def network_from_dict(data: dict):
    try:
        return validate_network(data["signal"], data.get("noise", []), data.get("time", 1.0))
    except KeyError as exc:
        raise FormatError(f"network is missing key {exc}") from exc


def load_network(path):
    return network_from_dict(_read(path))


def strategy_from_dict(data: dict, tol: float = 1e-9):
    kind = data.get("type")
    terms = data.get("terms")
    if not isinstance(terms, list) or not terms:
        raise FormatError("strategy needs a non-empty 'terms' list")
    try:
        if kind == "pure":
            return pure_strategy(
                [(t["k"], complex(t.get("re", 0.0), t.get("im", 0.0))) for t in terms], tol=tol)
        if kind == "sequential":
            return sequential_strategy([(t["k"], t["rate"]) for t in terms], tol=tol)
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed strategy term: {exc}") from exc
    raise FormatError(f"unknown strategy type {kind!r}")


def load_strategy(path, tol: float = 1e-9):
    return strategy_from_dict(_read(path), tol)


def load_weights(path):
    data = _read(path)
    if "w" not in data:
        raise FormatError(f"{path}: missing key 'w'")
    return weight_matrix(data["w"])


def _floats(a) -> list:
    return np.asarray(a, dtype=float).tolist()


def strategy_to_dict(strategy) -> dict:
    if isinstance(strategy, PureStrategy):
        return {"type": "pure", "terms": [
            {"k": _floats(k), "re": float(c.real), "im": float(c.imag)}
            for k, c in zip(strategy.labels, strategy.amplitudes)]}
    if isinstance(strategy, SequentialStrategy):
        return {"type": "sequential", "terms": [
            {"k": _floats(k), "rate": float(r)} for k, r in zip(strategy.labels, strategy.rates)]}
    raise TypeError(f"not a strategy: {type(strategy).__name__}")


def network_to_dict(network) -> dict:
    return {"signal": _floats(network.signal), "noise": _floats(network.noise),
            "time": float(network.time)}


def write_json(path, data: dict) -> None:
    Path(path).write_text(json.dumps(data, indent=2) + "\n")
