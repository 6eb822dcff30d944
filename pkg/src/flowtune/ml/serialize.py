"""Model persistence: a self-describing JSON document per model, written
deterministically so identical models produce identical bytes."""

from __future__ import annotations

import json

from ..errors import IoFailure, SchemaMismatch
from .forest import RandomForest
from .knn import KnnClassifier
from .tree import DecisionTree

_KINDS = {
    "decision_tree": DecisionTree,
    "knn": KnnClassifier,
    "random_forest": RandomForest,
}


def model_to_dict(model) -> dict:
    for kind, cls in _KINDS.items():
        if isinstance(model, cls):
            return {"kind": kind, "state": model.to_dict()}
    raise SchemaMismatch(f"unknown model type: {type(model).__name__}")


def model_from_dict(data: dict):
    kind = data.get("kind")
    if kind not in _KINDS:
        raise SchemaMismatch(f"unknown model kind: {kind!r}")
    return _KINDS[kind].from_dict(data["state"])


def save_model(model, destination) -> None:
    doc = json.dumps(model_to_dict(model), sort_keys=True, indent=1)
    if hasattr(destination, "write"):
        destination.write(doc)
        return
    try:
        with open(destination, "w") as handle:
            handle.write(doc)
    except OSError as exc:
        raise IoFailure(str(exc)) from exc


def load_model(source):
    if hasattr(source, "read"):
        return model_from_dict(json.load(source))
    try:
        with open(source) as handle:
            return model_from_dict(json.load(handle))
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    except json.JSONDecodeError as exc:
        raise SchemaMismatch(f"not a model file: {exc}") from exc
