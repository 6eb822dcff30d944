"""Feature pipeline: record -> fixed-order vector, min-max scaling, and
stratified train/test splitting."""

from __future__ import annotations

from typing import List, Sequence, Tuple

import numpy as np

from ..errors import ClassTooSmall, ValueOutOfRange

# Telemetry feature order; position 7 is the destination port.
FEATURE_NAMES = (
    "ingress_port",
    "flow_interval_time",
    "enq_qdepth",
    "deq_qdepth",
    "deq_timedelta",
    "protocol",
    "src_port",
    "dst_port",
    "src_ip",
    "dst_ip",
)

NUM_FEATURES = len(FEATURE_NAMES)


def featurize(record) -> np.ndarray:
    """The ten features as a float vector. Works for any object exposing the
    feature names as attributes (telemetry records and trace rows)."""
    return np.array([float(getattr(record, name)) for name in FEATURE_NAMES])


def featurize_rows(rows: Sequence) -> np.ndarray:
    if not rows:
        return np.empty((0, NUM_FEATURES))
    return np.array([[float(getattr(r, name)) for name in FEATURE_NAMES] for r in rows])


def labels_of(rows: Sequence) -> np.ndarray:
    return np.array([int(r.label) for r in rows], dtype=np.int64)


class Normalizer:
    """Per-feature min-max scaler fitted on training data only.

    Degenerate features (min == max) map to 0.
    """

    def __init__(self, mins: np.ndarray = None, maxs: np.ndarray = None) -> None:
        self.mins = mins
        self.maxs = maxs

    def fit(self, X: np.ndarray) -> "Normalizer":
        self.mins = X.min(axis=0)
        self.maxs = X.max(axis=0)
        return self

    def transform(self, X: np.ndarray) -> np.ndarray:
        span = self.maxs - self.mins
        safe = np.where(span == 0, 1.0, span)
        out = (X - self.mins) / safe
        return np.where(span == 0, 0.0, out)

    def to_dict(self) -> dict:
        return {"mins": self.mins.tolist(), "maxs": self.maxs.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "Normalizer":
        return cls(np.array(data["mins"]), np.array(data["maxs"]))


def train_test_split(
    X: np.ndarray,
    y: np.ndarray,
    train_fraction: float,
    seed: int,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Deterministic stratified split into (X_train, y_train, X_test, y_test).

    Each class contributes floor(train_fraction * class size) training rows.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueOutOfRange("train_fraction must be in (0, 1)")
    if len(X) == 0 or len(X) != len(y):
        raise ValueOutOfRange("X and y must be non-empty and equal length")
    rng = np.random.default_rng(seed)
    train_idx: List[int] = []
    test_idx: List[int] = []
    for cls in np.unique(y):
        members = np.flatnonzero(y == cls)
        if len(members) < 2:
            raise ClassTooSmall(f"class {int(cls)} has {len(members)} sample(s)")
        order = members[rng.permutation(len(members))]
        n_train = int(len(members) * train_fraction)
        # Keep both partitions non-empty for every class.
        n_train = min(max(n_train, 1), len(members) - 1)
        train_idx.extend(order[:n_train].tolist())
        test_idx.extend(order[n_train:].tolist())
    train_idx.sort()
    test_idx.sort()
    return X[train_idx], y[train_idx], X[test_idx], y[test_idx]
