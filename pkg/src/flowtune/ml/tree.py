"""Decision tree classifier: greedy top-down induction on Gini impurity.

Candidate thresholds are midpoints between consecutive distinct sorted
feature values. Ties in impurity gain resolve to the lowest feature index,
then the lowest threshold, so induction is fully deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import ValueOutOfRange
from ..model import NUM_CLASSES


@dataclass
class _Node:
    # Internal node: feature/threshold/left/right. Leaf: counts only.
    feature: int = -1
    threshold: float = 0.0
    left: Optional["_Node"] = None
    right: Optional["_Node"] = None
    counts: Optional[np.ndarray] = None

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    def to_dict(self) -> dict:
        if self.is_leaf:
            return {"counts": self.counts.tolist()}
        return {
            "feature": self.feature,
            "threshold": self.threshold,
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "_Node":
        if "counts" in data:
            return cls(counts=np.array(data["counts"], dtype=np.int64))
        return cls(
            feature=data["feature"],
            threshold=data["threshold"],
            left=cls.from_dict(data["left"]),
            right=cls.from_dict(data["right"]),
        )


def _gini_children(counts_left: np.ndarray, counts_right: np.ndarray) -> np.ndarray:
    """Weighted child Gini impurity for each candidate split position.

    counts_left/right: (n_splits, n_classes) class counts on each side.
    """
    n_left = counts_left.sum(axis=1)
    n_right = counts_right.sum(axis=1)
    total = n_left + n_right
    gini_left = 1.0 - (counts_left**2).sum(axis=1) / (n_left**2)
    gini_right = 1.0 - (counts_right**2).sum(axis=1) / (n_right**2)
    return (n_left * gini_left + n_right * gini_right) / total


class DecisionTree:
    """CART-style classifier over a fixed set of class numbers."""

    def __init__(
        self,
        max_depth: Optional[int] = None,
        min_samples_split: int = 2,
        n_classes: int = NUM_CLASSES,
    ) -> None:
        if min_samples_split < 2:
            raise ValueOutOfRange("min_samples_split must be >= 2")
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.n_classes = n_classes
        self.root: Optional[_Node] = None

    def fit(self, X: np.ndarray, y: np.ndarray, *, rng=None, features_per_split: Optional[int] = None) -> "DecisionTree":
        """Train on X (n, d) and integer labels y.

        When features_per_split is given (random-forest mode), each split
        considers a uniform random subset of features drawn from rng; a
        subset covering all features behaves identically to plain training.
        """
        if len(X) == 0:
            raise ValueOutOfRange("training set must be non-empty")
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=np.int64)
        if features_per_split is not None and features_per_split >= X.shape[1]:
            features_per_split = None
        self.root = self._build(X, y, depth=0, rng=rng, features_per_split=features_per_split)
        return self

    def _build(self, X, y, depth, rng, features_per_split) -> _Node:
        counts = np.bincount(y, minlength=self.n_classes).astype(np.int64)
        pure = (counts > 0).sum() <= 1
        depth_stop = self.max_depth is not None and depth >= self.max_depth
        if pure or depth_stop or len(y) < self.min_samples_split:
            return _Node(counts=counts)

        if features_per_split is None:
            candidates = range(X.shape[1])
        else:
            chosen = rng.choice(X.shape[1], size=features_per_split, replace=False)
            candidates = sorted(int(f) for f in chosen)

        best = None  # (impurity, feature, threshold)
        for feature in candidates:
            found = self._best_threshold(X[:, feature], y)
            if found is None:
                continue
            impurity, threshold = found
            if best is None or impurity < best[0] - 1e-15:
                best = (impurity, feature, threshold)

        if best is None:
            return _Node(counts=counts)
        parent_gini = 1.0 - ((counts / len(y)) ** 2).sum()
        if best[0] >= parent_gini - 1e-12:
            return _Node(counts=counts)

        _, feature, threshold = best
        mask = X[:, feature] <= threshold
        node = _Node(feature=feature, threshold=threshold)
        node.left = self._build(X[mask], y[mask], depth + 1, rng, features_per_split)
        node.right = self._build(X[~mask], y[~mask], depth + 1, rng, features_per_split)
        return node

    def _best_threshold(self, values: np.ndarray, y: np.ndarray):
        """Lowest weighted child impurity over all midpoint thresholds of one
        feature; ties keep the lowest threshold. None if the feature is constant."""
        order = np.argsort(values, kind="stable")
        v = values[order]
        labels = y[order]
        # Splits allowed only between distinct consecutive values.
        boundaries = np.flatnonzero(v[1:] != v[:-1]) + 1
        if boundaries.size == 0:
            return None
        onehot = np.zeros((len(y), self.n_classes))
        onehot[np.arange(len(y)), labels] = 1.0
        cum = np.cumsum(onehot, axis=0)
        left = cum[boundaries - 1]
        right = cum[-1] - left
        impurities = _gini_children(left, right)
        idx = int(np.argmin(impurities))  # argmin keeps the first (lowest threshold)
        b = boundaries[idx]
        threshold = (v[b - 1] + v[b]) / 2.0
        return float(impurities[idx]), threshold

    def _leaf(self, x: np.ndarray) -> _Node:
        node = self.root
        while not node.is_leaf:
            node = node.left if x[node.feature] <= node.threshold else node.right
        return node

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        """Per-class probabilities: leaf histogram normalized to sum 1."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        out = np.empty((len(X), self.n_classes))
        for i, x in enumerate(X):
            counts = self._leaf(x).counts
            out[i] = counts / counts.sum()
        return out

    def predict(self, X: np.ndarray) -> np.ndarray:
        # argmax returns the first maximum: ties go to the lowest class number.
        return np.argmax(self.predict_proba(X), axis=1)

    def to_dict(self) -> dict:
        return {
            "max_depth": self.max_depth,
            "min_samples_split": self.min_samples_split,
            "n_classes": self.n_classes,
            "root": self.root.to_dict() if self.root is not None else None,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DecisionTree":
        tree = cls(
            max_depth=data["max_depth"],
            min_samples_split=data["min_samples_split"],
            n_classes=data["n_classes"],
        )
        if data["root"] is not None:
            tree.root = _Node.from_dict(data["root"])
        return tree
