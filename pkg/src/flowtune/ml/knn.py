"""K-nearest-neighbors classifier on min-max-normalized features.

Distance ties resolve to the lower training-row index (stable sort) and
vote ties to the lower class number.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from ..errors import ValueOutOfRange
from ..model import NUM_CLASSES
from .features import Normalizer

_CHUNK = 64  # query rows per distance batch; bounds peak memory


class KnnClassifier:
    def __init__(self, k: int = 5, n_classes: int = NUM_CLASSES) -> None:
        if k < 1:
            raise ValueOutOfRange("k must be >= 1")
        self.k = k
        self.n_classes = n_classes
        self.normalizer: Optional[Normalizer] = None
        self.X: Optional[np.ndarray] = None
        self.y: Optional[np.ndarray] = None

    def fit(self, X: np.ndarray, y: np.ndarray) -> "KnnClassifier":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=np.int64)
        if len(X) == 0:
            raise ValueOutOfRange("training set must be non-empty")
        if self.k > len(X):
            raise ValueOutOfRange(f"k={self.k} exceeds training size {len(X)}")
        self.normalizer = Normalizer().fit(X)
        self.X = self.normalizer.transform(X)
        self.y = y
        return self

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        """Neighbor-vote fractions per class for each query row."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        Q = self.normalizer.transform(X)
        out = np.empty((len(Q), self.n_classes))
        for start in range(0, len(Q), _CHUNK):
            block = Q[start : start + _CHUNK]
            # (chunk, n) squared Euclidean distances to every training row.
            d2 = ((block[:, None, :] - self.X[None, :, :]) ** 2).sum(axis=2)
            # Stable sort: equal distances keep training-row order.
            nearest = np.argsort(d2, axis=1, kind="stable")[:, : self.k]
            for i, neighbors in enumerate(nearest):
                votes = np.bincount(self.y[neighbors], minlength=self.n_classes)
                out[start + i] = votes / self.k
        return out

    def predict(self, X: np.ndarray) -> np.ndarray:
        # First maximum wins: vote ties go to the lower class number.
        return np.argmax(self.predict_proba(X), axis=1)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "n_classes": self.n_classes,
            "normalizer": self.normalizer.to_dict(),
            "X": self.X.tolist(),
            "y": self.y.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "KnnClassifier":
        model = cls(k=data["k"], n_classes=data["n_classes"])
        model.normalizer = Normalizer.from_dict(data["normalizer"])
        model.X = np.array(data["X"])
        model.y = np.array(data["y"], dtype=np.int64)
        return model
