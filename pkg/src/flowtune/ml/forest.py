"""Random forest: bagged decision trees with per-split feature subsampling.

Per-tree seeds are spawned deterministically from the master seed, so
training is a pure function of (data, hyperparameters, seed).
"""

from __future__ import annotations

from typing import List, Optional

import numpy as np

from ..errors import ValueOutOfRange
from ..model import NUM_CLASSES
from .tree import DecisionTree


class RandomForest:
    def __init__(
        self,
        n_trees: int = 50,
        max_depth: Optional[int] = None,
        min_samples_split: int = 2,
        features_per_split: int = 3,
        seed: int = 0,
        bootstrap: bool = True,
        n_classes: int = NUM_CLASSES,
    ) -> None:
        if n_trees < 1:
            raise ValueOutOfRange("n_trees must be >= 1")
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.features_per_split = features_per_split
        self.seed = seed
        self.bootstrap = bootstrap
        self.n_classes = n_classes
        self.trees: List[DecisionTree] = []

    def fit(self, X: np.ndarray, y: np.ndarray) -> "RandomForest":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=np.int64)
        if self.features_per_split > X.shape[1]:
            raise ValueOutOfRange("features_per_split exceeds feature count")
        self.trees = []
        children = np.random.SeedSequence(self.seed).spawn(self.n_trees)
        for child in children:
            rng = np.random.default_rng(child)
            if self.bootstrap:
                idx = rng.integers(0, len(X), len(X))
                Xb, yb = X[idx], y[idx]
            else:
                Xb, yb = X, y
            tree = DecisionTree(
                max_depth=self.max_depth,
                min_samples_split=self.min_samples_split,
                n_classes=self.n_classes,
            )
            tree.fit(Xb, yb, rng=rng, features_per_split=self.features_per_split)
            self.trees.append(tree)
        return self

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        """Mean of the per-tree probability vectors."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        total = np.zeros((len(X), self.n_classes))
        for tree in self.trees:
            total += tree.predict_proba(X)
        return total / len(self.trees)

    def predict(self, X: np.ndarray) -> np.ndarray:
        # First maximum wins: score ties go to the lower class number.
        return np.argmax(self.predict_proba(X), axis=1)

    def to_dict(self) -> dict:
        return {
            "n_trees": self.n_trees,
            "max_depth": self.max_depth,
            "min_samples_split": self.min_samples_split,
            "features_per_split": self.features_per_split,
            "seed": self.seed,
            "bootstrap": self.bootstrap,
            "n_classes": self.n_classes,
            "trees": [tree.to_dict() for tree in self.trees],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RandomForest":
        forest = cls(
            n_trees=data["n_trees"],
            max_depth=data["max_depth"],
            min_samples_split=data["min_samples_split"],
            features_per_split=data["features_per_split"],
            seed=data["seed"],
            bootstrap=data["bootstrap"],
            n_classes=data["n_classes"],
        )
        forest.trees = [DecisionTree.from_dict(t) for t in data["trees"]]
        return forest
