"""Native classifiers (decision tree, KNN, random forest), the feature
pipeline, and the evaluation metrics (accuracy/F1/MSE/precision, ROC/AUC)."""

from .features import (
    FEATURE_NAMES,
    Normalizer,
    featurize,
    featurize_rows,
    labels_of,
    train_test_split,
)
from .tree import DecisionTree
from .knn import KnnClassifier
from .forest import RandomForest
from .metrics import EvalReport, RocCurve, evaluate, roc
from .serialize import load_model, save_model, model_to_dict, model_from_dict

__all__ = [
    "FEATURE_NAMES",
    "Normalizer",
    "featurize",
    "featurize_rows",
    "labels_of",
    "train_test_split",
    "DecisionTree",
    "KnnClassifier",
    "RandomForest",
    "EvalReport",
    "RocCurve",
    "evaluate",
    "roc",
    "save_model",
    "load_model",
    "model_to_dict",
    "model_from_dict",
]
