"""Walkthrough: training the three classifiers on the synthetic IoT trace.

Generates the labeled six-class trace (2000 packets per class, seed 42),
does a stratified 80/20 split, trains the decision tree, KNN, and random
forest, and prints a comparison table plus per-class one-vs-rest AUCs for
the decision tree.

Run with:  python3 demos/iot_classification_demo.py
"""

from flowtune.ml import (
    DecisionTree,
    KnnClassifier,
    RandomForest,
    evaluate,
    featurize_rows,
    labels_of,
    roc,
    train_test_split,
)
from flowtune.model import NUM_CLASSES, ClassLabel
from flowtune.traffic import DEFAULT_IOT_PROFILES, gen_synthetic_iot_trace


def main():
    rows = gen_synthetic_iot_trace(DEFAULT_IOT_PROFILES, 2000, seed=42)
    X = featurize_rows(rows)
    y = labels_of(rows)
    X_train, y_train, X_test, y_test = train_test_split(X, y, 0.8, seed=42)
    print(f"trace: {len(rows)} packets, {len(X_train)} train / {len(X_test)} test")
    print()

    models = {
        "dt": DecisionTree(),
        "knn": KnnClassifier(k=5),
        "rf": RandomForest(n_trees=50, features_per_split=3, seed=42),
    }
    print("model,accuracy,f1_score,mse,precision")
    for name, model in models.items():
        model.fit(X_train, y_train)
        report = evaluate(model.predict(X_test), y_test)
        print(report.table_row(name))

    print()
    print("decision-tree one-vs-rest AUC per class:")
    scores = models["dt"].predict_proba(X_test)
    for class_no in range(NUM_CLASSES):
        curve = roc(scores[:, class_no], y_test, class_no)
        print(f"  {ClassLabel(class_no).display_name:<16} {curve.auc:.3f}")


if __name__ == "__main__":
    main()
