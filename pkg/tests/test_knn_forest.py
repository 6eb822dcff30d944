import numpy as np
import pytest

from flowtune.errors import ValueOutOfRange
from flowtune.ml import DecisionTree, KnnClassifier, Normalizer, RandomForest


def knn_oracle_predict(model, queries):
    """Brute-force full-distance-scan KNN, re-deriving every step per query:
    direct squared distances, lexsort on (index, distance), explicit voting."""
    Q = model.normalizer.transform(np.atleast_2d(queries))
    n = len(model.X)
    out = []
    for q in Q:
        d = np.sqrt(((model.X - q) ** 2).sum(axis=1))
        order = np.lexsort((np.arange(n), d))[: model.k]
        votes = {}
        for idx in order:
            votes[int(model.y[idx])] = votes.get(int(model.y[idx]), 0) + 1
        best = max(votes.items(), key=lambda kv: (kv[1], -kv[0]))
        out.append(best[0])
    return np.array(out)


class TestKnn:
    def test_k1_exact_training_point(self):
        X = np.array([[0.0, 0.0], [5.0, 5.0], [9.0, 1.0]])
        y = np.array([2, 4, 0])
        model = KnnClassifier(k=1).fit(X, y)
        assert model.predict([[5.0, 5.0]])[0] == 4

    def test_plurality_vote_fraction(self):
        X = np.array([[0.0], [0.1], [0.2], [50.0]])
        y = np.array([1, 1, 3, 5])
        model = KnnClassifier(k=3).fit(X, y)
        proba = model.predict_proba([[0.0]])[0]
        assert model.predict([[0.0]])[0] == 1
        assert proba[1] == pytest.approx(2 / 3)
        assert proba[3] == pytest.approx(1 / 3)

    def test_vote_tie_lower_class_wins(self):
        X = np.array([[0.0], [1.0], [100.0]])
        y = np.array([4, 1, 5])
        model = KnnClassifier(k=2).fit(X, y)
        # Neighbors are classes {4, 1}: tie, class 1 wins.
        assert model.predict([[0.5]])[0] == 1

    def test_distance_tie_lower_row_index(self):
        X = np.array([[0.0], [2.0], [2.0]])
        y = np.array([5, 3, 1])
        model = KnnClassifier(k=2).fit(X, y)
        # Query at 2.0: rows 1 and 2 are both at distance 0; with k=2 both
        # vote -> class tie -> class 1. With k=1, row 1 (lower index) wins.
        assert KnnClassifier(k=1).fit(X, y).predict([[2.0]])[0] == 3

    def test_k_bounds(self):
        with pytest.raises(ValueOutOfRange):
            KnnClassifier(k=0)
        with pytest.raises(ValueOutOfRange):
            KnnClassifier(k=5).fit(np.zeros((3, 1)), np.zeros(3, dtype=int))

    def test_oracle_equivalence_small(self):
        rng = np.random.default_rng(0)
        X = rng.uniform(size=(300, 10))
        y = rng.integers(0, 6, 300)
        model = KnnClassifier(k=5).fit(X, y)
        queries = rng.uniform(size=(100, 10))
        assert np.array_equal(model.predict(queries), knn_oracle_predict(model, queries))


class TestNormalizer:
    def test_maps_training_to_unit_interval(self):
        rng = np.random.default_rng(1)
        X = rng.normal(size=(50, 4)) * 100
        norm = Normalizer().fit(X)
        Z = norm.transform(X)
        assert Z.min() >= 0.0 and Z.max() <= 1.0

    def test_degenerate_feature_maps_to_zero(self):
        X = np.array([[1.0, 5.0], [1.0, 6.0]])
        Z = Normalizer().fit(X).transform(X)
        assert (Z[:, 0] == 0.0).all()


class TestForest:
    def test_degenerate_forest_equals_tree(self):
        rng = np.random.default_rng(7)
        X = rng.normal(size=(400, 10))
        y = rng.integers(0, 6, 400)
        queries = rng.normal(size=(200, 10))
        forest = RandomForest(n_trees=1, max_depth=5, features_per_split=10,
                              seed=0, bootstrap=False).fit(X, y)
        tree = DecisionTree(max_depth=5).fit(X, y)
        assert np.array_equal(forest.predict(queries), tree.predict(queries))

    def test_same_seed_identical_forests(self):
        rng = np.random.default_rng(8)
        X = rng.normal(size=(200, 6))
        y = rng.integers(0, 4, 200)
        a = RandomForest(n_trees=5, seed=3, features_per_split=3).fit(X, y)
        b = RandomForest(n_trees=5, seed=3, features_per_split=3).fit(X, y)
        assert [t.to_dict() for t in a.trees] == [t.to_dict() for t in b.trees]

    def test_n_trees_zero_rejected(self):
        with pytest.raises(ValueOutOfRange):
            RandomForest(n_trees=0)

    def test_unanimous_trees(self):
        X = np.array([[0.0], [1.0]])
        y = np.array([3, 3])
        forest = RandomForest(n_trees=4, seed=0, features_per_split=1).fit(X, y)
        proba = forest.predict_proba([[0.5]])[0]
        assert proba[3] == 1.0
        assert forest.predict([[0.5]])[0] == 3

    def test_two_tree_averaging_and_tie_break(self):
        # Build a forest by hand from two pure stumps voting A and B.
        forest = RandomForest(n_trees=2, seed=0)
        t1 = DecisionTree().fit(np.array([[0.0]]), np.array([0]))
        t2 = DecisionTree().fit(np.array([[0.0]]), np.array([1]))
        forest.trees = [t1, t2]
        proba = forest.predict_proba([[0.0]])[0]
        assert proba[0] == 0.5 and proba[1] == 0.5
        assert forest.predict([[0.0]])[0] == 0  # tie -> lower class number

    def test_scores_sum_to_one(self):
        rng = np.random.default_rng(9)
        X = rng.normal(size=(300, 10))
        y = rng.integers(0, 6, 300)
        forest = RandomForest(n_trees=10, seed=1).fit(X, y)
        sums = forest.predict_proba(rng.normal(size=(40, 10))).sum(axis=1)
        assert np.allclose(sums, 1.0, atol=1e-9)

    def test_features_per_split_bound(self):
        with pytest.raises(ValueOutOfRange):
            RandomForest(n_trees=1, features_per_split=11).fit(
                np.zeros((4, 10)), np.array([0, 0, 1, 1])
            )
