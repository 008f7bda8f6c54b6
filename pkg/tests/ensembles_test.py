import math

import numpy as np
import pytest

from csfml.ensembles.bagging import bagging_fit, bootstrap_rows, oob_fraction
from csfml.ensembles.boosting import (ADABOOST, BAGGING, PERFECT_ALPHA, TreeEnsemble, adaboost_fit,
                                      ensemble_score, rusboost_fit, samme_alpha)
from csfml.ensembles.cart import LEAF, TreeConfig, best_split, fit_cart, gini_impurity
from csfml.utils.errors import EnsembleError
from csfml.utils.logger import DataLog

STUMP = TreeConfig(max_depth=1)


def noisy_blobs(n, seed, flip=0.25):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, 2))
    y = (X[:, 0] + X[:, 1] > 0).astype(int)
    flipped = rng.uniform(size=n) < flip
    y[flipped] = 1 - y[flipped]
    return X, y


def same_structure(a, b):
    return (np.array_equal(a.feature, b.feature) and np.allclose(a.threshold, b.threshold) and
            np.array_equal(a.left, b.left) and np.array_equal(a.right, b.right) and
            np.allclose(a.value, b.value))


# ===============================================================================
# CART
# ===============================================================================

def test_pure_labels_give_a_single_leaf():
    tree = fit_cart(np.random.default_rng(0).normal(size=(10, 3)), np.zeros(10, dtype=int), n_classes=2)
    assert tree.n_nodes == 1
    assert tree.feature[0] == LEAF
    assert tree.value[0] == pytest.approx([1.0, 0.0])


def test_one_dimensional_split():
    X = np.array([[0.0], [1.0], [5.0], [6.0]])
    y = np.array([0, 0, 1, 1])
    tree = fit_cart(X, y)
    assert tree.n_nodes == 3
    assert 1.0 < tree.threshold[0] < 5.0
    assert list(tree.predict(X)) == [0, 0, 1, 1]
    # rows equal to the threshold go right
    assert tree.predict([[tree.threshold[0]]])[0] == 1


def test_scaled_weights_give_the_same_tree():
    X, y = noisy_blobs(60, seed=1)
    w = np.random.default_rng(1).uniform(0.5, 2.0, size=60)
    assert same_structure(fit_cart(X, y, w), fit_cart(X, y, 2.0 * w))


def test_unlimited_depth_memorizes_distinct_rows():
    rng = np.random.default_rng(2)
    X = rng.normal(size=(80, 4))
    y = rng.integers(0, 3, size=80)
    tree = fit_cart(X, y, n_classes=3)
    assert np.array_equal(tree.predict(X), y)


def test_depth_limit_and_leaf_distributions():
    X, y = noisy_blobs(200, seed=3)
    tree = fit_cart(X, y, config=TreeConfig(max_depth=3, min_leaf=5))
    assert tree.depth <= 3
    assert np.allclose(tree.value.sum(axis=1), 1.0)
    leaf_sizes = np.bincount(tree.apply(X), minlength=tree.n_nodes)[tree.is_leaf]
    assert leaf_sizes.min() >= 5


def test_split_ties_prefer_the_lower_feature():
    X = np.array([[0.0, 0.0], [1.0, 1.0], [5.0, 5.0], [6.0, 6.0]])
    onehot = np.array([[1.0, 0], [1, 0], [0, 1], [0, 1]])
    feature, threshold, impurity = best_split(X, onehot, min_leaf=1)
    assert feature == 0 and threshold == 3.0 and impurity == 0.0


def test_gini():
    assert gini_impurity([[2.0, 2.0]])[0] == pytest.approx(2.0)
    assert gini_impurity([[4.0, 0.0]])[0] == 0.0
    assert gini_impurity([[0.0, 0.0]])[0] == 0.0


def test_row_order_does_not_change_the_tree():
    X, y = noisy_blobs(50, seed=4)
    order = np.random.default_rng(4).permutation(50)
    a = fit_cart(X, y)
    b = fit_cart(X[order], y[order])
    queries = np.random.default_rng(5).normal(size=(100, 2))
    assert np.array_equal(a.predict_proba(queries), b.predict_proba(queries))


# ===============================================================================
# AdaBoost
# ===============================================================================

def test_first_round_by_hand():
    X = np.array([[0.0], [1.0], [2.0], [3.0]])
    y = np.array([0, 0, 1, 0])
    ensemble = adaboost_fit(X, y, T=1, config=STUMP, keep_weights=True)
    assert ensemble.epsilons[0] == pytest.approx(0.25)
    assert ensemble.weights[0] == pytest.approx(math.log(3.0))
    # the misclassified row's weight triples before normalizing
    assert ensemble.weight_history[0] == pytest.approx([1 / 6, 1 / 6, 1 / 2, 1 / 6])


def test_samme_alpha():
    assert samme_alpha(0.25, 2) == pytest.approx(math.log(3.0))
    assert samme_alpha(0.5, 3) == pytest.approx(math.log(2.0))
    assert samme_alpha(0.0, 2) == PERFECT_ALPHA


def test_training_error_bound():
    rng = np.random.default_rng(6)
    for _ in range(200):
        X = rng.normal(size=(31, 2))
        y = (X[:, 0] + rng.normal(scale=1.0, size=31) > 0).astype(int)
        if y.min() == y.max():
            continue
        ensemble = adaboost_fit(X, y, T=10, config=STUMP, keep_weights=True)
        error = np.mean(ensemble.predict(X) != y)
        eps = ensemble.epsilons
        bound = np.prod(2.0 * np.sqrt(eps * (1.0 - eps)))
        assert error <= bound + 1e-12
        for w in ensemble.weight_history:
            assert w.sum() == pytest.approx(1.0)
            assert np.all(w > 0)


def test_single_round_equals_its_tree():
    X, y = noisy_blobs(80, seed=7)
    ensemble = adaboost_fit(X, y, T=1)
    tree = fit_cart(X, y, config=TreeConfig(max_depth=3))
    queries = np.random.default_rng(7).normal(size=(50, 2))
    assert np.array_equal(ensemble.predict(queries), tree.predict(queries))


def test_perfect_round_stops_boosting():
    X = np.array([[0.0], [1.0], [2.0], [5.0], [6.0], [7.0]])
    y = np.array([0, 0, 0, 1, 1, 1])
    ensemble = adaboost_fit(X, y, T=30, config=STUMP)
    assert ensemble.rounds == 1
    assert ensemble.weights[0] == PERFECT_ALPHA
    assert np.array_equal(ensemble.predict(X), y)


def test_first_round_at_chance_fails():
    # identical rows with opposite labels: no split helps
    X = np.zeros((4, 1))
    y = np.array([0, 1, 0, 1])
    with pytest.raises(EnsembleError):
        adaboost_fit(X, y, T=5, config=STUMP)


def test_boosting_logs_rounds():
    X, y = noisy_blobs(60, seed=8)
    logger = DataLog()
    ensemble = adaboost_fit(X, y, T=4, logger=logger)
    assert logger.log['round'] == list(range(ensemble.rounds))
    assert np.allclose(logger.log['alpha'], ensemble.weights)


# ===============================================================================
# Ensemble scores
# ===============================================================================

def constant_tree(label):
    return fit_cart(np.zeros((2, 1)), np.array([label, label]), n_classes=2)


def test_ensemble_score_is_a_softmax_of_votes():
    ensemble = TreeEnsemble(members=(constant_tree(0), constant_tree(1)), weights=np.array([1.0, 3.0]),
                            method=ADABOOST, n_classes=2)
    expected = np.exp([1.0, 3.0]) / np.exp([1.0, 3.0]).sum()
    assert ensemble_score(ensemble, [[0.0]])[0] == pytest.approx(expected)

    ensemble = TreeEnsemble(members=(constant_tree(0), constant_tree(1)), weights=np.array([2.0, 2.0]),
                            method=ADABOOST, n_classes=2)
    assert ensemble_score(ensemble, [[0.0]])[0] == pytest.approx([0.5, 0.5])


def test_single_bag_scores_its_leaf_distribution():
    X, y = noisy_blobs(40, seed=9)
    ensemble = bagging_fit(X, y, T=1, config=TreeConfig(max_depth=2), seed=3)
    queries = np.random.default_rng(9).normal(size=(20, 2))
    assert np.allclose(ensemble_score(ensemble, queries), ensemble.members[0].predict_proba(queries))


# ===============================================================================
# Bagging
# ===============================================================================

def test_bootstrap_leaves_out_a_third():
    fractions = [oob_fraction(bootstrap_rows(500, s), 500) for s in np.random.SeedSequence(0).spawn(200)]
    assert np.mean(fractions) == pytest.approx(math.exp(-1.0), abs=0.02)


def test_identical_round_seeds_repeat_one_tree():
    X, y = noisy_blobs(50, seed=10)
    seed_seq = np.random.SeedSequence(5)
    ensemble = bagging_fit(X, y, T=4, round_seeds=[seed_seq] * 4)
    for tree in ensemble.members[1:]:
        assert same_structure(tree, ensemble.members[0])
    queries = np.random.default_rng(10).normal(size=(30, 2))
    assert np.array_equal(ensemble.predict(queries), ensemble.members[0].predict(queries))


def test_bagging_is_seeded_and_parallel_safe():
    X, y = noisy_blobs(60, seed=11)
    queries = np.random.default_rng(11).normal(size=(40, 2))
    serial = bagging_fit(X, y, T=6, seed=2)
    again = bagging_fit(X, y, T=6, seed=2)
    parallel = bagging_fit(X, y, T=6, seed=2, num_cpu=2)
    assert np.array_equal(serial.predict_proba(queries), again.predict_proba(queries))
    assert np.array_equal(serial.predict_proba(queries), parallel.predict_proba(queries))
    assert serial.method == BAGGING


def test_more_bags_agree_more():
    X, y = noisy_blobs(60, seed=12)
    queries = np.random.default_rng(12).normal(size=(200, 2))

    def disagreement(T):
        rates = []
        for pair in range(5):
            a = bagging_fit(X, y, T=T, seed=2 * pair).predict(queries)
            b = bagging_fit(X, y, T=T, seed=2 * pair + 1).predict(queries)
            rates.append(np.mean(a != b))
        return np.mean(rates)

    assert disagreement(25) < disagreement(1)


def test_bagging_logs_out_of_bag_fractions():
    X, y = noisy_blobs(40, seed=13)
    logger = DataLog()
    ensemble = bagging_fit(X, y, T=3, seed=0, logger=logger)
    assert logger.log['bag'] == [0, 1, 2]
    assert logger.log['oob_fraction'] == [oob_fraction(rows, 40) for rows in ensemble.sample_indices]


# ===============================================================================
# RUSBoost
# ===============================================================================

def imbalanced(seed, n_major=90, n_minor=10):
    rng = np.random.default_rng(seed)
    X = np.concatenate([rng.uniform(0, 10, size=n_major), rng.uniform(12, 15, size=n_minor)])[:, None]
    y = np.repeat([0, 1], [n_major, n_minor])
    return X, y


def test_rusboost_rounds_see_balanced_subsets():
    X, y = imbalanced(0)
    X = X + np.random.default_rng(0).normal(scale=3.0, size=X.shape)
    ensemble = rusboost_fit(X, y, T=8, seed=4)
    assert len(ensemble.sample_indices) == ensemble.rounds
    for rows in ensemble.sample_indices:
        assert list(np.bincount(y[rows], minlength=2)) == [10, 10]
        assert np.unique(rows).size == rows.size


def test_rusboost_on_balanced_data_matches_adaboost_first_round():
    X, y = noisy_blobs(60, seed=14)
    m = np.bincount(y).min()
    keep = np.sort(np.concatenate([np.flatnonzero(y == c)[:m] for c in (0, 1)]))
    X, y = X[keep], y[keep]
    rus = rusboost_fit(X, y, T=1, seed=1)
    ada = adaboost_fit(X, y, T=1)
    assert rus.epsilons[0] == pytest.approx(ada.epsilons[0])


def test_rusboost_keeps_minority_recall():
    for seed in range(5):
        X, y = imbalanced(seed)
        rus = rusboost_fit(X, y, T=10, config=STUMP, seed=seed)
        ada = adaboost_fit(X, y, T=10, config=STUMP)
        minority = y == 1
        assert np.mean(rus.predict(X)[minority] == 1) >= np.mean(ada.predict(X)[minority] == 1)


def test_rusboost_needs_every_class():
    X, y = imbalanced(0)
    with pytest.raises(EnsembleError):
        rusboost_fit(X, y, T=3, n_classes=3)
