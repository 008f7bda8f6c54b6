import numpy as np

from csfml.ensembles.boosting import BAGGING, TreeEnsemble
from csfml.ensembles.cart import TreeConfig, fit_cart
from csfml.utils.parallel import run_jobs


def bootstrap_rows(n, seed_seq):
    rng = np.random.default_rng(seed_seq)
    return np.sort(rng.integers(0, n, size=n))


def _fit_bag(X, y, seed_seq, config, n_classes):
    rows = bootstrap_rows(y.shape[0], seed_seq)
    return fit_cart(X[rows], y[rows], None, config, n_classes), rows


def bagging_fit(X, y, T=30, config=None, seed=0, n_classes=None, num_cpu=1, logger=None, round_seeds=None):
    """
    T unpruned CART trees, each on its own bootstrap resample of the rows.

    :param seed:        root seed; round seeds are spawned from SeedSequence(seed)
    :param num_cpu:     workers for fitting rounds in parallel (results do not depend on it)
    :param round_seeds: explicit per-round seeds (overrides `seed`)
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    n_classes = int(y.max()) + 1 if n_classes is None else n_classes
    config = TreeConfig() if config is None else config
    if round_seeds is None:
        round_seeds = np.random.SeedSequence(seed).spawn(T)
    assert len(round_seeds) == T

    jobs = [dict(X=X, y=y, seed_seq=s, config=config, n_classes=n_classes) for s in round_seeds]
    results = run_jobs(_fit_bag, jobs, num_cpu=num_cpu)

    members = tuple(tree for tree, _ in results)
    samples = tuple(rows for _, rows in results)
    if logger is not None:
        for t, rows in enumerate(samples):
            logger.log_kv('bag', t)
            logger.log_kv('oob_fraction', oob_fraction(rows, y.shape[0]))
    return TreeEnsemble(members=members, weights=np.ones(T), method=BAGGING, n_classes=n_classes,
                        sample_indices=samples)


def oob_fraction(rows, n):
    """Fraction of the n training rows absent from a bootstrap sample."""
    in_bag = np.zeros(n, dtype=bool)
    in_bag[rows] = True
    return float(1.0 - in_bag.mean())
