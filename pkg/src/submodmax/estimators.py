"""Estimator-style wrappers: configure in the constructor, ``fit`` on an
objective and its constraints, read ``solution_``, ``value_`` and
``report_`` afterwards."""
from __future__ import annotations

from sklearn.base import BaseEstimator

from .base_search import BaseConstraint, exact_cardinality, swap_base_search, two_base_algorithm
from .knapsack import FracSearchConfig, knapsack_algorithm
from .search import SearchConfig, algorithm_a, partition_algorithm, symmetric_algorithm
from .validation import check_knapsacks, check_matroids, check_oracle, check_positive


class _Maximizer(BaseEstimator):
    def _search_config(self) -> SearchConfig:
        return SearchConfig(epsilon=check_positive("epsilon", self.epsilon),
                            scaling_exponent=self.scaling_exponent)

    def _store(self, report):
        self.report_ = report
        self.solution_ = report.solution
        self.value_ = report.value
        return self


class KMatroidMaximizer(_Maximizer):
    """Local search under the intersection of k matroids.

    ``symmetric=True`` runs a single pass, which suffices when
    ``f(S) = f(V - S)``.
    """

    def __init__(self, epsilon=0.05, scaling_exponent=4, symmetric=False):
        self.epsilon = epsilon
        self.scaling_exponent = scaling_exponent
        self.symmetric = symmetric

    def fit(self, f, matroids):
        f = check_oracle(f)
        ms = check_matroids(matroids, f.n)
        run = symmetric_algorithm if self.symmetric else algorithm_a
        return self._store(run(f, ms, self._search_config()))


class PartitionMatroidMaximizer(_Maximizer):
    def __init__(self, epsilon=0.05, p=None, monotone=False, scaling_exponent=4):
        self.epsilon = epsilon
        self.p = p
        self.monotone = monotone
        self.scaling_exponent = scaling_exponent

    def fit(self, f, matroids):
        f = check_oracle(f)
        ms = check_matroids(matroids, f.n, partition=True)
        rep = partition_algorithm(f, ms, self.epsilon, self.monotone, self._search_config(), p=self.p)
        return self._store(rep)


class BaseMaximizer(_Maximizer):
    """Maximize over bases of one matroid (``method`` is ``two_base`` or ``swap``)."""

    def __init__(self, epsilon=0.05, scaling_exponent=4, method="two_base"):
        self.epsilon = epsilon
        self.scaling_exponent = scaling_exponent
        self.method = method

    def fit(self, f, matroid):
        f = check_oracle(f)
        (m,) = check_matroids(matroid, f.n)
        if self.method not in ("two_base", "swap"):
            raise ValueError(f"unknown method {self.method!r}")
        run = two_base_algorithm if self.method == "two_base" else swap_base_search
        return self._store(run(f, BaseConstraint(m), self._search_config()))


class CardinalityMaximizer(_Maximizer):
    def __init__(self, c=1, epsilon=0.05, scaling_exponent=4):
        self.c = c
        self.epsilon = epsilon
        self.scaling_exponent = scaling_exponent

    def fit(self, f, constraints=None):
        f = check_oracle(f)
        return self._store(exact_cardinality(f, int(self.c), self._search_config()))


class KnapsackMaximizer(_Maximizer):
    def __init__(self, eta=0.1, zeta=None, trials=200, heavy_cap=4, c=None, delta_heavy=None,
                 eps_round=None, seed=0):
        self.eta = eta
        self.zeta = zeta
        self.trials = trials
        self.heavy_cap = heavy_cap
        self.c = c
        self.delta_heavy = delta_heavy
        self.eps_round = eps_round
        self.seed = seed

    def fit(self, f, knapsacks):
        f = check_oracle(f)
        ks = check_knapsacks(knapsacks, f.n)
        cfg = FracSearchConfig(zeta=self.zeta, eta=check_positive("eta", self.eta), trials=self.trials,
                               heavy_cap=self.heavy_cap, c=self.c, delta_heavy=self.delta_heavy,
                               eps_round=self.eps_round, seed=self.seed)
        return self._store(knapsack_algorithm(f, ks, cfg=cfg))
