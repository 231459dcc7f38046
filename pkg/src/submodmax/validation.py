"""Input checks shared by the estimator front end."""
from __future__ import annotations

import numpy as np

from .errors import BadParams
from .ground import SubmodularOracle
from .knapsack import KnapsackSystem
from .matroid import Matroid, PartitionMatroid


def check_oracle(f) -> SubmodularOracle:
    if not isinstance(f, SubmodularOracle):
        raise TypeError(f"expected a SubmodularOracle, got {type(f).__name__}")
    return f


def check_matroids(matroids, n: int, partition: bool = False) -> list:
    if isinstance(matroids, Matroid):
        matroids = [matroids]
    matroids = list(matroids)
    if not matroids:
        raise BadParams("need at least one matroid")
    for m in matroids:
        if not isinstance(m, Matroid):
            raise TypeError(f"expected matroids, got {type(m).__name__}")
        if m.n != n:
            raise BadParams(f"matroid over {m.n} elements does not match n={n}")
        if partition and not isinstance(m, PartitionMatroid):
            raise BadParams("partition matroids required")
    return matroids


def check_knapsacks(ks, n: int) -> KnapsackSystem:
    if not isinstance(ks, KnapsackSystem):
        ks = KnapsackSystem(np.asarray(ks, dtype=float))
    if ks.n != n:
        raise BadParams(f"knapsack system over {ks.n} elements does not match n={n}")
    return ks


def check_positive(name: str, value) -> float:
    value = float(value)
    if not value > 0:
        raise BadParams(f"{name} must be positive, got {value}")
    return value
