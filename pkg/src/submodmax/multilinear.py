"""Multilinear extension ``F(y) = E[f(R)]`` where ``R`` contains each ``i``
independently with probability ``y_i``."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ._rng import uniform_rows
from .errors import BadGrid, TooLarge, TooManyFractional
from .ground import SubmodularOracle

EXACT_MAX_FRACTIONAL = 24
LIFT_MAX_COPIES = 20
GRID_TOL = 1e-9


@dataclass
class FractionalPoint:
    coords: np.ndarray
    zeta: Optional[float] = None
    upper: Optional[np.ndarray] = None

    def __post_init__(self):
        self.coords = np.asarray(self.coords, dtype=float)
        if self.coords.ndim != 1:
            raise ValueError("coords must be a vector")
        if ((self.coords < -GRID_TOL) | (self.coords > 1 + GRID_TOL)).any():
            raise ValueError("coords must lie in [0, 1]")
        if self.upper is not None:
            self.upper = np.asarray(self.upper, dtype=float)
            if (self.coords > self.upper + GRID_TOL).any() or (self.upper > 1 + GRID_TOL).any():
                raise ValueError("coords exceed their upper bounds")
        if self.zeta is not None:
            steps = self.coords / self.zeta
            if (np.abs(steps - np.round(steps)) > 1e-6).any():
                raise BadGrid("coords are not multiples of zeta")

    @classmethod
    def indicator(cls, n: int, s) -> "FractionalPoint":
        y = np.zeros(n)
        y[list(s)] = 1.0
        return cls(y)

    def __len__(self):
        return len(self.coords)


def _coords(y) -> np.ndarray:
    return y.coords if isinstance(y, FractionalPoint) else np.asarray(y, dtype=float)


def gray_masks(positions: Sequence[int], base: int) -> np.ndarray:
    """Masks ``base | subset`` over ``positions``, listed so that entry ``idx``
    holds the subset whose bit j is bit j of ``idx``.  Generated by
    Gray-code walk: one bit flip per step."""
    m = len(positions)
    out = np.empty(1 << m, dtype=np.int64)
    mask = base
    out[0] = mask
    g_prev = 0
    for step in range(1, 1 << m):
        g = step ^ (step >> 1)
        j = (g ^ g_prev).bit_length() - 1
        mask ^= 1 << positions[j]
        out[g] = mask
        g_prev = g
    return out


def subset_probabilities(probs: Sequence[float]) -> np.ndarray:
    """Entry ``idx``: probability that exactly the coordinates set in ``idx``
    are drawn."""
    p = np.ones(1)
    for q in probs:
        p = np.concatenate([p * (1.0 - q), p * q])
    return p


def eval_exact(f: SubmodularOracle, y) -> float:
    """Exact ``F(y)`` by summing over subsets of the fractional coordinates."""
    y = _coords(y)
    frac = [i for i in range(len(y)) if 0.0 < y[i] < 1.0]
    if len(frac) > EXACT_MAX_FRACTIONAL:
        raise TooManyFractional(f"{len(frac)} fractional coordinates exceed cap {EXACT_MAX_FRACTIONAL}")
    ones = 0
    for i in range(len(y)):
        if y[i] >= 1.0:
            ones |= 1 << i
    if not frac:
        return f.evaluate_mask(ones)
    masks = gray_masks(frac, ones)
    vals = np.fromiter((f.evaluate_mask(int(m)) for m in masks), dtype=float, count=len(masks))
    return float(vals @ subset_probabilities(y[frac]))


def subset_masks(positions: Sequence[int], base: int) -> np.ndarray:
    """Same ordering as :func:`gray_masks`, built in one vectorized pass."""
    idx = np.arange(1 << len(positions), dtype=np.int64)
    out = np.full(idx.shape, base, dtype=np.int64)
    for j, pos in enumerate(positions):
        out |= ((idx >> j) & 1) << pos
    return out


def eval_table(table: np.ndarray, y) -> float:
    """``F(y)`` from a full value table; bypasses oracle counting."""
    y = _coords(y)
    frac = np.nonzero((y > 0.0) & (y < 1.0))[0]
    ones = int(np.sum(np.left_shift(1, np.nonzero(y >= 1.0)[0]))) if (y >= 1.0).any() else 0
    if len(frac) == 0:
        return float(table[ones])
    return float(table[subset_masks(frac.tolist(), ones)] @ subset_probabilities(y[frac]))


def eval_mc(f: SubmodularOracle, y, samples: int, seed: int, start: int = 0) -> tuple:
    """Monte Carlo ``F(y)``: mean and standard error over ``samples`` draws.

    Draw ``i`` depends only on ``(seed, start + i)``.
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    y = _coords(y)
    n = len(y)
    u = uniform_rows(seed, start, samples, n)
    weights = np.left_shift(np.int64(1), np.arange(n, dtype=np.int64))
    masks = (u < y).astype(np.int64) @ weights
    vals = np.fromiter((f.evaluate_mask(int(m)) for m in masks), dtype=float, count=samples)
    est = float(vals.mean())
    err = float(vals.std(ddof=1) / np.sqrt(samples)) if samples > 1 else 0.0
    return est, err


def partial_derivative(f: SubmodularOracle, y, i: int) -> float:
    """``dF/dy_i = F(y | y_i = 1) - F(y | y_i = 0)``."""
    y = _coords(y).copy()
    y[i] = 1.0
    hi = eval_exact(f, y)
    y[i] = 0.0
    return hi - eval_exact(f, y)


class Evaluator:
    """Exact ``F`` up to ``exact_max`` fractional coordinates, Monte Carlo
    beyond.  ``last_mode`` records which path produced the last value."""

    def __init__(self, exact_max: int = 18, samples: int = 20000, seed: int = 0):
        self.exact_max = exact_max
        self.samples = samples
        self.seed = seed
        self.last_mode = None
        self.modes_used: set = set()

    def __call__(self, f: SubmodularOracle, y) -> float:
        c = _coords(y)
        frac = int(((c > 0) & (c < 1)).sum())
        if frac <= self.exact_max:
            self.last_mode = "exact"
            val = eval_exact(f, c)
        else:
            self.last_mode = "mc"
            val = eval_mc(f, c, self.samples, self.seed)[0]
        self.modes_used.add(self.last_mode)
        return val


class ScaledOracle(SubmodularOracle):
    """``g(T) = F(|T_1| / s_1, ..., |T_n| / s_n)`` on a ground set holding
    ``s_i`` copies of element ``i`` (copies of ``i`` are contiguous ids)."""

    def __init__(self, base: SubmodularOracle, multiplicities: Sequence[int]):
        mult = [int(s) for s in multiplicities]
        if len(mult) != base.n or any(s < 1 for s in mult):
            raise ValueError("need one positive multiplicity per element")
        total = sum(mult)
        if total > LIFT_MAX_COPIES:
            raise TooLarge(f"lift with {total} copies exceeds cap {LIFT_MAX_COPIES}")
        offsets = np.concatenate([[0], np.cumsum(mult)[:-1]]).astype(int)
        self.base = base
        self.multiplicities = mult
        self.offsets = [int(o) for o in offsets]

        def fn(mask):
            return eval_exact(base, self.point_of(mask))

        super().__init__(total, "scaled", {"base": base, "multiplicities": mult}, fn)

    def copies(self, i: int) -> list:
        return list(range(self.offsets[i], self.offsets[i] + self.multiplicities[i]))

    def point_of(self, mask: int) -> np.ndarray:
        y = np.empty(self.base.n)
        for i, (o, s) in enumerate(zip(self.offsets, self.multiplicities)):
            y[i] = bin((mask >> o) & ((1 << s) - 1)).count("1") / s
        return y


def lift_scaled(f: SubmodularOracle, multiplicities: Sequence[int]) -> ScaledOracle:
    return ScaledOracle(f, multiplicities)
