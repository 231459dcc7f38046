"""Knapsack-constrained maximization: grid local search on the multilinear
extension, heavy/light split, heavy enumeration and randomized rounding."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._rng import uniform_rows
from .errors import BadGrid, BadParams
from .ground import SubmodularOracle, from_mask, sorted_tuple
from .multilinear import Evaluator, FractionalPoint, eval_exact
from .search import SolutionReport

LOAD_TOL = 1e-9


class KnapsackSystem:
    """``k`` knapsacks over ``n`` elements, scaled so every capacity is 1."""

    def __init__(self, weights):
        W = np.atleast_2d(np.asarray(weights, dtype=float))
        if (W < 0).any():
            raise BadParams("knapsack weights must be non-negative")
        if (W > 1 + LOAD_TOL).any():
            s, i = np.argwhere(W > 1 + LOAD_TOL)[0]
            raise BadParams(f"element {i} alone overflows knapsack {s}; drop it first")
        self.weights = W

    @classmethod
    def from_capacities(cls, weights, capacities) -> "KnapsackSystem":
        W = np.atleast_2d(np.asarray(weights, dtype=float))
        caps = np.asarray(capacities, dtype=float).reshape(-1, 1)
        if (caps <= 0).any():
            raise BadParams("capacities must be positive")
        return cls(W / caps)

    @property
    def k(self) -> int:
        return self.weights.shape[0]

    @property
    def n(self) -> int:
        return self.weights.shape[1]

    def load(self, s) -> np.ndarray:
        idx = sorted(s)
        return self.weights[:, idx].sum(axis=1) if idx else np.zeros(self.k)

    def is_feasible(self, s) -> bool:
        return bool((self.load(s) <= 1 + LOAD_TOL).all())

    def point_load(self, y) -> np.ndarray:
        return self.weights @ np.asarray(y, dtype=float)

    def point_feasible(self, y) -> bool:
        return bool((self.point_load(y) <= 1 + LOAD_TOL).all())

    def to_dict(self) -> dict:
        return {"weights": self.weights.tolist()}

    def __repr__(self):
        return f"KnapsackSystem(k={self.k}, n={self.n})"


@dataclass
class FracSearchConfig:
    zeta: Optional[float] = None
    faithful: bool = False
    epsilon: Optional[float] = None
    delta_outer: float = 0.1
    eta: float = 0.1
    c: Optional[float] = None
    delta_heavy: Optional[float] = None
    eps_round: Optional[float] = None
    trials: int = 200
    heavy_cap: int = 4
    seed: int = 0
    grid_mode: str = "auto"
    full_grid_budget: int = 500_000
    exact_max: int = 18
    mc_samples: int = 20000
    move_cap: Optional[int] = None

    def __post_init__(self):
        if self.epsilon is not None and not self.epsilon > 0:
            raise BadParams("epsilon must be positive")
        if not self.eta > 0:
            raise BadParams("eta must be positive")
        if self.trials < 1:
            raise BadParams("trials must be at least 1")
        if self.grid_mode not in ("auto", "full", "menu"):
            raise BadParams(f"unknown grid mode {self.grid_mode!r}")

    def resolve_zeta(self, n: int) -> float:
        if self.zeta is not None:
            z = self.zeta
        elif self.faithful:
            if n > 4:
                raise BadParams("the faithful grid 1/(8n^4) is only supported for n <= 4")
            z = 1.0 / (8 * n ** 4)
        else:
            z = 1.0 / (4 * n ** 2)
        steps = 1.0 / z
        if abs(steps - round(steps)) > 1e-9 or round(steps) < 1:
            raise BadGrid(f"1/zeta must be an integer, got zeta={z}")
        return 1.0 / round(steps)

    def resolve_epsilon(self, n: int) -> float:
        return self.epsilon if self.epsilon is not None else self.delta_outer / n ** 2

    def resolve_c(self) -> float:
        return self.c if self.c is not None else 16.0 / self.eta

    def resolve_delta_heavy(self, k: int) -> float:
        return self.delta_heavy if self.delta_heavy is not None else 1.0 / (4 * self.resolve_c() ** 3 * k ** 4)

    def resolve_eps_round(self, k: int) -> float:
        return self.eps_round if self.eps_round is not None else 1.0 / (self.resolve_c() * k)


class _GridSearch:
    """Neighborhood scans for a fixed objective, knapsack system and bounds.

    Coordinates are integer levels on ``{0, ..., M}`` with ``y = level / M``.
    Any move changes at most ``2k`` coordinates ``Q``; since ``F`` is
    multilinear, its values over every level combination for ``Q`` follow by
    contracting the ``2^|Q|`` corner values with ``[1 - v, v]`` per axis.
    """

    def __init__(self, f, ks, upper_levels, M, evaluate):
        self.f = f
        self.ks = ks
        self.U = upper_levels
        self.M = M
        self.evaluate = evaluate
        self.n = ks.n
        self.k = ks.k

    def value(self, L) -> float:
        return self.evaluate(self.f, L / self.M)

    def corners(self, L, Q, cache) -> np.ndarray:
        key = tuple(Q)
        if key in cache:
            return cache[key]
        y = L / self.M
        c = np.empty((2,) * len(Q))
        for bits in itertools.product((0, 1), repeat=len(Q)):
            z = y.copy()
            z[list(Q)] = bits
            c[bits] = self.evaluate(self.f, z)
        cache[key] = c
        return c

    def scan(self, L, Q, level_lists, cache):
        """Best feasible combination of ``level_lists`` on coordinates ``Q``."""
        if any(len(ls) == 0 for ls in level_lists):
            return None
        T = self.corners(L, Q, cache)
        for ls in level_lists:
            v = np.asarray(ls, dtype=float) / self.M
            T = np.tensordot(T, np.stack([1.0 - v, v]), axes=([0], [0]))
        y = L / self.M
        base = self.ks.point_load(y) - self.ks.weights[:, list(Q)] @ y[list(Q)]
        ok = np.ones(T.shape, dtype=bool)
        for s in range(self.k):
            load = np.full(T.shape, base[s])
            for j, (q, ls) in enumerate(zip(Q, level_lists)):
                shape = [1] * len(Q)
                shape[j] = len(ls)
                load = load + (self.ks.weights[s, q] * np.asarray(ls, dtype=float) / self.M).reshape(shape)
            ok &= load <= 1 + LOAD_TOL
        if not ok.any():
            return None
        masked = np.where(ok, T, -np.inf)
        flat = int(np.argmax(masked))
        idx = np.unravel_index(flat, T.shape)
        return float(masked[idx]), [level_lists[j][i] for j, i in enumerate(idx)]

    def moves(self, L, mode):
        """Yield ``(D, A, Q, level_lists)`` in a fixed order."""
        coords = range(self.n)
        for dsize in range(self.k + 1):
            for D in itertools.combinations(coords, dsize):
                if any(L[i] == 0 for i in D):
                    continue
                rest = [i for i in coords if i not in D]
                for asize in range(self.k + 1):
                    if dsize == 0 and asize == 0:
                        continue
                    for A in itertools.combinations(rest, asize):
                        if any(L[i] >= self.U[i] for i in A):
                            continue
                        Q = tuple(sorted(D + A))
                        if mode == "full":
                            lists = [list(range(0, L[q])) if q in D else list(range(L[q] + 1, self.U[q] + 1))
                                     for q in Q]
                        else:
                            lists = self._menu(L, D, Q)
                        yield D, A, Q, lists

    def _menu(self, L, D, Q):
        y = L / self.M
        y_drop = y.copy()
        y_drop[list(D)] = 0.0
        lists = []
        for q in Q:
            if q in D:
                lists.append(sorted({0, L[q] - 1}))
                continue
            cands = {int(self.U[q]), int(L[q]) + 1}
            for base in (y, y_drop):
                cands.add(self._fill(base, q))
            lists.append(sorted(c for c in cands if L[q] < c <= self.U[q]))
        return lists

    def _fill(self, y, q) -> int:
        """Largest level for coordinate ``q`` keeping the others fixed."""
        best = self.U[q]
        for s in range(self.k):
            w = self.ks.weights[s, q]
            if w <= 0:
                continue
            room = 1.0 - (self.ks.weights[s] @ y - w * y[q])
            best = min(best, int(math.floor(room / w * self.M + 1e-9)))
        return best

    def best_move(self, L, mode):
        cache: dict = {}
        best = None
        for D, A, Q, lists in self.moves(L, mode):
            got = self.scan(L, Q, lists, cache)
            if got is None:
                continue
            val, levels = got
            if best is None or val > best[0] + 1e-12 * max(1.0, abs(best[0])):
                best = (val, D, A, Q, levels)
        return best


def _grid_mode(cfg, M, k, n) -> str:
    if cfg.grid_mode != "auto":
        return cfg.grid_mode
    return "full" if float(M) ** min(2 * k, n) <= cfg.full_grid_budget else "menu"


def _support_mask(n, support) -> np.ndarray:
    sup = np.zeros(n, dtype=bool)
    sup[list(range(n) if support is None else support)] = True
    return sup


def fractional_local_search(f: SubmodularOracle, ks: KnapsackSystem, upper, cfg: Optional[FracSearchConfig] = None,
                            support=None, evaluator: Optional[Evaluator] = None) -> FractionalPoint:
    """Grid local search for ``max F(y)`` s.t. ``W y <= 1``, ``0 <= y <= upper``.

    Moves lower up to ``k`` coordinates and raise up to ``k`` others to grid
    values; a move is taken only if it beats ``(1 + eps) F(y)``.  The result
    carries its search trace in ``info``.
    """
    cfg = cfg or FracSearchConfig()
    sup = _support_mask(ks.n, support)
    n_eff = max(1, int(sup.sum()))
    zeta = cfg.resolve_zeta(n_eff)
    eps = cfg.resolve_epsilon(n_eff)
    M = int(round(1.0 / zeta))
    u = np.ones(ks.n) if upper is None else np.clip(np.asarray(upper, dtype=float), 0.0, 1.0)
    u = np.where(sup, u, 0.0)
    U = np.floor(u * M + 1e-9).astype(int)
    evaluate = evaluator or Evaluator(cfg.exact_max, cfg.mc_samples, cfg.seed)
    mode = _grid_mode(cfg, M, ks.k, n_eff)
    search = _GridSearch(f, ks, U, M, evaluate)

    L = np.zeros(ks.n, dtype=int)
    singles = [(U[i] / M * f.evaluate({i}), i) for i in range(ks.n) if sup[i]]
    info = {"zeta": zeta, "epsilon": eps, "grid_mode": mode, "moves": [], "capped": False}
    if not singles or max(s for s, _ in singles) <= 0:
        info["value"] = search.value(L)
        info["evaluators"] = sorted(getattr(evaluate, "modes_used", []))
        return _point(L, M, zeta, U, info)
    a = max(singles, key=lambda t: (t[0], -t[1]))[1]
    L[a] = U[a]
    Fy = search.value(L)
    cap = cfg.move_cap if cfg.move_cap is not None else 2 * math.ceil(math.log(max(n_eff, 2)) / math.log1p(eps)) + 10
    while len(info["moves"]) < cap:
        best = search.best_move(L, mode)
        if best is None or not best[0] > (1 + eps) * Fy:
            break
        val, D, A, Q, levels = best
        L = L.copy()
        L[list(Q)] = levels
        info["moves"].append({"decrease": list(D), "increase": list(A), "levels": [int(x) for x in levels],
                              "before": Fy, "after": val})
        Fy = search.value(L)
    else:
        info["capped"] = True
    info["value"] = Fy
    info["evaluators"] = sorted(getattr(evaluate, "modes_used", []))
    return _point(L, M, zeta, U, info)


def _point(L, M, zeta, U, info) -> FractionalPoint:
    p = FractionalPoint(L / M, zeta, U / M)
    p.levels = L.copy()
    p.info = info
    return p


def find_improving_grid_move(f, ks, y: FractionalPoint, epsilon, upper=None, mode="full"):
    """Exhaustive check: an admissible grid move beating ``(1 + eps) F(y)``,
    or ``None``.  Used to certify local optimality."""
    zeta = y.zeta
    M = int(round(1.0 / zeta))
    L = np.round(y.coords * M).astype(int)
    u = y.upper if upper is None else np.asarray(upper, dtype=float)
    u = np.ones(ks.n) if u is None else u
    U = np.floor(u * M + 1e-9).astype(int)
    search = _GridSearch(f, ks, U, M, eval_exact)
    Fy = search.value(L)
    best = search.best_move(L, mode)
    if best is not None and best[0] > (1 + epsilon) * Fy * (1 + 1e-12):
        return best
    return None


def solve_fractional(f: SubmodularOracle, ks: KnapsackSystem, cfg: Optional[FracSearchConfig] = None,
                     support=None) -> tuple:
    """Two grid local searches (second one bounded by ``1 - y1``) plus the
    best singleton; returns ``(point, value, certificate)``."""
    cfg = cfg or FracSearchConfig()
    sup = _support_mask(ks.n, support)
    evaluator = Evaluator(cfg.exact_max, cfg.mc_samples, cfg.seed)
    y1 = fractional_local_search(f, ks, np.ones(ks.n), cfg, support, evaluator)
    y2 = fractional_local_search(f, ks, 1.0 - y1.coords, cfg, support, evaluator)
    F1, F2 = y1.info["value"], y2.info["value"]
    idx = [i for i in range(ks.n) if sup[i]]
    if idx:
        best_single = max(idx, key=lambda i: (f.evaluate({i}), -i))
        fmax = f.evaluate({best_single})
        single = FractionalPoint.indicator(ks.n, {best_single})
    else:
        best_single, fmax, single = None, f.evaluate(set()), FractionalPoint(np.zeros(ks.n))
    values = [F1, F2, fmax]
    choice = max(range(3), key=lambda i: (values[i], -i))
    point = [y1, y2, single][choice]
    certificate = {"F_y1": F1, "F_y2": F2, "f_max": fmax, "best_singleton": best_single,
                   "chosen": ["y1", "y2", "singleton"][choice], "y1": y1, "y2": y2,
                   "evaluators": sorted(evaluator.modes_used)}
    return point, values[choice], certificate


def classify_heavy_light(ks: KnapsackSystem, delta_heavy: float) -> tuple:
    if not 0 < delta_heavy <= 1:
        raise BadParams("delta must lie in (0, 1]")
    heavy = frozenset(int(i) for i in np.nonzero((ks.weights >= delta_heavy).any(axis=0))[0])
    return heavy, frozenset(range(ks.n)) - heavy


def enumerate_heavy(f: SubmodularOracle, ks: KnapsackSystem, heavy, cap: int) -> SolutionReport:
    """Best feasible subset of ``heavy`` with at most ``cap`` elements."""
    calls0 = f.counts()
    elems = sorted(heavy)
    best, best_v = frozenset(), f.evaluate(set())
    for size in range(1, min(cap, len(elems)) + 1):
        for combo in itertools.combinations(elems, size):
            if not ks.is_feasible(combo):
                continue
            v = f.evaluate(combo)
            tol = 1e-12 * max(1.0, abs(best_v))
            if v > best_v + tol or (v >= best_v - tol and combo < sorted_tuple(best)):
                best, best_v = frozenset(combo), v
    calls = {k: f.counts()[k] - calls0[k] for k in calls0}
    return SolutionReport(best, best_v, calls, meta={"cap": cap, "heavy": elems})


def rounding_draws(x, ks: KnapsackSystem, eps_round: float, trials: int, seed: int, start: int = 0) -> tuple:
    """Independent roundings; returns ``(masks, overflow)`` where overflow is
    the largest knapsack load of each draw."""
    xc = x.coords if isinstance(x, FractionalPoint) else np.asarray(x, dtype=float)
    n = len(xc)
    u = uniform_rows(seed, start, trials, n)
    incl = u < (1.0 - eps_round) * xc
    loads = incl.astype(float) @ ks.weights.T
    weights = np.left_shift(np.int64(1), np.arange(n, dtype=np.int64))
    masks = incl.astype(np.int64) @ weights
    return masks, loads.max(axis=1) if ks.k else np.zeros(trials)


def randomized_round(f: SubmodularOracle, x, ks: KnapsackSystem, eps_round: float, trials: int,
                     seed: int) -> SolutionReport:
    """Best feasible set over ``trials`` independent roundings; an
    overflowing draw scores zero."""
    calls0 = f.counts()
    masks, alpha = rounding_draws(x, ks, eps_round, trials, seed)
    ok = alpha <= 1 + LOAD_TOL
    values = np.zeros(trials)
    best, best_v = frozenset(), f.evaluate(set())
    for t in range(trials):
        if not ok[t]:
            continue
        v = f.evaluate_mask(int(masks[t]))
        values[t] = v
        if v > best_v + 1e-12 * max(1.0, abs(best_v)):
            best, best_v = from_mask(int(masks[t])), v
    calls = {k: f.counts()[k] - calls0[k] for k in calls0}
    meta = {"eps_round": eps_round, "trials": trials, "seed": seed,
            "failures": int((~ok).sum()), "mean_value": float(values.mean()),
            "alpha": alpha.tolist()}
    return SolutionReport(best, best_v, calls, meta=meta)


def knapsack_algorithm(f: SubmodularOracle, ks: KnapsackSystem, eta: Optional[float] = None,
                       cfg: Optional[FracSearchConfig] = None) -> SolutionReport:
    """Better of exact heavy-element enumeration and rounded fractional
    solution on the light elements.  Always returns a feasible set."""
    cfg = cfg or FracSearchConfig()
    if eta is not None:
        cfg = FracSearchConfig(**{**cfg.__dict__, "eta": eta})
    calls0 = f.counts()
    k = ks.k
    c = cfg.resolve_c()
    delta = cfg.resolve_delta_heavy(k)
    eps_round = cfg.resolve_eps_round(k)
    heavy, light = classify_heavy_light(ks, min(delta, 1.0))
    bound = k / delta
    cap = int(min(math.floor(bound), cfg.heavy_cap))
    heavy_rep = enumerate_heavy(f, ks, heavy, cap)
    branches = {"heavy": heavy_rep.value}
    best = heavy_rep
    chosen = "heavy"
    light_info = None
    if light:
        point, fval, cert = solve_fractional(f, ks, cfg, support=light)
        light_rep = randomized_round(f, point, ks, eps_round, cfg.trials, cfg.seed)
        branches["light"] = light_rep.value
        branches["light_fractional"] = fval
        light_info = {"chosen": cert["chosen"], "evaluators": cert["evaluators"],
                      "failures": light_rep.meta["failures"]}
        if light_rep.value > best.value + 1e-12 * max(1.0, abs(best.value)):
            best, chosen = light_rep, "light"
    if not ks.is_feasible(best.solution):
        raise AssertionError("knapsack algorithm produced an infeasible set")
    calls = {key: f.counts()[key] - calls0[key] for key in calls0}
    meta = {"eta": cfg.eta, "c": c, "delta_heavy": delta, "eps_round": eps_round,
            "heavy": sorted(heavy), "light": sorted(light), "heavy_cap": cap,
            "guarantee_conditional": bool(bound > cfg.heavy_cap and len(heavy) > cap),
            "branches": branches, "chosen": chosen, "light_info": light_info, "seed": cfg.seed}
    return SolutionReport(best.solution, best.value, calls, meta=meta)
