"""Approximate local search under matroid constraints.

Moves improve the objective by a factor of at least ``1 + eps / n**d``.
Every engine uses best-improvement pivoting with deterministic
tie-breaking on ``(added elements, sorted removed elements)``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

from .errors import BadParams, NotPartition
from .ground import SubmodularOracle, sorted_tuple
from .matroid import Matroid, PartitionMatroid

TIE_TOL = 1e-12


@dataclass(frozen=True)
class SearchConfig:
    epsilon: float = 0.05
    scaling_exponent: int = 4
    p: int = 1
    move_cap: Optional[int] = None
    full_neighborhood: bool = False

    def __post_init__(self):
        if not self.epsilon > 0:
            raise BadParams("epsilon must be positive")
        if self.p < 1:
            raise BadParams("p must be at least 1")
        if self.scaling_exponent < 0:
            raise BadParams("scaling exponent must be non-negative")

    def factor(self, n: int) -> float:
        f = 1.0 + self.epsilon / float(n) ** self.scaling_exponent
        if not f > 1.0:
            raise BadParams(f"improvement factor rounds to 1 at n={n}; lower scaling_exponent")
        return f

    def move_bound(self, n: int) -> int:
        """Upper bound on improving moves from a best-singleton start."""
        return math.ceil(math.log(max(n, 1)) / math.log(self.factor(n))) + 1


@dataclass(frozen=True)
class Move:
    kind: str
    added: tuple
    removed: tuple
    before: float
    after: float


@dataclass
class SolutionReport:
    solution: frozenset
    value: float
    oracle_calls: dict
    moves: list = field(default_factory=list)
    iterations: list = field(default_factory=list)
    ground: Optional[frozenset] = None
    meta: dict = field(default_factory=dict)

    @property
    def n_moves(self) -> int:
        return len(self.moves)

    def to_dict(self) -> dict:
        return {
            "solution": sorted(self.solution),
            "value": self.value,
            "oracle_calls": dict(self.oracle_calls),
            "moves": [[m.kind, list(m.added), list(m.removed), m.before, m.after] for m in self.moves],
            "iterations": [it.to_dict() for it in self.iterations],
            "meta": {k: v for k, v in self.meta.items() if _plain(v)},
        }


def _plain(v) -> bool:
    return isinstance(v, (int, float, str, bool, type(None), list, tuple, dict))


def usable_elements(matroids: Sequence[Matroid], ground) -> frozenset:
    """Elements whose singleton is independent in every matroid."""
    return frozenset(e for e in ground if all(m.is_independent({e}) for m in matroids))


def feasible(matroids: Sequence[Matroid], s) -> bool:
    return all(m.is_independent(s) for m in matroids)


def _best_singleton(f: SubmodularOracle, elements) -> tuple:
    best, best_v = None, -math.inf
    for e in sorted(elements):
        v = f.evaluate({e})
        if best is None or v > best_v + TIE_TOL * max(1.0, abs(best_v)):
            best, best_v = e, v
    return best, best_v


class _Pivot:
    """Keeps the best candidate move; ties go to the smallest key."""

    def __init__(self):
        self.value = -math.inf
        self.key = None
        self.payload = None

    def offer(self, value, key, payload):
        tol = TIE_TOL * max(1.0, abs(self.value)) if self.key is not None else 0.0
        if self.key is None or value > self.value + tol or (value >= self.value - tol and key < self.key):
            self.value, self.key, self.payload = value, key, payload


def _report(f, s, moves, ground, meta, calls_before) -> SolutionReport:
    s = frozenset(s)
    value = f.evaluate(s)
    calls = {k: f.counts()[k] - calls_before[k] for k in calls_before}
    return SolutionReport(s, value, calls, moves, [], ground, meta)


def exchange_removals(s: frozenset, d: int, matroids: Sequence[Matroid], full: bool = False) -> set:
    """Removal sets ``R`` for adding ``d``: one choice ``e_i`` (or none) per
    matroid with ``(S - e_i) + d`` independent in matroid i, ``R = {e_i}``."""
    sd = s | {d}
    if full:
        opts = [None] + sorted(s)
        out = set()
        for choice in itertools.product(opts, repeat=len(matroids)):
            ok = True
            for m, e in zip(matroids, choice):
                t = sd if e is None else sd - {e}
                if not m.is_independent(t):
                    ok = False
                    break
            if ok:
                out.add(frozenset(e for e in choice if e is not None))
        return out
    per = []
    for m in matroids:
        if m.is_independent(sd):
            per.append([None] + sorted(s))
        else:
            per.append([e for e in sorted(s) if m.is_independent(sd - {e})])
            if not per[-1]:
                return set()
    return {frozenset(e for e in choice if e is not None) for choice in itertools.product(*per)}


def procedure_b(f: SubmodularOracle, ground_subset, matroids: Sequence[Matroid],
                cfg: Optional[SearchConfig] = None) -> SolutionReport:
    """Delete/exchange approximate local search on ``ground_subset``.

    Starts from the best singleton and applies the best improving delete or
    ``(1, <=k)`` exchange move until none improves by the required factor.
    Elements whose singleton is infeasible are dropped up front.
    """
    cfg = cfg or SearchConfig()
    if not matroids:
        raise BadParams("need at least one matroid")
    calls0 = f.counts()
    ground = frozenset(range(f.n)) if ground_subset is None else frozenset(ground_subset)
    X = usable_elements(matroids, ground)
    factor = cfg.factor(f.n)
    meta = {"factor": factor, "k": len(matroids), "epsilon": cfg.epsilon,
            "scaling_exponent": cfg.scaling_exponent, "excluded": sorted(ground - X)}
    if not X:
        return _report(f, frozenset(), [], ground, meta, calls0)
    v, fv = _best_singleton(f, X)
    if fv <= 0:
        return _report(f, frozenset(), [], ground, meta, calls0)
    S = frozenset({v})
    fS = fv
    moves: list = []
    cap = cfg.move_cap if cfg.move_cap is not None else 10 * cfg.move_bound(f.n) + 10
    while len(moves) < cap:
        piv = _Pivot()
        need = factor * fS
        for e in sorted(S):
            val = f.evaluate(S - {e})
            if val >= need:
                piv.offer(val, ((-1,), (e,)), ("delete", (), (e,)))
        for d in sorted(X - S):
            for R in sorted(exchange_removals(S, d, matroids, cfg.full_neighborhood), key=sorted_tuple):
                val = f.evaluate((S - R) | {d})
                if val > need:
                    r = sorted_tuple(R)
                    piv.offer(val, ((d,), r), ("exchange", (d,), r))
        if piv.payload is None:
            break
        kind, added, removed = piv.payload
        S = (S - frozenset(removed)) | frozenset(added)
        moves.append(Move(kind, added, removed, fS, piv.value))
        fS = piv.value
    meta["capped"] = len(moves) >= cap
    return _report(f, S, moves, ground, meta, calls0)


def algorithm_a(f: SubmodularOracle, matroids: Sequence[Matroid],
                cfg: Optional[SearchConfig] = None) -> SolutionReport:
    """``k + 1`` rounds of :func:`procedure_b` on shrinking ground sets;
    returns the best round."""
    cfg = cfg or SearchConfig()
    calls0 = f.counts()
    k = len(matroids)
    V = frozenset(range(f.n))
    rounds = []
    for _ in range(k + 1):
        rep = procedure_b(f, V, matroids, cfg)
        rounds.append(rep)
        V = V - rep.solution
    best = max(range(len(rounds)), key=lambda i: (rounds[i].value, -i))
    out = rounds[best]
    calls = {key: f.counts()[key] - calls0[key] for key in calls0}
    return SolutionReport(out.solution, out.value, calls, list(out.moves), rounds,
                          frozenset(range(f.n)), {"best_round": best, "k": k, "epsilon": cfg.epsilon,
                                                  "scaling_exponent": cfg.scaling_exponent})


def symmetric_algorithm(f: SubmodularOracle, matroids: Sequence[Matroid],
                        cfg: Optional[SearchConfig] = None) -> SolutionReport:
    """Single local-search pass; enough when ``f(S) = f(V \\ S)``."""
    rep = procedure_b(f, None, matroids, cfg)
    rep.iterations = [rep]
    return rep


def _check_partitions(matroids):
    bad = [m for m in matroids if not isinstance(m, PartitionMatroid)]
    if bad:
        raise NotPartition(f"p-exchange search needs partition matroids, got {bad[0]!r}")
    if len(matroids) < 2:
        raise BadParams("p-exchange search needs k >= 2 matroids")


def p_exchange_search(f: SubmodularOracle, partition_matroids: Sequence[PartitionMatroid],
                      cfg: Optional[SearchConfig] = None, ground_subset=None) -> SolutionReport:
    """Local search adding up to ``p`` elements while dropping up to
    ``(k - 1) * q`` for ``q`` added."""
    cfg = cfg or SearchConfig()
    matroids = list(partition_matroids)
    _check_partitions(matroids)
    k, p = len(matroids), cfg.p
    calls0 = f.counts()
    ground = frozenset(range(f.n)) if ground_subset is None else frozenset(ground_subset)
    X = usable_elements(matroids, ground)
    factor = cfg.factor(f.n)
    meta = {"factor": factor, "k": k, "p": p, "epsilon": cfg.epsilon,
            "scaling_exponent": cfg.scaling_exponent}
    if not X:
        return _report(f, frozenset(), [], ground, meta, calls0)
    v, fv = _best_singleton(f, X)
    if fv <= 0:
        return _report(f, frozenset(), [], ground, meta, calls0)
    S, fS = frozenset({v}), fv
    moves: list = []
    cap = cfg.move_cap if cfg.move_cap is not None else 10 * cfg.move_bound(f.n) + 10
    while len(moves) < cap:
        piv = _Pivot()
        need = factor * fS
        for e in sorted(S):
            val = f.evaluate(S - {e})
            if val >= need:
                piv.offer(val, ((-1,), (e,)), ("delete", (), (e,)))
        outside = sorted(X - S)
        Ssorted = sorted(S)
        for q in range(1, p + 1):
            for D in itertools.combinations(outside, q):
                Dset = frozenset(D)
                if not feasible(matroids, Dset):
                    continue
                need_rm = [m.overflow(S | Dset) for m in matroids]
                max_r = min((k - 1) * q, len(Ssorted))
                for r in range(0, max_r + 1):
                    for R in itertools.combinations(Ssorted, r):
                        Rset = frozenset(R)
                        if not _covers(matroids, need_rm, Rset):
                            continue
                        val = f.evaluate((S - Rset) | Dset)
                        if val > need:
                            piv.offer(val, (D, R), ("exchange", D, R))
        if piv.payload is None:
            break
        kind, added, removed = piv.payload
        S = (S - frozenset(removed)) | frozenset(added)
        moves.append(Move(kind, tuple(added), tuple(removed), fS, piv.value))
        fS = piv.value
    meta["capped"] = len(moves) >= cap
    return _report(f, S, moves, ground, meta, calls0)


def _covers(matroids, overflows, R) -> bool:
    for m, over in zip(matroids, overflows):
        for j, c in over.items():
            if len(m.parts[j] & R) < c:
                return False
    return True


def partition_p(k: int, epsilon: float) -> int:
    """``p = 1 + ceil(2k / eps)``, robust to float noise in exact ratios."""
    return 1 + math.ceil(round(2 * k / epsilon, 9))


def partition_algorithm(f: SubmodularOracle, partition_matroids: Sequence[PartitionMatroid],
                        epsilon: float, monotone: bool = False,
                        cfg: Optional[SearchConfig] = None, p: Optional[int] = None) -> SolutionReport:
    """p-exchange search with ``p`` derived from ``epsilon`` unless given.

    Monotone objectives use one pass; otherwise ``k`` passes on shrinking
    ground sets, keeping the best.
    """
    matroids = list(partition_matroids)
    _check_partitions(matroids)
    k = len(matroids)
    if p is None:
        if not epsilon > 0:
            raise BadParams("epsilon must be positive")
        p = partition_p(k, epsilon)
    elif p < 1:
        raise BadParams("p must be at least 1")
    cfg = replace(cfg or SearchConfig(), p=p)
    calls0 = f.counts()
    passes = 1 if monotone else k
    V = frozenset(range(f.n))
    rounds = []
    for _ in range(passes):
        rep = p_exchange_search(f, matroids, cfg, V)
        rounds.append(rep)
        V = V - rep.solution
    best = max(range(len(rounds)), key=lambda i: (rounds[i].value, -i))
    out = rounds[best]
    calls = {key: f.counts()[key] - calls0[key] for key in calls0}
    return SolutionReport(out.solution, out.value, calls, list(out.moves), rounds,
                          frozenset(range(f.n)),
                          {"p": p, "k": k, "monotone": monotone, "best_round": best,
                           "epsilon": epsilon, "search_epsilon": cfg.epsilon,
                           "scaling_exponent": cfg.scaling_exponent})


def greedy_baseline(f: SubmodularOracle, matroids: Sequence[Matroid], ground_subset=None) -> SolutionReport:
    """Add the feasible element of largest positive marginal gain until none."""
    calls0 = f.counts()
    ground = frozenset(range(f.n)) if ground_subset is None else frozenset(ground_subset)
    S: frozenset = frozenset()
    fS = f.evaluate(S)
    moves = []
    while True:
        best, best_gain = None, 0.0
        for e in sorted(ground - S):
            if not feasible(matroids, S | {e}):
                continue
            gain = f.evaluate(S | {e}) - fS
            if gain > best_gain + TIE_TOL * max(1.0, abs(best_gain)):
                best, best_gain = e, gain
        if best is None:
            break
        moves.append(Move("add", (best,), (), fS, fS + best_gain))
        S = S | {best}
        fS = f.evaluate(S)
    return _report(f, S, moves, ground, {}, calls0)
