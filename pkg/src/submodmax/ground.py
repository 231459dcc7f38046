"""Ground sets, value oracles for submodular set functions, and validators.

Sets of elements are exchanged as ``frozenset`` of integer ids; internally
each set has a canonical integer bitmask, which is what the oracle cache is
keyed on.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .errors import (
    BadEdge,
    BadUniverseId,
    ElementPresent,
    NegativeEntry,
    NegativeValue,
    NegativeWeight,
    TooLarge,
)

TABLE_MAX_N = 20
VALIDATE_MAX_N = 16
PAIRWISE_MAX_N = 10
NEGATIVE_TOL = 1e-9


def to_mask(s) -> int:
    if isinstance(s, (int, np.integer)):
        return int(s)
    m = 0
    for e in s:
        m |= 1 << int(e)
    return m


def from_mask(mask: int) -> frozenset:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return frozenset(out)


def sorted_tuple(s) -> tuple:
    return tuple(sorted(s))


@dataclass(frozen=True)
class GroundSet:
    n: int
    labels: Optional[tuple] = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("ground set needs at least one element")
        if self.labels is not None and len(self.labels) != self.n:
            raise ValueError("need one label per element")

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def elements(self) -> frozenset:
        return frozenset(range(self.n))

    def check(self, s) -> frozenset:
        s = frozenset(int(e) for e in s)
        if any(e < 0 or e >= self.n for e in s):
            raise ValueError(f"element id out of range for n={self.n}: {sorted(s)}")
        return s

    def label(self, e: int) -> str:
        return str(self.labels[e]) if self.labels else str(e)


class SubmodularOracle:
    """Value oracle ``f: 2^V -> R>=0`` with memoization and call counting.

    ``eval_count`` counts distinct sets actually computed (cache misses);
    ``request_count`` counts every request, cached or not.  Algorithms are
    compared against theory using ``eval_count``.
    """

    def __init__(self, n: int, kind: str, payload: dict, fn: Callable[[int], float],
                 batch: Optional[Callable[[np.ndarray], np.ndarray]] = None,
                 labels=None):
        self.ground = GroundSet(n, labels)
        self.kind = kind
        self.payload = payload
        self._fn = fn
        self._batch = batch
        self._cache: dict[int, float] = {}
        self._lock = threading.Lock()
        self._table = None
        self.eval_count = 0
        self.request_count = 0

    @property
    def n(self) -> int:
        return self.ground.n

    def __repr__(self):
        return f"SubmodularOracle(kind={self.kind!r}, n={self.n})"

    def _raw(self, mask: int) -> float:
        v = float(self._fn(mask))
        if v < 0:
            if v < -NEGATIVE_TOL:
                raise NegativeValue(f"{self.kind} oracle returned {v} on {sorted(from_mask(mask))}")
            v = 0.0
        return v

    def evaluate_mask(self, mask: int) -> float:
        with self._lock:
            self.request_count += 1
        v = self._cache.get(mask)
        if v is None:
            v = self._raw(mask)
            with self._lock:
                if mask not in self._cache:
                    self._cache[mask] = v
                    self.eval_count += 1
        return v

    def evaluate(self, s) -> float:
        mask = to_mask(s)
        if mask >> self.n:
            raise ValueError(f"set {sorted(from_mask(mask))} not over ground set of size {self.n}")
        return self.evaluate_mask(mask)

    __call__ = evaluate

    def marginal(self, s, e: int) -> float:
        mask = to_mask(s)
        if (mask >> e) & 1:
            raise ElementPresent(f"element {e} already in set")
        return self.evaluate_mask(mask | (1 << e)) - self.evaluate_mask(mask)

    def counts(self) -> dict:
        return {"distinct": self.eval_count, "requests": self.request_count}

    def reset_counts(self, clear_cache: bool = True):
        with self._lock:
            self.eval_count = 0
            self.request_count = 0
            if clear_cache:
                self._cache.clear()

    def table(self) -> np.ndarray:
        """All ``2^n`` values indexed by mask.  Uncounted; meant for verifiers."""
        if self.n > TABLE_MAX_N:
            raise TooLarge(f"n={self.n} exceeds table cap {TABLE_MAX_N}")
        if self._table is None:
            masks = np.arange(1 << self.n, dtype=np.int64)
            if self._batch is not None:
                t = np.asarray(self._batch(masks), dtype=float)
            else:
                t = np.array([self._fn(int(m)) for m in masks], dtype=float)
            if (t < -NEGATIVE_TOL).any():
                bad = int(np.argmin(t))
                raise NegativeValue(f"{self.kind} oracle negative on {sorted(from_mask(bad))}")
            self._table = np.maximum(t, 0.0)
        return self._table

    def raw_value(self, s) -> float:
        """Value without touching counters or cache."""
        return self._raw(to_mask(s))


def _bits(masks: np.ndarray, n: int) -> np.ndarray:
    return ((masks[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(bool)


def build_cut(n: int, edges: Sequence, directed: bool = False, labels=None) -> SubmodularOracle:
    """Cut function of a weighted graph on vertices ``0..n-1``.

    ``edges`` holds ``(u, v)`` or ``(u, v, w)`` tuples.  Undirected: weight of
    edges with exactly one endpoint in ``S``; directed: weight of edges
    leaving ``S``.
    """
    us, vs, ws = [], [], []
    for edge in edges:
        u, v = int(edge[0]), int(edge[1])
        w = float(edge[2]) if len(edge) > 2 else 1.0
        if not (0 <= u < n and 0 <= v < n):
            raise BadEdge(f"edge ({u}, {v}) out of range for n={n}")
        if w < 0:
            raise NegativeWeight(f"edge ({u}, {v}) has weight {w}")
        us.append(u)
        vs.append(v)
        ws.append(w)
    ua, va, wa = np.array(us, dtype=np.int64), np.array(vs, dtype=np.int64), np.array(ws)
    triples = list(zip(us, vs, ws))

    if directed:
        def fn(mask):
            return sum(w for u, v, w in triples if (mask >> u) & 1 and not (mask >> v) & 1)
    else:
        def fn(mask):
            return sum(w for u, v, w in triples if ((mask >> u) ^ (mask >> v)) & 1)

    def batch(masks):
        b = _bits(masks, n)
        if not triples:
            return np.zeros(len(masks))
        bu, bv = b[:, ua], b[:, va]
        crossing = (bu & ~bv) if directed else (bu ^ bv)
        return crossing.astype(float) @ wa

    kind = "cut_directed" if directed else "cut_undirected"
    payload = {"edges": [[u, v, w] for u, v, w in triples]}
    return SubmodularOracle(n, kind, payload, fn, batch, labels)


def build_coverage(sets: Sequence[Iterable[int]], universe_weights: Sequence[float],
                   labels=None) -> SubmodularOracle:
    """Weighted coverage: ground element ``i`` is the family member ``sets[i]``."""
    weights = [float(w) for w in universe_weights]
    if any(w < 0 for w in weights):
        raise NegativeWeight("universe weights must be non-negative")
    m = len(weights)
    members = []
    for i, s in enumerate(sets):
        s = sorted(int(x) for x in s)
        if any(x < 0 or x >= m for x in s):
            raise BadUniverseId(f"family member {i} references ids outside universe of size {m}")
        members.append(s)
    cover_masks = [to_mask(s) for s in members]
    warr = np.array(weights)

    def fn(mask):
        covered = 0
        i = 0
        while mask:
            if mask & 1:
                covered |= cover_masks[i]
            mask >>= 1
            i += 1
        return sum(weights[j] for j in range(m) if (covered >> j) & 1)

    def batch(masks):
        n = len(members)
        incidence = np.zeros((n, m))
        for i, s in enumerate(members):
            incidence[i, s] = 1.0
        hits = _bits(masks, n).astype(float) @ incidence
        return (hits > 0).astype(float) @ warr

    payload = {"sets": members, "weights": weights}
    return SubmodularOracle(len(members), "coverage", payload, fn, batch, labels)


def build_facility_location(profit_matrix, labels=None) -> SubmodularOracle:
    """``f(S) = sum over clients of the best profit among open facilities S``."""
    P = np.asarray(profit_matrix, dtype=float)
    if P.ndim != 2:
        raise ValueError("profit matrix must be clients x facilities")
    if (P < 0).any():
        raise NegativeEntry("profit matrix entries must be non-negative")
    n = P.shape[1]

    def fn(mask):
        cols = [j for j in range(n) if (mask >> j) & 1]
        if not cols:
            return 0.0
        return float(P[:, cols].max(axis=1).sum())

    def batch(masks):
        b = _bits(masks, n)
        out = np.zeros(len(masks))
        for c in range(P.shape[0]):
            out += np.where(b, P[c], 0.0).max(axis=1)
        return out

    payload = {"profits": P.tolist()}
    return SubmodularOracle(n, "facility_location", payload, fn, batch, labels)


def build_modular(weights: Sequence[float], offset: float = 0.0, labels=None) -> SubmodularOracle:
    w = np.array([float(x) for x in weights])
    n = len(w)

    def fn(mask):
        return offset + sum(w[i] for i in range(n) if (mask >> i) & 1)

    def batch(masks):
        return offset + _bits(masks, n).astype(float) @ w

    return SubmodularOracle(n, "modular", {"weights": w.tolist(), "offset": float(offset)},
                            fn, batch, labels)


def build_explicit_table(n: int, values, labels=None) -> SubmodularOracle:
    """Oracle from a full table of ``2^n`` values indexed by bitmask (n <= 20)."""
    if n > TABLE_MAX_N:
        raise TooLarge(f"explicit tables are limited to n <= {TABLE_MAX_N}")
    if isinstance(values, dict):
        t = np.zeros(1 << n)
        for s, v in values.items():
            t[to_mask(s)] = v
    else:
        t = np.asarray(values, dtype=float)
    if t.shape != (1 << n,):
        raise ValueError(f"need exactly 2^{n} values")
    if (t < 0).any():
        raise NegativeValue("explicit table contains negative values")
    return SubmodularOracle(n, "explicit_table", {"values": t.tolist()},
                            lambda mask: t[mask], lambda masks: t[masks], labels)


def complement_oracle(oracle: SubmodularOracle) -> SubmodularOracle:
    """``g(T) = f(V \\ T)``."""
    full = (1 << oracle.n) - 1
    base_batch = oracle._batch

    def batch(masks):
        if base_batch is not None:
            return base_batch(full ^ masks)
        return np.array([oracle._raw(full ^ int(m)) for m in masks])

    return SubmodularOracle(oracle.n, "complement", {"base": oracle},
                            lambda mask: oracle._raw(full ^ mask), batch,
                            oracle.ground.labels)


@dataclass
class SubmodularityReport:
    submodular: bool
    monotone: bool
    symmetric: bool
    method: str
    violation: Optional[tuple] = None
    worst_gap: float = 0.0

    def __bool__(self):
        return self.submodular


def validate_submodular(oracle: SubmodularOracle, tol: float = 1e-9) -> SubmodularityReport:
    """Exhaustive structural check for ``n <= 16``.

    Up to ``n = 10`` the defining inequality is checked on every pair of
    sets; beyond that the equivalent local form
    ``f(S+i) + f(S+j) >= f(S+i+j) + f(S)`` is used.
    """
    n = oracle.n
    if n > VALIDATE_MAX_N:
        raise TooLarge(f"exhaustive validation limited to n <= {VALIDATE_MAX_N}")
    t = oracle.table()
    N = 1 << n
    masks = np.arange(N, dtype=np.int64)
    full = N - 1
    scale = max(1.0, float(np.abs(t).max()))
    thr = tol * scale

    violation = None
    worst = 0.0
    if n <= PAIRWISE_MAX_N:
        method = "pairs"
        for s in range(N):
            gap = t[s] + t - t[s | masks] - t[s & masks]
            i = int(np.argmin(gap))
            if gap[i] < worst:
                worst = float(gap[i])
                if gap[i] < -thr and violation is None:
                    violation = (from_mask(s), from_mask(i))
    else:
        method = "local"
        for i in range(n):
            for j in range(i + 1, n):
                bi, bj = 1 << i, 1 << j
                base = masks[(masks & (bi | bj)) == 0]
                gap = t[base | bi] + t[base | bj] - t[base | bi | bj] - t[base]
                a = int(np.argmin(gap))
                if gap[a] < worst:
                    worst = float(gap[a])
                    if gap[a] < -thr and violation is None:
                        s = int(base[a])
                        violation = (from_mask(s | bi), from_mask(s | bj))

    monotone = True
    for i in range(n):
        bi = 1 << i
        base = masks[(masks & bi) == 0]
        if (t[base | bi] < t[base] - thr).any():
            monotone = False
            break
    symmetric = bool(np.all(np.abs(t - t[full ^ masks]) <= thr))
    return SubmodularityReport(violation is None, monotone, symmetric, method, violation, worst)
