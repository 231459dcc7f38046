"""Brute-force optima, local-optimality certificates and ratio measurement."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import TooLarge
from .ground import TABLE_MAX_N, SubmodularOracle, from_mask, sorted_tuple, to_mask
from .multilinear import FractionalPoint, eval_table

BRUTE_MAX_N = 22
CERT_MAX_N = 14
FRACTIONAL_MAX_N = 12
CERT_TOL = 1e-9


@dataclass(frozen=True)
class FeasibilityPredicate:
    """Feasible region: ``kind`` is one of ``matroids``, ``knapsack``,
    ``base`` or ``cardinality``."""

    kind: str
    payload: object
    n: int

    @classmethod
    def matroids(cls, n, matroids) -> "FeasibilityPredicate":
        return cls("matroids", tuple(matroids), n)

    @classmethod
    def knapsack(cls, ks) -> "FeasibilityPredicate":
        return cls("knapsack", ks, ks.n)

    @classmethod
    def base(cls, matroid) -> "FeasibilityPredicate":
        return cls("base", matroid, matroid.n)

    @classmethod
    def cardinality(cls, n, c) -> "FeasibilityPredicate":
        return cls("cardinality", int(c), n)

    def __call__(self, s) -> bool:
        s = frozenset(s)
        if any(e < 0 or e >= self.n for e in s):
            return False
        if self.kind == "matroids":
            return all(m.is_independent(s) for m in self.payload)
        if self.kind == "knapsack":
            return self.payload.is_feasible(s)
        if self.kind == "base":
            return self.payload.is_base(s)
        if self.kind == "cardinality":
            return len(s) == self.payload
        raise ValueError(f"unknown feasibility kind {self.kind!r}")

    @property
    def downward_closed(self) -> bool:
        return self.kind in ("matroids", "knapsack")

    def masks(self, ground=None) -> np.ndarray:
        """Every feasible set inside ``ground`` as a bitmask, ascending."""
        elems = sorted(range(self.n) if ground is None else ground)
        out = []
        if self.downward_closed:
            # depth-first over increasing ids; infeasible sets have no feasible supersets
            stack = [(frozenset(), 0)]
            while stack:
                s, start = stack.pop()
                out.append(to_mask(s))
                for j in range(start, len(elems)):
                    t = s | {elems[j]}
                    if self(t):
                        stack.append((t, j + 1))
        else:
            size = self.payload if self.kind == "cardinality" else self.payload.full_rank()
            for combo in itertools.combinations(elems, size):
                if self(combo):
                    out.append(to_mask(combo))
        return np.array(sorted(out), dtype=np.int64)


def _values(f: SubmodularOracle, masks: np.ndarray) -> np.ndarray:
    if f.n <= TABLE_MAX_N:
        return f.table()[masks]
    return np.array([f.raw_value(from_mask(int(m))) for m in masks], dtype=float)


def brute_force_opt(f: SubmodularOracle, feas: FeasibilityPredicate) -> tuple:
    """Exhaustive maximum; ties go to the lexicographically smallest set."""
    if f.n > BRUTE_MAX_N:
        raise TooLarge(f"brute force limited to n <= {BRUTE_MAX_N}")
    masks = feas.masks()
    if len(masks) == 0:
        return None, float("nan")
    vals = _values(f, masks)
    best = float(vals.max())
    tied = masks[vals >= best - 1e-12 * max(1.0, abs(best))]
    winner = min((from_mask(int(m)) for m in tied), key=sorted_tuple)
    return winner, float(vals[masks == to_mask(winner)][0])


def _finite(x):
    return float(x) if np.isfinite(x) else None


@dataclass
class CertificateReport:
    name: str
    passed: bool
    worst_slack: float
    violation: Optional[frozenset]
    checked: int
    params: dict = field(default_factory=dict)

    def __bool__(self):
        return self.passed

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "worst_slack": _finite(self.worst_slack),
                "violation": None if self.violation is None else sorted(self.violation),
                "checked": self.checked, "params": self.params}


def _finish(name, lhs, rhs, candidates, params, scale) -> CertificateReport:
    if len(rhs) == 0:
        return CertificateReport(name, True, float("inf"), None, 0, params)
    slack = lhs - rhs
    i = int(np.argmin(slack))
    worst = float(slack[i])
    ok = worst >= -CERT_TOL * max(1.0, scale)
    viol = None if ok else candidates(i)
    return CertificateReport(name, bool(ok), worst, viol, int(len(rhs)), params)


def _set_lemma(name, f, s, feas, ground, lhs_coef, union_coef, inter_coef, equal_size, params):
    if f.n > CERT_MAX_N:
        raise TooLarge(f"set certificates limited to n <= {CERT_MAX_N}")
    table = f.table()
    sm = to_mask(s)
    masks = feas.masks(ground)
    if equal_size:
        sizes = np.array([bin(int(m)).count("1") for m in masks])
        masks = masks[sizes == len(frozenset(s))]
    fS = float(table[sm])
    rhs = union_coef * table[masks | sm] + inter_coef * table[masks & sm]
    lhs = lhs_coef * fS
    scale = max(abs(lhs), float(np.abs(rhs).max()) if len(rhs) else 0.0)
    return _finish(name, lhs, rhs, lambda i: from_mask(int(masks[i])), params, scale)


def certify_matroid_local_lemma(f: SubmodularOracle, s, matroids: Sequence, epsilon: float,
                                ground=None, swap: bool = False) -> CertificateReport:
    """Check ``(1+eps)(k+1) f(S) >= f(S | C) + k f(S & C)`` for every feasible
    ``C`` inside ``ground``.  With ``swap=True`` (single matroid, equal-size
    ``C``) the check is ``2(1+eps) f(S) >= f(S | C) + f(S & C)``."""
    k = len(matroids)
    feas = FeasibilityPredicate.matroids(f.n, matroids)
    params = {"k": k, "epsilon": epsilon, "swap": swap}
    if swap:
        return _set_lemma("swap_local_lemma", f, s, feas, ground, 2 * (1 + epsilon), 1.0, 1.0, True, params)
    return _set_lemma("matroid_local_lemma", f, s, feas, ground, (1 + epsilon) * (k + 1), 1.0, float(k),
                      False, params)


def certify_partition_lemma(f: SubmodularOracle, s, partition_matroids: Sequence, p: int, epsilon: float,
                            ground=None) -> CertificateReport:
    """Check ``(1+eps) k f(S) >= (1 - 1/p) f(S | C) + (k-1) f(S & C)``."""
    k = len(partition_matroids)
    feas = FeasibilityPredicate.matroids(f.n, partition_matroids)
    params = {"k": k, "p": p, "epsilon": epsilon}
    return _set_lemma("partition_lemma", f, s, feas, ground, (1 + epsilon) * k, 1.0 - 1.0 / p,
                      float(k - 1), False, params)


def certify_fractional_lemma(f: SubmodularOracle, y: FractionalPoint, ks, epsilon: float,
                             grid_samples: int = 0, seed: int = 0) -> CertificateReport:
    """Check ``(2 + 2n eps) F(y) >= F(y ^ x) + F(y v x) - f_max / (2n)`` for
    every feasible integral ``x`` within the bounds of ``y``, plus
    ``grid_samples`` random feasible grid points."""
    n = f.n
    if n > FRACTIONAL_MAX_N:
        raise TooLarge(f"fractional certificate limited to n <= {FRACTIONAL_MAX_N}")
    table = f.table()
    yc = y.coords if isinstance(y, FractionalPoint) else np.asarray(y, dtype=float)
    upper = y.upper if isinstance(y, FractionalPoint) and y.upper is not None else np.ones(n)
    allowed = to_mask(i for i in range(n) if upper[i] >= 1.0 - 1e-12)
    masks = FeasibilityPredicate.knapsack(ks).masks(from_mask(allowed))
    bits = ((masks[:, None] >> np.arange(n)) & 1).astype(float)
    points = list(bits)
    if grid_samples:
        zeta = y.zeta if isinstance(y, FractionalPoint) and y.zeta else 0.1
        steps = int(round(1.0 / zeta))
        rng = np.random.default_rng(seed)
        while len(points) < len(bits) + grid_samples:
            x = np.minimum(rng.integers(0, steps + 1, n) / steps, upper)
            if ks.point_feasible(x):
                points.append(x)
    fmax = float(max(table[1 << i] for i in range(n)))
    Fy = eval_table(table, yc)
    lhs = (2 + 2 * n * epsilon) * Fy
    rhs = np.array([eval_table(table, np.minimum(yc, x)) + eval_table(table, np.maximum(yc, x)) for x in points])
    rhs = rhs - fmax / (2 * n)
    scale = max(abs(lhs), float(np.abs(rhs).max()) if len(rhs) else 0.0)
    params = {"epsilon": epsilon, "f_max": fmax, "F_y": Fy, "grid_samples": grid_samples}

    def cand(i):
        x = points[i]
        return frozenset(int(j) for j in np.nonzero(x)[0]) if i < len(bits) else tuple(float(v) for v in x)

    return _finish("fractional_lemma", lhs, rhs, cand, params, scale)


@dataclass
class RatioReport:
    value: float
    opt: float
    ratio: float
    threshold: float
    passed: bool
    feasible: bool
    fingerprint: Optional[str] = None
    seed: Optional[int] = None
    opt_set: Optional[frozenset] = None

    def __bool__(self):
        return self.passed

    def to_dict(self) -> dict:
        return {"value": self.value, "opt": _finite(self.opt), "ratio": _finite(self.ratio),
                "threshold": self.threshold,
                "passed": self.passed, "feasible": self.feasible, "fingerprint": self.fingerprint,
                "seed": self.seed, "opt_set": None if self.opt_set is None else sorted(self.opt_set)}


def measure_ratio(result, f: SubmodularOracle, feas: FeasibilityPredicate, threshold: float,
                  tol: float = 1e-9, fingerprint: Optional[str] = None, seed: Optional[int] = None) -> RatioReport:
    """Compare a solution (report, set, or ``(set, value)``) with the brute-force optimum."""
    if hasattr(result, "solution"):
        sol = frozenset(result.solution)
    elif isinstance(result, tuple) and len(result) == 2 and not isinstance(result[0], (int, np.integer)):
        sol = frozenset(result[0])
    else:
        sol = frozenset(result)
    value = f.raw_value(sol)
    opt_set, opt = brute_force_opt(f, feas)
    ok_feas = feas(sol)
    if opt > 0:
        ratio = value / opt
        passed = ratio >= threshold - tol
    else:
        ratio = 1.0 if value == 0 else float("inf")
        passed = value == 0
    return RatioReport(value, opt, ratio, threshold, bool(passed and ok_feas), ok_feas, fingerprint, seed, opt_set)


def find_improving_move(f: SubmodularOracle, s, matroids: Sequence, factor: float, ground=None):
    """Exhaustive neighborhood scan: a delete, or an exchange adding one
    ``d`` and removing any ``R`` of at most ``k`` elements, whose value beats
    ``factor * f(S)``.  Returns ``(added, removed, value)`` or ``None``."""
    if f.n > CERT_MAX_N:
        raise TooLarge(f"neighborhood scans limited to n <= {CERT_MAX_N}")
    table = f.table()
    S = frozenset(s)
    k = len(matroids)
    ground = frozenset(range(f.n)) if ground is None else frozenset(ground)
    need = factor * table[to_mask(S)]
    for e in sorted(S):
        v = table[to_mask(S - {e})]
        if v >= need and v > table[to_mask(S)]:
            return (), (e,), float(v)
    for d in sorted(ground - S):
        if not all(m.is_independent({d}) for m in matroids):
            continue
        for r in range(k + 1):
            for R in itertools.combinations(sorted(S), r):
                T = (S - frozenset(R)) | {d}
                if all(m.is_independent(T) for m in matroids) and table[to_mask(T)] > need:
                    return (d,), R, float(table[to_mask(T)])
    return None
