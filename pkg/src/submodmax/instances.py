"""Instance files: canonical JSON serialization, fingerprints and generators."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import BadParams, InvalidInstance
from .ground import (
    SubmodularOracle,
    build_coverage,
    build_cut,
    build_explicit_table,
    build_facility_location,
    build_modular,
)
from .knapsack import KnapsackSystem
from .matroid import PartitionMatroid, UniformMatroid, matroid_from_dict
from .verify import FeasibilityPredicate

FUNCTION_KINDS = ("cut_undirected", "cut_directed", "coverage", "facility_location", "modular", "explicit_table")
CONSTRAINT_TYPES = ("matroids", "knapsacks", "base", "cardinality")
RANDOM_KINDS = {"cut-undirected": "cut_undirected", "cut-directed": "cut_directed", "coverage": "coverage",
                "facility": "facility_location", "modular": "modular"}
RANDOM_CONSTRAINTS = ("matroids", "partition", "knapsack", "base", "cardinality")


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False, allow_nan=False)


@dataclass
class InstanceFile:
    n: int
    function: dict
    constraints: dict
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 1:
            raise BadParams("instance needs at least one element")
        if self.function.get("kind") not in FUNCTION_KINDS:
            raise InvalidInstance(f"unknown function kind {self.function.get('kind')!r}")
        if self.constraints.get("type") not in CONSTRAINT_TYPES:
            raise InvalidInstance(f"unknown constraint type {self.constraints.get('type')!r}")

    def to_dict(self) -> dict:
        return {"n": self.n, "function": self.function, "constraints": self.constraints, "metadata": self.metadata}

    def to_json(self) -> str:
        return canonical_json(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "InstanceFile":
        try:
            return cls(int(d["n"]), dict(d["function"]), dict(d["constraints"]), dict(d.get("metadata", {})))
        except KeyError as exc:
            raise InvalidInstance(f"instance is missing field {exc}") from None

    @classmethod
    def from_json(cls, text: str) -> "InstanceFile":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidInstance(f"not a valid instance document: {exc}") from None
        return cls.from_dict(d)

    def fingerprint(self) -> str:
        return hashlib.sha256(self.to_json().encode("utf-8")).hexdigest()

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json() + "\n")

    @classmethod
    def load(cls, path) -> "InstanceFile":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read())

    def oracle(self) -> SubmodularOracle:
        fb = self.function
        kind = fb["kind"]
        if kind in ("cut_undirected", "cut_directed"):
            f = build_cut(self.n, fb["edges"], directed=kind == "cut_directed")
        elif kind == "coverage":
            f = build_coverage(fb["sets"], fb["universe_weights"])
        elif kind == "facility_location":
            f = build_facility_location(fb["profits"])
        elif kind == "modular":
            f = build_modular(fb["weights"], fb.get("offset", 0.0))
        else:
            f = build_explicit_table(self.n, fb["values"])
        if f.n != self.n:
            raise InvalidInstance(f"function block describes {f.n} elements, instance says {self.n}")
        return f

    @property
    def constraint_type(self) -> str:
        return self.constraints["type"]

    def matroids(self) -> list:
        c = self.constraints
        if c["type"] == "matroids":
            return [matroid_from_dict(m, self.n) for m in c["matroids"]]
        if c["type"] == "base":
            return [matroid_from_dict(c["matroid"], self.n)]
        if c["type"] == "cardinality":
            return [UniformMatroid(self.n, c["c"])]
        raise InvalidInstance("knapsack instances carry no matroids")

    def knapsacks(self) -> KnapsackSystem:
        if self.constraints["type"] != "knapsacks":
            raise InvalidInstance("instance has no knapsack constraints")
        ks = KnapsackSystem(self.constraints["weights"])
        if ks.n != self.n:
            raise InvalidInstance("knapsack weights do not match n")
        return ks

    def feasibility(self) -> FeasibilityPredicate:
        t = self.constraints["type"]
        if t == "matroids":
            return FeasibilityPredicate.matroids(self.n, self.matroids())
        if t == "knapsacks":
            return FeasibilityPredicate.knapsack(self.knapsacks())
        if t == "base":
            return FeasibilityPredicate.base(self.matroids()[0])
        return FeasibilityPredicate.cardinality(self.n, self.constraints["c"])


def gen_greedy_tight(k: int, p: int) -> InstanceFile:
    """Coverage family where greedy under k partition matroids gets ``p + 1``
    while ``p(k+1) + 1`` is attainable.

    Ground ids: 0 is ``S_0``, ``1..k`` are ``S_1..S_k``, ``k+1`` and ``k+2``
    are ``T_1`` and ``T_2``.  The universe has ``p(k+1) + 2`` points; the
    last one is in no set.
    """
    if k < 1 or p < 2:
        raise BadParams("need k >= 1 and p >= 2")
    sets = [list(range(0, p + 1))]
    sets += [list(range(p * i + 1, p * (i + 1) + 1)) for i in range(1, k + 1)]
    sets += [list(range(0, p)), [p]]
    n = k + 3
    universe = p * (k + 1) + 2
    matroids = []
    for j in range(1, k + 1):
        parts = [[0, j]] + [[e] for e in range(1, n) if e != j]
        matroids.append(PartitionMatroid(n, parts, [1] * len(parts)).to_dict())
    return InstanceFile(
        n,
        {"kind": "coverage", "sets": sets, "universe_weights": [1.0] * universe},
        {"type": "matroids", "matroids": matroids},
        {"name": "greedy_tight", "generator": "gen_greedy_tight", "params": {"k": k, "p": p},
         "greedy_value": p + 1, "opt_value": p * (k + 1) + 1},
    )


def gen_base_counterexample(n_side: int, t: int) -> InstanceFile:
    """Directed cut where the V side is a swap-local optimum among bases of
    the uniform matroid of rank ``n_side``, yet ``f(U) = t * f(V)``.

    ``U = 0..n_side-1``, ``V = n_side..2n_side-1``.  Each ``u_j`` sends one
    unit edge to ``v_j`` and ``t - 1`` more round-robin over the other
    V-vertices; each ``v_i`` sends one edge back to ``u_i``.  With
    ``t <= 2 n_side - 1`` no V-vertex receives more than two edges from a
    single u, which keeps every swap out of V non-improving.
    """
    if n_side < 1 or t < 2:
        raise BadParams("need n_side >= 1 and t >= 2")
    edges = []
    for j in range(n_side):
        edges.append([j, n_side + j, 1.0])
        others = [i for i in range(n_side) if i != j]
        for r in range(t - 1):
            target = others[r % len(others)] if others else j
            edges.append([j, n_side + target, 1.0])
    for i in range(n_side):
        edges.append([n_side + i, i, 1.0])
    n = 2 * n_side
    return InstanceFile(
        n,
        {"kind": "cut_directed", "edges": edges},
        {"type": "base", "matroid": UniformMatroid(n, n_side).to_dict()},
        {"name": "base_counterexample", "generator": "gen_base_counterexample",
         "params": {"n_side": n_side, "t": t}, "U": list(range(n_side)), "V": list(range(n_side, n))},
    )


def _round(x) -> list:
    return [round(float(v), 4) for v in np.ravel(x)]


def _random_function(kind, n, density, rng) -> dict:
    if kind in ("cut_undirected", "cut_directed"):
        edges = []
        for u in range(n):
            for v in range(n):
                if u == v or (kind == "cut_undirected" and v < u):
                    continue
                if rng.random() < density:
                    edges.append([u, v, round(float(rng.uniform(0.1, 1.0)), 4)])
        if not edges and n > 1:
            edges.append([0, 1, 1.0])
        return {"kind": kind, "edges": edges}
    if kind == "coverage":
        m = 2 * n
        sets = []
        for _ in range(n):
            s = [j for j in range(m) if rng.random() < density]
            sets.append(s or [int(rng.integers(m))])
        return {"kind": kind, "sets": sets, "universe_weights": _round(rng.uniform(0.1, 1.0, m))}
    if kind == "facility_location":
        profits = rng.uniform(0.0, 1.0, (n, n)) * (rng.random((n, n)) < density)
        return {"kind": kind, "profits": [_round(row) for row in profits]}
    return {"kind": "modular", "weights": _round(rng.uniform(0.0, 1.0, n)), "offset": 0.0}


def _random_matroid(n, rng, family) -> dict:
    if family == "uniform":
        return UniformMatroid(n, int(rng.integers(1, max(1, n // 2) + 1))).to_dict()
    if family == "partition":
        groups = int(rng.integers(2, max(2, n // 2) + 1))
        labels = rng.integers(0, groups, n)
        parts = [[int(e) for e in np.nonzero(labels == g)[0]] for g in range(groups)]
        parts = [p for p in parts if p]
        caps = [int(rng.integers(1, 3)) for _ in parts]
        return PartitionMatroid(n, parts, caps).to_dict()
    verts = max(2, n // 2 + 1)
    edges = []
    for _ in range(n):
        u, v = rng.choice(verts, 2, replace=False)
        edges.append([int(u), int(v)])
    return {"kind": "graphic", "edges": edges, "ground": list(range(n))}


def gen_random(kind: str, n: int, k: int = 1, density: float = 0.5, seed: int = 0,
               constraint: str = "matroids") -> InstanceFile:
    """Seeded random instance; ``kind`` names the objective and
    ``constraint`` the family (``matroids``, ``partition``, ``knapsack``,
    ``base`` or ``cardinality``)."""
    if kind not in RANDOM_KINDS:
        raise BadParams(f"kind must be one of {sorted(RANDOM_KINDS)}")
    if constraint not in RANDOM_CONSTRAINTS:
        raise BadParams(f"constraint must be one of {RANDOM_CONSTRAINTS}")
    if n < 1 or k < 1 or not 0 < density <= 1:
        raise BadParams("need n >= 1, k >= 1 and 0 < density <= 1")
    rng = np.random.default_rng(seed)
    fkind = RANDOM_KINDS[kind]
    fb = _random_function(fkind, n, density, rng)
    if constraint == "matroids":
        fams = ["uniform", "partition", "graphic"]
        cb = {"type": "matroids", "matroids": [_random_matroid(n, rng, fams[int(rng.integers(3))]) for _ in range(k)]}
    elif constraint == "partition":
        cb = {"type": "matroids", "matroids": [_random_matroid(n, rng, "partition") for _ in range(k)]}
    elif constraint == "knapsack":
        w = rng.uniform(0.05, 0.6, (k, n))
        cb = {"type": "knapsacks", "weights": [_round(row) for row in w]}
    elif constraint == "base":
        r = int(rng.integers(1, max(1, n // 2) + 1))
        cb = {"type": "base", "matroid": UniformMatroid(n, r).to_dict()}
    else:
        cb = {"type": "cardinality", "c": int(rng.integers(0, n + 1))}
    meta = {"name": f"random-{kind}-{constraint}", "generator": "gen_random",
            "params": {"kind": kind, "n": n, "k": k, "density": density, "constraint": constraint}, "seed": seed}
    return InstanceFile(n, fb, cb, meta)
