"""Experiment runner: algorithm registry, run records and certificates."""
from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

from .base_search import BaseConstraint, exact_cardinality, swap_base_search, two_base_algorithm
from .errors import KindMismatch
from .instances import InstanceFile, canonical_json
from .knapsack import FracSearchConfig, knapsack_algorithm
from .matroid import PartitionMatroid
from .search import (
    SearchConfig,
    algorithm_a,
    greedy_baseline,
    p_exchange_search,
    partition_algorithm,
    procedure_b,
    symmetric_algorithm,
)
from .verify import (
    CERT_MAX_N,
    certify_matroid_local_lemma,
    certify_partition_lemma,
    measure_ratio,
)

RATIO_MAX_N = 16


@dataclass(frozen=True)
class RunConfig:
    epsilon: float = 0.05
    scaling_exponent: int = 4
    p: Optional[int] = None
    eta: float = 0.1
    zeta: Optional[float] = None
    trials: int = 200
    seed: int = 0
    certify: bool = False
    monotone: bool = False
    c: Optional[float] = None
    delta_heavy: Optional[float] = None
    eps_round: Optional[float] = None
    heavy_cap: int = 4

    def search(self) -> SearchConfig:
        return SearchConfig(epsilon=self.epsilon, scaling_exponent=self.scaling_exponent, p=self.p or 1)

    def fractional(self) -> FracSearchConfig:
        return FracSearchConfig(zeta=self.zeta, eta=self.eta, c=self.c, delta_heavy=self.delta_heavy,
                                eps_round=self.eps_round, trials=self.trials, heavy_cap=self.heavy_cap,
                                seed=self.seed)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class RunRecord:
    fingerprint: str
    algorithm: str
    config: dict
    solution: list
    value: float
    oracle_calls: dict
    wall_time: float
    certificates: list = field(default_factory=list)
    seed: int = 0
    meta: dict = field(default_factory=dict)

    def to_dict(self, with_time: bool = True) -> dict:
        d = asdict(self)
        if not with_time:
            d.pop("wall_time")
        return d

    def to_json(self) -> str:
        return canonical_json(self.to_dict())

    def replay_bytes(self) -> bytes:
        """Canonical bytes excluding wall time; equal across replays."""
        return canonical_json(self.to_dict(with_time=False)).encode("utf-8")

    @property
    def certified(self) -> bool:
        return all(c["passed"] for c in self.certificates if c.get("binding", True))


def _partitions(matroids):
    if not all(isinstance(m, PartitionMatroid) for m in matroids):
        raise KindMismatch("algorithm needs partition matroids")
    return matroids


def _run_algorithm_a(inst, f, cfg):
    return algorithm_a(f, inst.matroids(), cfg.search())


def _run_procedure_b(inst, f, cfg):
    return procedure_b(f, None, inst.matroids(), cfg.search())


def _run_symmetric(inst, f, cfg):
    return symmetric_algorithm(f, inst.matroids(), cfg.search())


def _run_partition(inst, f, cfg):
    return partition_algorithm(f, _partitions(inst.matroids()), cfg.epsilon, cfg.monotone, cfg.search(), p=cfg.p)


def _run_p_exchange(inst, f, cfg):
    return p_exchange_search(f, _partitions(inst.matroids()), cfg.search())


def _run_greedy(inst, f, cfg):
    return greedy_baseline(f, inst.matroids())


def _run_swap_base(inst, f, cfg):
    return swap_base_search(f, BaseConstraint(inst.matroids()[0]), cfg.search())


def _run_two_base(inst, f, cfg):
    return two_base_algorithm(f, BaseConstraint(inst.matroids()[0]), cfg.search())


def _run_cardinality(inst, f, cfg):
    return exact_cardinality(f, inst.constraints["c"], cfg.search())


def _run_knapsack(inst, f, cfg):
    return knapsack_algorithm(f, inst.knapsacks(), cfg.eta, cfg.fractional())


# name -> (runner, accepted constraint types)
ALGORITHMS = {
    "algorithm_a": (_run_algorithm_a, {"matroids"}),
    "procedure_b": (_run_procedure_b, {"matroids"}),
    "symmetric": (_run_symmetric, {"matroids"}),
    "partition": (_run_partition, {"matroids"}),
    "p_exchange": (_run_p_exchange, {"matroids"}),
    "greedy": (_run_greedy, {"matroids"}),
    "swap_base": (_run_swap_base, {"base"}),
    "two_base": (_run_two_base, {"base"}),
    "exact_cardinality": (_run_cardinality, {"cardinality"}),
    "knapsack": (_run_knapsack, {"knapsacks"}),
}


def _threshold(name, inst, rep, cfg):
    """Guaranteed ratio and whether the guarantee applies to this instance."""
    eps = cfg.epsilon
    if name in ("algorithm_a", "procedure_b", "symmetric", "greedy", "partition", "p_exchange"):
        k = len(inst.matroids())
    if name == "algorithm_a":
        return k / ((1 + eps) * (k + 1) ** 2), True
    if name == "symmetric":
        return 1.0 / ((1 + eps) * (k + 2)), inst.function["kind"] == "cut_undirected"
    if name == "partition":
        p = rep.meta["p"]
        if cfg.monotone:
            return (1 - 1.0 / p) / k, True
        return (k - 1) / ((1 + 1.0 / (p - 1)) * k ** 2), True
    if name == "greedy":
        return 1.0 / (k + 1), False
    if name == "swap_base":
        return 1.0 / (3 * (1 + eps)), inst.function["kind"] == "cut_undirected"
    if name in ("two_base", "exact_cardinality"):
        return 1.0 / (6 * (1 + eps)), True
    if name == "knapsack":
        return 0.2 - cfg.eta, False
    return 0.0, False


def local_search_moves(name, rep) -> list:
    """Improving-move counts of every delete/exchange local search inside a run."""
    if name == "algorithm_a":
        return [r.n_moves for r in rep.iterations]
    if name in ("procedure_b", "symmetric"):
        return [rep.n_moves]
    if name == "two_base":
        return [rep.iterations[1].n_moves]
    if name == "exact_cardinality":
        return [rep.iterations[0].iterations[1].n_moves]
    return []


def attach_certificates(name, inst, f, rep, cfg) -> list:
    """Local-optimality certificates and the brute-force ratio, where sizes allow."""
    out = []
    n = inst.n
    if n <= CERT_MAX_N and name in ("algorithm_a", "procedure_b", "symmetric"):
        ms = inst.matroids()
        rounds = rep.iterations if name == "algorithm_a" else [rep]
        for i, r in enumerate(rounds):
            c = certify_matroid_local_lemma(f, r.solution, ms, cfg.epsilon, ground=r.ground).to_dict()
            c.update(round=i, binding=True)
            out.append(c)
    if n <= CERT_MAX_N and name in ("partition", "p_exchange"):
        ms = inst.matroids()
        p = rep.meta["p"]
        rounds = rep.iterations if name == "partition" else [rep]
        for i, r in enumerate(rounds):
            c = certify_partition_lemma(f, r.solution, ms, p, cfg.epsilon, ground=r.ground).to_dict()
            c.update(round=i, binding=True)
            out.append(c)
    if n <= CERT_MAX_N and name == "swap_base":
        c = certify_matroid_local_lemma(f, rep.solution, inst.matroids(), cfg.epsilon, swap=True).to_dict()
        c.update(binding=True)
        out.append(c)
    if n <= RATIO_MAX_N and name in ALGORITHMS:
        threshold, binding = _threshold(name, inst, rep, cfg)
        r = measure_ratio(rep, f, inst.feasibility(), threshold, fingerprint=inst.fingerprint(), seed=cfg.seed)
        d = r.to_dict()
        d.update(name="ratio", binding=binding)
        out.append(d)
    return out


def run_one(inst: InstanceFile, algorithm: str, cfg: RunConfig) -> RunRecord:
    if algorithm not in ALGORITHMS:
        raise KindMismatch(f"unknown algorithm {algorithm!r}; choose from {sorted(ALGORITHMS)}")
    fn, types = ALGORITHMS[algorithm]
    if inst.constraint_type not in types:
        raise KindMismatch(f"{algorithm} does not handle {inst.constraint_type} constraints")
    f = inst.oracle()
    t0 = time.perf_counter()
    rep = fn(inst, f, cfg)
    wall = time.perf_counter() - t0
    certs = attach_certificates(algorithm, inst, f, rep, cfg) if cfg.certify else []
    meta = {k: v for k, v in rep.meta.items() if isinstance(v, (int, float, str, bool, list, type(None)))}
    meta["n_moves"] = rep.n_moves
    searches = local_search_moves(algorithm, rep)
    if searches:
        meta["local_search_moves"] = searches
        meta["move_bound"] = cfg.search().move_bound(inst.n)
    return RunRecord(inst.fingerprint(), algorithm, cfg.to_dict(), sorted(int(e) for e in rep.solution),
                     float(rep.value), dict(rep.oracle_calls), wall, certs, cfg.seed, meta)


def run_experiment(instances: Sequence[InstanceFile], algorithms: Sequence[str], config: Optional[RunConfig] = None,
                   workers: int = 1) -> list:
    """Every (instance, algorithm) pair; output ordered by instance then algorithm."""
    cfg = config or RunConfig()
    tasks = [(inst, alg) for inst in instances for alg in algorithms]
    if workers <= 1 or len(tasks) <= 1:
        return [run_one(inst, alg, cfg) for inst, alg in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda t: run_one(t[0], t[1], cfg), tasks))


def replay(record: RunRecord, inst: InstanceFile) -> RunRecord:
    """Re-run a record's (instance, algorithm, config, seed)."""
    if inst.fingerprint() != record.fingerprint:
        raise KindMismatch("instance fingerprint does not match the record")
    return run_one(inst, record.algorithm, RunConfig(**record.config))
