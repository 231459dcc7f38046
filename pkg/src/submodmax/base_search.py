"""Maximization over matroid bases: swap search, the two-disjoint-bases
algorithm, and exact-cardinality constraints."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .errors import DependentInput, InternalContradiction, NoTwoBases
from .ground import SubmodularOracle, complement_oracle
from .matroid import Matroid, UniformMatroid, find_two_disjoint_bases
from .search import Move, SearchConfig, SolutionReport, _Pivot, procedure_b


@dataclass
class BaseConstraint:
    matroid: Matroid
    full_rank: int = field(init=False)

    def __post_init__(self):
        self.full_rank = self.matroid.full_rank()

    def is_feasible(self, s) -> bool:
        s = frozenset(s)
        return len(s) == self.full_rank and self.matroid.is_independent(s)


def _calls(f, before):
    now = f.counts()
    return {k: now[k] - before[k] for k in before}


def greedy_initial_base(f: SubmodularOracle, m: Matroid) -> frozenset:
    order = sorted(m.ground, key=lambda e: (-f.evaluate({e}), e))
    return m.greedy_base(order)


def swap_base_search(f: SubmodularOracle, bc: BaseConstraint, cfg: Optional[SearchConfig] = None,
                     initial=None) -> SolutionReport:
    """Improve a base by single swaps until no swap gains the required factor."""
    cfg = cfg or SearchConfig()
    m = bc.matroid
    calls0 = f.counts()
    S = frozenset(initial) if initial is not None else greedy_initial_base(f, m)
    if not bc.is_feasible(S):
        raise DependentInput(f"initial set {sorted(S)} is not a base")
    factor = cfg.factor(f.n)
    fS = f.evaluate(S)
    moves = []
    cap = cfg.move_cap if cfg.move_cap is not None else 10 * cfg.move_bound(f.n) + 10
    outside = sorted(m.ground - S)
    while len(moves) < cap:
        piv = _Pivot()
        need = factor * fS
        for d in outside:
            for e in sorted(S):
                T = (S - {e}) | {d}
                if not m.is_independent(T):
                    continue
                val = f.evaluate(T)
                if val > need:
                    piv.offer(val, ((d,), (e,)), (d, e))
        if piv.payload is None:
            break
        d, e = piv.payload
        S = (S - {e}) | {d}
        moves.append(Move("swap", (d,), (e,), fS, piv.value))
        fS = piv.value
        outside = sorted(m.ground - S)
    meta = {"factor": factor, "epsilon": cfg.epsilon, "scaling_exponent": cfg.scaling_exponent,
            "capped": len(moves) >= cap}
    return SolutionReport(S, fS, _calls(f, calls0), moves, [], frozenset(m.ground), meta)


def two_base_algorithm(f: SubmodularOracle, bc: BaseConstraint,
                       cfg: Optional[SearchConfig] = None) -> SolutionReport:
    """Best of a swap-local base and two completions of a delete/exchange
    local optimum found outside it."""
    cfg = cfg or SearchConfig()
    m = bc.matroid
    if find_two_disjoint_bases(m) is None:
        raise NoTwoBases("matroid does not contain two disjoint bases")
    calls0 = f.counts()
    first = swap_base_search(f, bc, cfg)
    S1 = first.solution
    second = procedure_b(f, m.ground - S1, [m], cfg)
    S2 = second.solution
    contracted = m.contract(S2)
    pair = find_two_disjoint_bases(contracted)
    if pair is None:
        raise InternalContradiction("contraction lost the two disjoint bases")
    B1, B2 = pair
    candidates = [S1, S2 | B1, S2 | B2]
    for c in candidates:
        if not bc.is_feasible(c):
            raise InternalContradiction(f"candidate {sorted(c)} is not a base")
    values = [f.evaluate(c) for c in candidates]
    best = max(range(3), key=lambda i: (values[i], -i))
    meta = {"S1": sorted(S1), "S2": sorted(S2), "B1": sorted(B1), "B2": sorted(B2),
            "candidate_values": values, "best_candidate": best, "epsilon": cfg.epsilon,
            "scaling_exponent": cfg.scaling_exponent}
    return SolutionReport(candidates[best], values[best], _calls(f, calls0),
                          list(first.moves) + list(second.moves), [first, second],
                          frozenset(m.ground), meta)


def exact_cardinality(f: SubmodularOracle, c: int, cfg: Optional[SearchConfig] = None) -> SolutionReport:
    """Maximize over sets of size exactly ``c``; uses the complement
    objective when ``c > n / 2``."""
    n = f.n
    if not 0 <= c <= n:
        raise ValueError(f"cardinality {c} outside 0..{n}")
    cfg = cfg or SearchConfig()
    calls0 = f.counts()
    if 2 * c <= n:
        rep = two_base_algorithm(f, BaseConstraint(UniformMatroid(n, c)), cfg)
        sol, path = rep.solution, "direct"
    else:
        g = complement_oracle(f)
        rep = two_base_algorithm(g, BaseConstraint(UniformMatroid(n, n - c)), cfg)
        sol, path = frozenset(range(n)) - rep.solution, "complement"
    meta = {"path": path, "c": c, "epsilon": cfg.epsilon, "scaling_exponent": cfg.scaling_exponent}
    value = f.evaluate(sol)
    calls = _calls(f, calls0)
    if path == "complement":
        calls = {k: calls[k] + rep.oracle_calls[k] for k in calls}
    return SolutionReport(sol, value, calls, list(rep.moves), [rep],
                          frozenset(range(n)), meta)
