"""Matroid independence oracles, contraction, exchange maps and disjoint bases."""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import (
    DependentContraction,
    DependentInput,
    InternalContradiction,
    NotAMatroid,
    TooLarge,
)
from .ground import from_mask, to_mask

EXPLICIT_MAX_N = 16


class Matroid:
    """Base class.  ``n`` is the id universe; ``ground`` the elements the
    matroid is defined on (a subset after contraction)."""

    kind = "abstract"

    def __init__(self, n: int, ground: Optional[Iterable[int]] = None):
        self.n = int(n)
        self.ground = frozenset(range(self.n)) if ground is None else frozenset(ground)

    def _indep(self, s: frozenset) -> bool:
        raise NotImplementedError

    def is_independent(self, s) -> bool:
        s = frozenset(s)
        if not s <= self.ground:
            return False
        return self._indep(s)

    def rank(self, s=None) -> int:
        """Size of a maximal independent subset, built greedily."""
        items = sorted(self.ground if s is None else frozenset(s) & self.ground)
        basis: set = set()
        for e in items:
            basis.add(e)
            if not self._indep(frozenset(basis)):
                basis.discard(e)
        return len(basis)

    def full_rank(self) -> int:
        return self.rank()

    def is_base(self, s) -> bool:
        s = frozenset(s)
        return self.is_independent(s) and len(s) == self.full_rank()

    def greedy_base(self, order: Sequence[int]) -> frozenset:
        basis: set = set()
        for e in order:
            if e in self.ground and e not in basis and self._indep(frozenset(basis | {e})):
                basis.add(e)
        return frozenset(basis)

    def contract(self, s) -> "Matroid":
        s = frozenset(s)
        if not self.is_independent(s):
            raise DependentContraction(f"cannot contract dependent set {sorted(s)}")
        return self._contract(s)

    def _contract(self, s: frozenset) -> "Matroid":
        return ContractedMatroid(self, s)

    def to_dict(self) -> dict:
        raise NotImplementedError


class UniformMatroid(Matroid):
    kind = "uniform"

    def __init__(self, n: int, r: int, ground=None):
        super().__init__(n, ground)
        if r < 0:
            raise NotAMatroid("rank must be non-negative")
        self.r = int(r)

    def _indep(self, s):
        return len(s) <= self.r

    def rank(self, s=None):
        size = len(self.ground) if s is None else len(frozenset(s) & self.ground)
        return min(self.r, size)

    def _contract(self, s):
        return UniformMatroid(self.n, self.r - len(s), self.ground - s)

    def to_dict(self):
        return {"kind": "uniform", "rank": self.r, "ground": sorted(self.ground)}

    def __repr__(self):
        return f"UniformMatroid(n={self.n}, r={self.r})"


class PartitionMatroid(Matroid):
    """Parts must partition ``ground``; at most ``capacities[j]`` from part j."""

    kind = "partition"

    def __init__(self, n: int, parts: Sequence[Iterable[int]], capacities: Sequence[int], ground=None):
        parts = [frozenset(int(e) for e in p) for p in parts]
        if ground is None:
            ground = frozenset().union(*parts) if parts else frozenset()
            if ground != frozenset(range(n)):
                raise NotAMatroid("parts must cover every element")
        super().__init__(n, ground)
        if len(parts) != len(capacities):
            raise NotAMatroid("one capacity per part")
        seen: set = set()
        for p in parts:
            if p & seen:
                raise NotAMatroid("parts overlap")
            seen |= p
        if frozenset(seen) != self.ground:
            raise NotAMatroid("parts must partition the ground set")
        if any(c < 0 for c in capacities):
            raise NotAMatroid("capacities must be non-negative")
        self.parts = parts
        self.capacities = [int(c) for c in capacities]
        self.part_of = {e: j for j, p in enumerate(parts) for e in p}

    def _indep(self, s):
        counts = [0] * len(self.parts)
        for e in s:
            j = self.part_of[e]
            counts[j] += 1
            if counts[j] > self.capacities[j]:
                return False
        return True

    def rank(self, s=None):
        s = self.ground if s is None else frozenset(s) & self.ground
        return sum(min(c, len(p & s)) for p, c in zip(self.parts, self.capacities))

    def overflow(self, s) -> dict:
        """Part index -> number of elements above capacity."""
        counts: dict = {}
        for e in s:
            j = self.part_of[e]
            counts[j] = counts.get(j, 0) + 1
        return {j: c - self.capacities[j] for j, c in counts.items() if c > self.capacities[j]}

    def _contract(self, s):
        caps = [c - len(p & s) for p, c in zip(self.parts, self.capacities)]
        return PartitionMatroid(self.n, [p - s for p in self.parts], caps, self.ground - s)

    def to_dict(self):
        return {"kind": "partition", "parts": [sorted(p) for p in self.parts],
                "capacities": list(self.capacities), "ground": sorted(self.ground)}

    def __repr__(self):
        return f"PartitionMatroid(n={self.n}, parts={len(self.parts)})"


def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


class GraphicMatroid(Matroid):
    """Element ``i`` is edge ``edges[i]``; independent sets are forests."""

    kind = "graphic"

    def __init__(self, edges: Sequence, ground=None):
        self.edges = [(int(u), int(v)) for u, v in edges]
        super().__init__(len(self.edges), ground)

    def _indep(self, s):
        parent: dict = {}
        for e in s:
            u, v = self.edges[e]
            parent.setdefault(u, u)
            parent.setdefault(v, v)
            ru, rv = _find(parent, u), _find(parent, v)
            if ru == rv:
                return False
            parent[ru] = rv
        return True

    def _contract(self, s):
        parent: dict = {}
        for e in s:
            u, v = self.edges[e]
            parent.setdefault(u, u)
            parent.setdefault(v, v)
            parent[_find(parent, u)] = _find(parent, v)

        def rep(x):
            return _find(parent, x) if x in parent else x

        return GraphicMatroid([(rep(u), rep(v)) for u, v in self.edges], self.ground - s)

    def to_dict(self):
        return {"kind": "graphic", "edges": [list(e) for e in self.edges], "ground": sorted(self.ground)}

    def __repr__(self):
        return f"GraphicMatroid(edges={len(self.edges)})"


class ExplicitMatroid(Matroid):
    """Matroid given by its full family of independent sets (n <= 16).

    Construction verifies that the family contains the empty set, is closed
    under taking subsets, and satisfies the augmentation axiom.
    """

    kind = "explicit"

    def __init__(self, n: int, independent_sets: Iterable[Iterable[int]], ground=None, check: bool = True):
        if n > EXPLICIT_MAX_N:
            raise TooLarge(f"explicit matroids limited to n <= {EXPLICIT_MAX_N}")
        super().__init__(n, ground)
        self.family = frozenset(to_mask(s) for s in independent_sets)
        if check:
            self._check_axioms()

    def _check_axioms(self):
        fam = self.family
        if 0 not in fam:
            raise NotAMatroid("empty set must be independent")
        gmask = to_mask(self.ground)
        for m in fam:
            if m & ~gmask:
                raise NotAMatroid(f"independent set {sorted(from_mask(m))} leaves the ground set")
            b = m
            while b:
                low = b & -b
                if m & ~low not in fam:
                    raise NotAMatroid(f"family not closed under subsets at {sorted(from_mask(m))}")
                b ^= low
        by_size: dict = {}
        for m in fam:
            by_size.setdefault(bin(m).count("1"), []).append(m)
        for a in fam:
            sa = bin(a).count("1")
            for size, group in by_size.items():
                if size <= sa:
                    continue
                for b in group:
                    diff = b & ~a
                    ok = False
                    while diff:
                        low = diff & -diff
                        if a | low in fam:
                            ok = True
                            break
                        diff ^= low
                    if not ok:
                        raise NotAMatroid(
                            f"augmentation fails for {sorted(from_mask(a))} vs {sorted(from_mask(b))}")

    def _indep(self, s):
        return to_mask(s) in self.family

    def _contract(self, s):
        sm = to_mask(s)
        fam = [m & ~sm for m in self.family if m & sm == sm]
        return ExplicitMatroid(self.n, [from_mask(m) for m in fam], self.ground - s, check=False)

    def to_dict(self):
        return {"kind": "explicit", "n": self.n,
                "independent_sets": sorted(sorted(from_mask(m)) for m in self.family),
                "ground": sorted(self.ground)}

    def __repr__(self):
        return f"ExplicitMatroid(n={self.n}, |I|={len(self.family)})"


class ContractedMatroid(Matroid):
    def __init__(self, base: Matroid, s: frozenset):
        super().__init__(base.n, base.ground - s)
        self.base = base
        self.contracted = frozenset(s)
        self.kind = f"{base.kind}/contracted"

    def _indep(self, s):
        return self.base._indep(s | self.contracted)

    def _contract(self, s):
        return ContractedMatroid(self.base, self.contracted | s)

    def to_dict(self):
        return {"kind": "contracted", "base": self.base.to_dict(), "contracted": sorted(self.contracted)}


def matroid_from_dict(d: dict, n: int) -> Matroid:
    kind = d["kind"]
    ground = d.get("ground")
    if kind == "uniform":
        return UniformMatroid(n, d["rank"], ground)
    if kind == "partition":
        return PartitionMatroid(n, d["parts"], d["capacities"], ground)
    if kind == "graphic":
        return GraphicMatroid(d["edges"], ground)
    if kind == "explicit":
        return ExplicitMatroid(n, d["independent_sets"], ground)
    if kind == "contracted":
        return matroid_from_dict(d["base"], n).contract(d["contracted"])
    raise ValueError(f"unknown matroid kind {kind!r}")


def is_independent(m: Matroid, s) -> bool:
    return m.is_independent(s)


def rank(m: Matroid, s=None) -> int:
    return m.rank(s)


def contract(m: Matroid, s) -> Matroid:
    return m.contract(s)


@dataclass
class ExchangeMap:
    """``assignments[b]`` is the element of ``I \\ J`` displaced by ``b``,
    or ``None`` for the empty choice."""

    assignments: dict

    def images(self) -> list:
        return [e for e in self.assignments.values() if e is not None]

    def is_bijection(self) -> bool:
        return all(e is not None for e in self.assignments.values())

    def check(self, m: Matroid, i_set, j_set) -> bool:
        I, J = frozenset(i_set), frozenset(j_set)
        if set(self.assignments) != set(J - I):
            return False
        imgs = self.images()
        if len(imgs) != len(set(imgs)) or not set(imgs) <= I - J:
            return False
        for b, e in self.assignments.items():
            t = (I - {e}) | {b} if e is not None else I | {b}
            if not m.is_independent(t):
                return False
        return True


def _augment(b, adj, match_of, seen) -> bool:
    for e in adj[b]:
        if e in seen:
            continue
        seen.add(e)
        if e not in match_of or _augment(match_of[e], adj, match_of, seen):
            match_of[e] = b
            return True
    return False


def exchange_map(m: Matroid, i_set, j_set) -> ExchangeMap:
    """Map each ``b`` in ``J \\ I`` to a distinct element of ``I \\ J`` (or None)
    such that swapping it into ``I`` keeps independence.

    Elements that can be added to ``I`` outright take ``None``; the rest are
    matched by augmenting paths, lowest ids first.  When ``|I| == |J|`` the
    map is a bijection onto ``I \\ J``.
    """
    I, J = frozenset(i_set), frozenset(j_set)
    if not m.is_independent(I) or not m.is_independent(J):
        raise DependentInput("exchange_map needs two independent sets")
    bs = sorted(J - I)
    es = sorted(I - J)
    equal = len(I) == len(J)
    assignments: dict = {}
    to_match = []
    for b in bs:
        if not equal and m.is_independent(I | {b}):
            assignments[b] = None
        else:
            to_match.append(b)
    adj = {b: [e for e in es if m.is_independent((I - {e}) | {b})] for b in to_match}
    match_of: dict = {}
    for b in to_match:
        if not _augment(b, adj, match_of, set()):
            raise InternalContradiction(f"no exchange partner for {b}; oracle is not a matroid")
    for e, b in match_of.items():
        assignments[b] = e
    out = ExchangeMap(dict(sorted(assignments.items())))
    if not out.check(m, I, J):
        raise InternalContradiction("exchange map failed verification")
    return out


def _union_bases(m: Matroid) -> Optional[tuple]:
    """Matroid partitioning over two copies by shortest augmenting paths."""
    ground = sorted(m.ground)
    r = m.full_rank()
    sets = [set(), set()]
    owner: dict = {}
    rounds = 0
    cap = max(1, len(ground)) ** 2
    for x in ground:
        if len(sets[0]) == r and len(sets[1]) == r:
            break
        rounds += 1
        if rounds > cap:
            raise InternalContradiction("disjoint-base search exceeded its round cap")
        # BFS over elements; edge y -> z when z in copy i and copy_i - z + y independent
        prev = {x: None}
        queue = deque([x])
        sink = None
        while queue and sink is None:
            y = queue.popleft()
            for i in (0, 1):
                if owner.get(y) == i:
                    continue
                if m.is_independent(sets[i] | {y}):
                    sink = (y, i)
                    break
            if sink:
                break
            for i in (0, 1):
                if owner.get(y) == i:
                    continue
                for z in sorted(sets[i]):
                    if z in prev:
                        continue
                    if m.is_independent((sets[i] - {z}) | {y}):
                        prev[z] = y
                        queue.append(z)
        if sink is None:
            continue
        y, i = sink
        # walk back: y enters copy i; every predecessor enters the copy its successor leaves
        chain = [y]
        while prev[chain[-1]] is not None:
            chain.append(prev[chain[-1]])
        moves = [(y, i)]
        for k in range(len(chain) - 1):
            z, p = chain[k], chain[k + 1]
            moves.append((p, owner[z]))
        for e, _ in moves:
            if e in owner:
                sets[owner[e]].discard(e)
        for e, i_ in moves:
            sets[i_].add(e)
            owner[e] = i_
        if not (m.is_independent(sets[0]) and m.is_independent(sets[1])):
            raise InternalContradiction("augmentation produced a dependent set")
    if len(sets[0]) == r and len(sets[1]) == r:
        return frozenset(sets[0]), frozenset(sets[1])
    return None


def find_two_disjoint_bases(m: Matroid) -> Optional[tuple]:
    """Two disjoint bases ``(B1, B2)`` of ``m``, or ``None`` if none exist."""
    ground = sorted(m.ground)
    if isinstance(m, UniformMatroid):
        r = m.rank()
        if 2 * r > len(ground):
            return None
        return frozenset(ground[:r]), frozenset(ground[r:2 * r])
    if isinstance(m, PartitionMatroid):
        b1, b2 = set(), set()
        for p, c in zip(m.parts, m.capacities):
            elems = sorted(p)
            take = min(c, len(elems))
            if 2 * take > len(elems):
                return None
            b1.update(elems[:take])
            b2.update(elems[take:2 * take])
        return frozenset(b1), frozenset(b2)
    return _union_bases(m)


def all_bases(m: Matroid) -> list:
    """Every base, by exhaustive enumeration (small ground sets only)."""
    r = m.full_rank()
    return [frozenset(c) for c in itertools.combinations(sorted(m.ground), r) if m._indep(frozenset(c))]
