"""Slow, obviously-correct reference computations used as test oracles.

Nothing here imports the package under test.
"""
import itertools
import math


def subsets(elems):
    elems = list(elems)
    for r in range(len(elems) + 1):
        for c in itertools.combinations(elems, r):
            yield frozenset(c)


def cut_value(edges, s, directed=False):
    total = 0.0
    for e in edges:
        u, v = e[0], e[1]
        w = e[2] if len(e) > 2 else 1.0
        if directed:
            total += w if (u in s and v not in s) else 0.0
        else:
            total += w if ((u in s) != (v in s)) else 0.0
    return total


def coverage_value(sets, weights, s):
    covered = set()
    for i in s:
        covered |= set(sets[i])
    return float(sum(weights[j] for j in covered))


def facility_value(profits, s):
    if not s:
        return 0.0
    return float(sum(max(row[j] for j in s) for row in profits))


def brute_max(n, value, feasible):
    """Max over feasible subsets; ties to the lexicographically smallest tuple."""
    best, best_v = None, -math.inf
    for s in subsets(range(n)):
        if not feasible(s):
            continue
        v = value(s)
        if v > best_v + 1e-12 or (abs(v - best_v) <= 1e-12 and tuple(sorted(s)) < tuple(sorted(best))):
            best, best_v = s, v
    return best, best_v


def multilinear(n, value, y):
    total = 0.0
    for s in subsets(range(n)):
        p = 1.0
        for i in range(n):
            p *= y[i] if i in s else 1.0 - y[i]
        if p:
            total += p * value(s)
    return total


def is_submodular(n, value, tol=1e-9):
    sets = list(subsets(range(n)))
    for a in sets:
        for b in sets:
            if value(a | b) + value(a & b) > value(a) + value(b) + tol:
                return False
    return True


def forest(edges, s):
    parent = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            x = parent[x]
        return x

    for e in s:
        u, v = edges[e]
        ru, rv = find(u), find(v)
        if ru == rv:
            return False
        parent[ru] = rv
    return True
