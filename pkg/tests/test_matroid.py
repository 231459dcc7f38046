import itertools

import numpy as np
import pytest

from reference import forest, subsets
from submodmax import (
    ExplicitMatroid,
    GraphicMatroid,
    PartitionMatroid,
    UniformMatroid,
    contract,
    exchange_map,
    find_two_disjoint_bases,
    is_independent,
    rank,
)
from submodmax.errors import DependentContraction, DependentInput, NotAMatroid, TooLarge
from submodmax.matroid import ExchangeMap, all_bases, matroid_from_dict

TRIANGLE = [(0, 1), (1, 2), (0, 2)]


def uniform_family(n, r):
    return [c for k in range(r + 1) for c in itertools.combinations(range(n), k)]


def test_is_independent_examples():
    assert not is_independent(UniformMatroid(4, 2), {0, 1, 2})
    assert is_independent(PartitionMatroid(4, [{0, 1}, {2, 3}], [1, 1]), {0, 2})
    assert not is_independent(GraphicMatroid(TRIANGLE), {0, 1, 2})
    assert is_independent(UniformMatroid(4, 2), set())


def test_rank_examples():
    assert rank(UniformMatroid(5, 2), range(5)) == 2
    assert rank(GraphicMatroid(TRIANGLE), {0, 1, 2}) == 2
    pm = PartitionMatroid(5, [{0, 1}, {2, 3, 4}], [1, 2])
    assert rank(pm, range(5)) == 3


def test_graphic_matches_reference_forest_check():
    rng = np.random.default_rng(0)
    for _ in range(20):
        edges = [tuple(int(v) for v in rng.choice(5, 2, replace=False)) for _ in range(7)]
        g = GraphicMatroid(edges)
        for s in subsets(range(7)):
            assert g.is_independent(s) == forest(edges, s)


def test_contract_examples():
    m = contract(UniformMatroid(4, 3), {0})
    assert m.r == 2 and m.ground == frozenset({1, 2, 3})
    pm = contract(PartitionMatroid(4, [{0, 1}, {2, 3}], [1, 1]), {0})
    assert pm.capacities[0] == 0
    assert not pm.is_independent({1})
    g = contract(GraphicMatroid(TRIANGLE), {0})
    assert g.is_independent({1}) and g.is_independent({2})
    assert not g.is_independent({1, 2})
    with pytest.raises(DependentContraction):
        contract(UniformMatroid(3, 1), {0, 1})


@pytest.mark.parametrize("make", [
    lambda: UniformMatroid(6, 3),
    lambda: PartitionMatroid(6, [{0, 1, 2}, {3, 4}, {5}], [2, 1, 1]),
    lambda: GraphicMatroid([(0, 1), (1, 2), (2, 0), (2, 3), (3, 0), (1, 3)]),
    lambda: ExplicitMatroid(6, uniform_family(6, 2)),
])
def test_contract_agrees_with_definition(make):
    m = make()
    for s in subsets(range(6)):
        if len(s) > 2 or not m.is_independent(s):
            continue
        mc = m.contract(s)
        for t in subsets(sorted(m.ground - s)):
            assert mc.is_independent(t) == m.is_independent(t | s)


def test_exchange_map_examples():
    m = UniformMatroid(4, 2)
    assert exchange_map(m, {0, 1}, {0, 1}).assignments == {}
    pi = exchange_map(m, {0, 1}, {2, 3})
    assert pi.is_bijection()
    assert sorted(pi.images()) == [0, 1]
    assert pi.check(m, {0, 1}, {2, 3})
    pi = exchange_map(UniformMatroid(4, 3), {0}, {1, 2})
    assert pi.assignments == {1: None, 2: None}


def test_exchange_map_rejects_dependent():
    with pytest.raises(DependentInput):
        exchange_map(UniformMatroid(3, 1), {0, 1}, {2})


def test_exchange_map_equal_size_is_bijection_on_graphic():
    g = GraphicMatroid([(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)])
    bases = all_bases(g)
    for i_set in bases:
        for j_set in bases:
            pi = exchange_map(g, i_set, j_set)
            assert pi.is_bijection()
            assert pi.check(g, i_set, j_set)


def test_exchange_map_check_detects_bad_maps():
    m = UniformMatroid(4, 2)
    assert not ExchangeMap({2: 0, 3: 0}).check(m, {0, 1}, {2, 3})
    assert not ExchangeMap({2: None, 3: 1}).check(m, {0, 1}, {2, 3})


def test_find_two_disjoint_bases_examples():
    b1, b2 = find_two_disjoint_bases(UniformMatroid(4, 2))
    assert not b1 & b2 and len(b1) == len(b2) == 2
    assert find_two_disjoint_bases(UniformMatroid(5, 3)) is None
    em = ExplicitMatroid(2, [(), (0,), (1,)])
    assert find_two_disjoint_bases(em) == (frozenset({0}), frozenset({1}))


def brute_disjoint_pair(m):
    bases = all_bases(m)
    return any(not (a & b) for a in bases for b in bases)


def test_disjoint_bases_match_brute_force_on_graphs():
    rng = np.random.default_rng(5)
    for trial in range(60):
        n_edges = int(rng.integers(3, 9))
        verts = int(rng.integers(2, 5))
        edges = [tuple(int(v) for v in rng.choice(verts, 2, replace=False)) for _ in range(n_edges)]
        g = GraphicMatroid(edges)
        got = find_two_disjoint_bases(g)
        assert (got is not None) == brute_disjoint_pair(g), edges
        if got:
            b1, b2 = got
            assert not b1 & b2 and g.is_base(b1) and g.is_base(b2)


def test_disjoint_bases_on_contracted_and_explicit():
    # contracting edge 0 turns its parallel twin into a loop
    g = GraphicMatroid([(0, 1), (0, 1), (1, 2), (1, 2), (2, 3), (2, 3)])
    b1, b2 = find_two_disjoint_bases(g.contract({0}))
    assert {b1, b2} == {frozenset({2, 4}), frozenset({3, 5})} or (not b1 & b2 and len(b1) == 2)
    # the remaining edge 2 is a bridge, so every base contains it
    assert find_two_disjoint_bases(GraphicMatroid([(0, 1), (0, 1), (1, 2)]).contract({0})) is None
    pm = PartitionMatroid(6, [{0, 1, 2, 3}, {4, 5}], [2, 1])
    b1, b2 = find_two_disjoint_bases(pm)
    assert pm.is_base(b1) and pm.is_base(b2) and not b1 & b2
    assert find_two_disjoint_bases(PartitionMatroid(3, [{0, 1, 2}], [2])) is None


def test_explicit_matroid_axioms():
    with pytest.raises(NotAMatroid):
        ExplicitMatroid(3, [(), (0,), (0, 1)])  # missing (1,)
    with pytest.raises(NotAMatroid):
        ExplicitMatroid(4, [(), (0,), (1,), (2,), (3,), (0, 1), (2, 3)])  # augmentation fails
    with pytest.raises(NotAMatroid):
        ExplicitMatroid(2, [(0,)])
    with pytest.raises(TooLarge):
        ExplicitMatroid(17, [()])
    m = ExplicitMatroid(4, uniform_family(4, 2))
    assert m.full_rank() == 2


def test_partition_matroid_validation():
    with pytest.raises(NotAMatroid):
        PartitionMatroid(3, [{0, 1}, {1, 2}], [1, 1])
    with pytest.raises(NotAMatroid):
        PartitionMatroid(3, [{0, 1}], [1])
    with pytest.raises(NotAMatroid):
        PartitionMatroid(2, [{0, 1}], [-1])
    pm = PartitionMatroid(4, [{0, 1}, {2, 3}], [1, 1])
    assert pm.overflow({0, 1, 2}) == {0: 1}


@pytest.mark.parametrize("m", [
    UniformMatroid(5, 2),
    PartitionMatroid(5, [{0, 1}, {2, 3, 4}], [1, 2]),
    GraphicMatroid([(0, 1), (1, 2), (2, 0), (2, 3), (3, 4)]),
])
def test_dict_round_trip(m):
    m2 = matroid_from_dict(m.to_dict(), 5)
    for s in subsets(range(5)):
        assert m.is_independent(s) == m2.is_independent(s)


def test_rank_is_max_independent_subset():
    g = GraphicMatroid([(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)])
    for s in subsets(range(6)):
        best = max(len(t) for t in subsets(s) if g.is_independent(t))
        assert g.rank(s) == best
