import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from reference import cut_value, multilinear, subsets
from submodmax import (
    GraphicMatroid,
    InstanceFile,
    KnapsackSystem,
    PartitionMatroid,
    SearchConfig,
    UniformMatroid,
    algorithm_a,
    build_cut,
    complement_oracle,
    eval_table,
    exchange_map,
    FracSearchConfig,
    fractional_local_search,
    gen_random,
    knapsack_algorithm,
    partial_derivative,
    procedure_b,
)
from submodmax.instances import RANDOM_CONSTRAINTS, RANDOM_KINDS

SETTINGS = settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@st.composite
def graphs(draw, max_n=7):
    n = draw(st.integers(2, max_n))
    edges = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1),
                                    st.floats(0.0, 5.0, allow_nan=False)), max_size=12))
    edges = [(u, v, w) for u, v, w in edges if u != v]
    return n, edges


@st.composite
def matroids(draw, n):
    kind = draw(st.sampled_from(["uniform", "partition", "graphic"]))
    if kind == "uniform":
        return UniformMatroid(n, draw(st.integers(0, n)))
    if kind == "partition":
        labels = draw(st.lists(st.integers(0, 2), min_size=n, max_size=n))
        parts = [[e for e in range(n) if labels[e] == g] for g in range(3)]
        parts = [p for p in parts if p]
        caps = draw(st.lists(st.integers(0, 2), min_size=len(parts), max_size=len(parts)))
        return PartitionMatroid(n, parts, caps)
    verts = draw(st.integers(2, 5))
    edges = draw(st.lists(st.tuples(st.integers(0, verts - 1), st.integers(0, verts - 1)),
                          min_size=n, max_size=n))
    return GraphicMatroid(edges)


@SETTINGS
@given(graphs())
def test_cut_oracle_invariants(g):
    n, edges = g
    f = build_cut(n, edges)
    for s in subsets(range(n)):
        v = f.evaluate(s)
        assert v >= 0
        assert v == f.evaluate(s)
        assert abs(v - cut_value(edges, s)) < 1e-9
        assert abs(v - f.evaluate(set(range(n)) - s)) < 1e-9
    assert f.counts()["distinct"] == 2 ** n


@SETTINGS
@given(graphs())
def test_complement_is_an_involution(g):
    n, edges = g
    f = build_cut(n, edges, directed=True)
    gg = complement_oracle(complement_oracle(f))
    for s in subsets(range(n)):
        assert gg.evaluate(s) == f.evaluate(s)


@SETTINGS
@given(st.data())
def test_exchange_map_invariants(data):
    n = data.draw(st.integers(1, 7))
    m = data.draw(matroids(n))
    indep = [s for s in subsets(range(n)) if m.is_independent(s)]
    i_set = data.draw(st.sampled_from(indep))
    j_set = data.draw(st.sampled_from(indep))
    pi = exchange_map(m, i_set, j_set)
    assert set(pi.assignments) == set(j_set - i_set)
    images = [e for e in pi.assignments.values() if e is not None]
    assert len(images) == len(set(images))
    assert set(images) <= i_set - j_set
    for b, e in pi.assignments.items():
        assert m.is_independent((i_set - ({e} if e is not None else set())) | {b})
    if len(i_set) == len(j_set):
        assert pi.is_bijection()


@SETTINGS
@given(st.integers(0, 10_000), st.sampled_from(sorted(RANDOM_KINDS)), st.integers(1, 2))
def test_algorithm_a_rounds_partition_the_ground(seed, kind, k):
    inst = gen_random(kind, 7, k=k, seed=seed)
    f, ms = inst.oracle(), inst.matroids()
    cfg = SearchConfig(epsilon=0.05)
    rep = algorithm_a(f, ms, cfg)
    seen = set()
    for r in rep.iterations:
        assert not seen & r.solution
        assert all(m.is_independent(r.solution) for m in ms)
        assert r.value == f.raw_value(r.solution)
        assert r.n_moves <= cfg.move_bound(7)
        seen |= r.solution
    assert rep.value == max(r.value for r in rep.iterations)


@SETTINGS
@given(st.integers(0, 10_000), st.sampled_from(sorted(RANDOM_KINDS)))
def test_procedure_b_moves_strictly_improve(seed, kind):
    inst = gen_random(kind, 6, k=2, seed=seed)
    f, ms = inst.oracle(), inst.matroids()
    cfg = SearchConfig(epsilon=0.1, scaling_exponent=2)
    rep = procedure_b(f, None, ms, cfg)
    for mv in rep.moves:
        assert mv.after >= cfg.factor(6) * mv.before


@st.composite
def points(draw, n):
    return np.array(draw(st.lists(st.floats(0, 1, allow_nan=False), min_size=n, max_size=n)))


@SETTINGS
@given(st.integers(0, 10_000), st.data())
def test_multilinear_continuous_submodularity(seed, data):
    inst = gen_random(data.draw(st.sampled_from(sorted(RANDOM_KINDS))), 5, seed=seed)
    table = inst.oracle().table()
    y = data.draw(points(5))
    i, j = data.draw(st.sampled_from([(a, b) for a in range(5) for b in range(5) if a != b]))
    d = data.draw(st.floats(0.0, 1.0))
    d = min(d, 1 - y[i], 1 - y[j])
    yi, yj, yij = y.copy(), y.copy(), y.copy()
    yi[i] += d
    yj[j] += d
    yij[i] += d
    yij[j] += d
    second = eval_table(table, yij) - eval_table(table, yi) - eval_table(table, yj) + eval_table(table, y)
    assert second <= 1e-9


@SETTINGS
@given(st.integers(0, 10_000), st.data())
def test_multilinear_diminishing_returns(seed, data):
    inst = gen_random(data.draw(st.sampled_from(sorted(RANDOM_KINDS))), 5, seed=seed)
    f = inst.oracle()
    table = f.table()
    q = data.draw(points(5))
    a = q * np.array(data.draw(st.lists(st.floats(0, 1), min_size=5, max_size=5)))
    d = (1 - q) * np.array(data.draw(st.lists(st.floats(0, 1), min_size=5, max_size=5)))
    lhs = eval_table(table, a + d) - eval_table(table, a)
    rhs = eval_table(table, q + d) - eval_table(table, q)
    assert lhs >= rhs - 1e-9
    fmax = max(f.raw_value({e}) for e in range(5))
    for e in range(5):
        assert abs(partial_derivative(f, q, e)) <= 2 * 5 * fmax + 1e-9


@SETTINGS
@given(st.integers(0, 10_000))
def test_eval_table_matches_reference(seed):
    inst = gen_random("cut-directed", 5, seed=seed)
    edges = [tuple(e) for e in inst.function["edges"]]
    y = np.random.default_rng(seed).random(5)
    want = multilinear(5, lambda s: cut_value(edges, s, directed=True), y)
    assert abs(eval_table(inst.oracle().table(), y) - want) < 1e-9


@SETTINGS
@given(st.integers(0, 10_000), st.sampled_from(sorted(RANDOM_KINDS)), st.integers(1, 2))
def test_fractional_search_grid_and_feasibility(seed, kind, k):
    inst = gen_random(kind, 4, k=k, seed=seed, constraint="knapsack")
    f, ks = inst.oracle(), inst.knapsacks()
    u = np.random.default_rng(seed).integers(0, 6, 4) / 5
    y = fractional_local_search(f, ks, u, FracSearchConfig(zeta=0.2))
    assert np.allclose(y.coords * 5, np.round(y.coords * 5))
    assert (y.coords <= u + 1e-12).all()
    assert ks.point_feasible(y.coords)


@SETTINGS
@given(st.integers(0, 10_000), st.sampled_from(sorted(RANDOM_KINDS)), st.integers(1, 2))
def test_knapsack_output_feasible(seed, kind, k):
    inst = gen_random(kind, 5, k=k, seed=seed, constraint="knapsack")
    f, ks = inst.oracle(), inst.knapsacks()
    rep = knapsack_algorithm(f, ks, cfg=FracSearchConfig(zeta=0.25, delta_heavy=0.4, eps_round=0.1,
                                                         trials=20, seed=seed))
    assert ks.is_feasible(rep.solution)


@SETTINGS
@given(st.integers(0, 10_000), st.sampled_from(sorted(RANDOM_KINDS)), st.sampled_from(RANDOM_CONSTRAINTS),
       st.integers(1, 9), st.integers(1, 3))
def test_instance_round_trip(seed, kind, constraint, n, k):
    inst = gen_random(kind, n, k=k, seed=seed, constraint=constraint)
    again = InstanceFile.from_json(inst.to_json())
    assert again.to_json() == inst.to_json()
    f = again.oracle()
    assert f.n == n
    if constraint == "knapsack":
        assert (KnapsackSystem(again.constraints["weights"]).weights <= 1).all()
