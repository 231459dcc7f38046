import math

import numpy as np
import pytest

from reference import brute_max, cut_value, subsets
from submodmax import (
    GraphicMatroid,
    PartitionMatroid,
    SearchConfig,
    UniformMatroid,
    algorithm_a,
    build_cut,
    build_explicit_table,
    build_modular,
    gen_greedy_tight,
    gen_random,
    greedy_baseline,
    p_exchange_search,
    partition_algorithm,
    procedure_b,
    symmetric_algorithm,
)
from submodmax.errors import BadParams, NotPartition
from submodmax.search import exchange_removals, partition_p
from submodmax.verify import certify_matroid_local_lemma, find_improving_move

K3 = [(0, 1), (1, 2), (0, 2)]


def test_config_validation():
    with pytest.raises(BadParams):
        SearchConfig(epsilon=0)
    with pytest.raises(BadParams):
        SearchConfig(p=0)
    with pytest.raises(BadParams):
        SearchConfig(epsilon=1e-20, scaling_exponent=4).factor(1000)
    cfg = SearchConfig(epsilon=0.5, scaling_exponent=2)
    assert cfg.factor(4) == pytest.approx(1 + 0.5 / 16)
    assert cfg.move_bound(4) == math.ceil(math.log(4) / math.log(1 + 0.5 / 16)) + 1


def test_procedure_b_examples(c4):
    rep = procedure_b(c4, None, [UniformMatroid(4, 2)])
    assert rep.value == 4 and rep.solution in ({0, 2}, {1, 3})
    rep = procedure_b(build_modular([5, 1]), None, [UniformMatroid(2, 1)])
    assert rep.solution == {0} and rep.value == 5
    rep = procedure_b(build_explicit_table(3, [0.0] * 8), None, [UniformMatroid(3, 2)])
    assert rep.solution == frozenset() and rep.value == 0


def test_procedure_b_respects_ground_subset(c4):
    rep = procedure_b(c4, {1, 2}, [UniformMatroid(4, 2)])
    assert rep.solution <= {1, 2}


def test_procedure_b_excludes_infeasible_singletons():
    # element 1 sits in a part with capacity zero
    pm = PartitionMatroid(3, [{0}, {1}, {2}], [1, 0, 1])
    f = build_modular([1, 10, 2])
    rep = procedure_b(f, None, [pm])
    assert rep.solution == {0, 2}
    assert rep.meta["excluded"] == [1]
    assert procedure_b(f, {1}, [pm]).solution == frozenset()


def test_algorithm_a_examples(c4):
    rep = algorithm_a(c4, [UniformMatroid(4, 2)], SearchConfig(epsilon=0.01))
    assert rep.value == 4
    assert len(rep.iterations) == 2
    inst = gen_greedy_tight(2, 2)
    f = inst.oracle()
    rep = algorithm_a(f, inst.matroids(), SearchConfig(epsilon=0.01))
    assert rep.value >= 2 / (1.01 * 9) * 7
    rep = algorithm_a(build_explicit_table(2, [0.0] * 4), [UniformMatroid(2, 1)])
    assert rep.solution == frozenset()


def test_algorithm_a_rounds_are_disjoint():
    for seed in range(10):
        inst = gen_random("cut-directed", 8, k=2, seed=seed)
        rep = algorithm_a(inst.oracle(), inst.matroids())
        V = frozenset(range(8))
        for r in rep.iterations:
            assert r.ground == V
            assert r.solution <= V
            V = V - r.solution
        assert rep.value == max(r.value for r in rep.iterations)


def test_symmetric_examples(c4):
    rep = symmetric_algorithm(c4, [UniformMatroid(4, 2)], SearchConfig(epsilon=0.01))
    assert rep.value == 4
    rep = symmetric_algorithm(build_cut(3, K3), [UniformMatroid(3, 1)])
    assert rep.value == 2 == brute_max(3, lambda s: cut_value(K3, s), lambda s: len(s) <= 1)[1]
    assert symmetric_algorithm(build_explicit_table(2, [0.0] * 4), [UniformMatroid(2, 2)]).value == 0


@pytest.mark.parametrize("seed", range(12))
def test_local_optimum_has_no_improving_move(seed):
    inst = gen_random(["cut-undirected", "cut-directed", "coverage", "facility"][seed % 4], 7, k=1 + seed % 2,
                      seed=seed)
    f, ms = inst.oracle(), inst.matroids()
    cfg = SearchConfig(epsilon=0.1, scaling_exponent=2)
    rep = procedure_b(f, None, ms, cfg)
    usable = [e for e in range(7) if all(m.is_independent({e}) for m in ms)]
    assert find_improving_move(f, rep.solution, ms, cfg.factor(7), ground=usable) is None
    assert certify_matroid_local_lemma(f, rep.solution, ms, cfg.epsilon).passed
    assert rep.n_moves <= cfg.move_bound(7)


def test_trace_is_replayable():
    inst = gen_random("coverage", 8, k=2, seed=3)
    f, ms = inst.oracle(), inst.matroids()
    cfg = SearchConfig(epsilon=0.1, scaling_exponent=2)
    rep = procedure_b(f, None, ms, cfg)
    singles = [f.raw_value({e}) if all(m.is_independent({e}) for m in ms) else -1 for e in range(8)]
    s = frozenset({int(np.argmax(singles))})
    for mv in rep.moves:
        assert mv.after >= cfg.factor(8) * mv.before
        assert f.raw_value(s) == pytest.approx(mv.before)
        s = (s - frozenset(mv.removed)) | frozenset(mv.added)
        assert all(m.is_independent(s) for m in ms)
        assert f.raw_value(s) == pytest.approx(mv.after)
    assert s == rep.solution


def test_restricted_neighborhood_matches_full():
    ms = [PartitionMatroid(5, [{0, 1}, {2, 3, 4}], [1, 1]), GraphicMatroid([(0, 1), (1, 2), (2, 0), (2, 3), (3, 0)])]
    for s in subsets(range(5)):
        if not all(m.is_independent(s) for m in ms):
            continue
        for d in set(range(5)) - s:
            fast = exchange_removals(s, d, ms)
            full = exchange_removals(s, d, ms, full=True)
            feas = lambda R: all(m.is_independent((s - R) | {d}) for m in ms)
            assert all(feas(R) for R in fast)
            # every feasible full-mode removal contains a restricted one
            for R in full:
                assert any(Q <= R for Q in fast)


def test_p_exchange_examples():
    inst = gen_greedy_tight(2, 2)
    f = inst.oracle()
    rep = p_exchange_search(f, inst.matroids(), SearchConfig(p=2))
    assert rep.value >= 0.5 * 7 / 2
    pm = PartitionMatroid(4, [{0, 1}, {2, 3}], [1, 1])
    f = build_modular([3, 1, 2, 4])
    rep = p_exchange_search(f, [pm, pm], SearchConfig(p=1))
    assert rep.value == 7
    zero = build_explicit_table(4, [0.0] * 16)
    assert p_exchange_search(zero, [pm, pm]).solution == frozenset()


def test_p_exchange_rejects_non_partition():
    with pytest.raises(NotPartition):
        p_exchange_search(build_modular([1, 1]), [UniformMatroid(2, 1), UniformMatroid(2, 1)])
    pm = PartitionMatroid(2, [{0, 1}], [1])
    with pytest.raises(BadParams):
        p_exchange_search(build_modular([1, 1]), [pm])


def test_partition_p_formula():
    assert partition_p(2, 4.0) == 2
    assert partition_p(2, 2.0) == 3
    assert partition_p(3, 0.5) == 13
    assert partition_p(2, 4 / 3) == 4


def test_partition_algorithm_examples():
    inst = gen_greedy_tight(2, 2)
    f = inst.oracle()
    rep = partition_algorithm(f, inst.matroids(), epsilon=4.0, monotone=True)
    assert rep.meta["p"] == 2
    assert rep.value >= 7 / (2 + 4.0)
    pm = PartitionMatroid(4, [{0, 1}, {2, 3}], [1, 1])
    pm2 = PartitionMatroid(4, [{0, 2}, {1, 3}], [1, 1])
    f = build_modular([3, 1, 2, 4])
    rep = partition_algorithm(f, [pm, pm2], epsilon=2.0)
    assert rep.value >= 7 / 2
    one = PartitionMatroid(1, [{0}], [1])
    assert partition_algorithm(build_modular([2.0]), [one, one], epsilon=4.0).solution == {0}


def test_partition_algorithm_p_override():
    inst = gen_greedy_tight(2, 3)
    rep = partition_algorithm(inst.oracle(), inst.matroids(), epsilon=0.1, monotone=True, p=2)
    assert rep.meta["p"] == 2
    with pytest.raises(BadParams):
        partition_algorithm(inst.oracle(), inst.matroids(), epsilon=0.1, p=0)


@pytest.mark.parametrize("k,p", [(1, 2), (2, 2), (2, 5), (3, 3)])
def test_greedy_tight_values(k, p):
    inst = gen_greedy_tight(k, p)
    f = inst.oracle()
    rep = greedy_baseline(f, inst.matroids())
    assert rep.value == p + 1
    assert rep.solution == {0}
    opt = frozenset(range(1, k + 3))
    assert all(m.is_independent(opt) for m in inst.matroids())
    assert f.raw_value(opt) == p * (k + 1) + 1


def test_greedy_modular_top_r():
    f = build_modular([3, 9, 1, 7, 5])
    assert greedy_baseline(f, [UniformMatroid(5, 2)]).solution == {1, 3}
