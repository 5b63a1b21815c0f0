import math

import numpy as np
import pytest

from qdf.codes import ClassicalCode, dem_from_code
from qdf.gf2 import BitMatrix
from qdf.heuristic import (EvolParams, KernelSearch, _Member, _mutate, qdistevol, qdistrnd, regroup_order,
                           round_half_away, trial_rng)
from qdf.results import NoResultError, Status, TrialStats


def test_trial_stats_closed_form():
    s = TrialStats(witness_counts={b"a": 4, b"b": 2})
    assert s.mean_count == 3
    assert abs(s.p_fail - math.exp(-3)) < 1e-12


def test_trial_stats_reset_on_improvement():
    s = TrialStats()
    s.record(5, [b"x"])
    s.record(5, [b"x", b"y"])
    assert s.witness_counts == {b"x": 2, b"y": 1}
    s.record(4, [b"z"])
    assert s.witness_counts == {b"z": 1}
    assert s.trials_at(5) == 2 and s.iter_count == 3


def test_round_half_away():
    assert [round_half_away(x) for x in (0.5, 1.5, 2.5, -0.5, 2.4)] == [1, 2, 3, -1, 2]


def test_regroup_orders():
    assert regroup_order(2) == [0, 1]
    assert regroup_order(3) == [1, 0, 2]
    assert regroup_order(None) is None


def test_trial_streams_are_independent():
    a = trial_rng(1, 0).permutation(20)
    b = trial_rng(1, 1).permutation(20)
    assert not np.array_equal(a, b)
    assert np.array_equal(a, trial_rng(1, 0).permutation(20))


@pytest.mark.parametrize("rep", [2, 3, 4])
@pytest.mark.parametrize("regroup", [False, True])
def test_qdistrnd_five_qubit(load, rep, regroup):
    res = qdistrnd(load("513.json"), iters=200, seed=1, rep=rep, regroup=regroup)
    assert res.status is Status.UPPER_ONLY and res.distance == 3
    w = res.witness.to_dense()
    assert np.count_nonzero(w[:5] | w[5:]) == 3
    assert res.stats.iter_count == 200


def test_qdistrnd_is_thread_count_independent(load):
    code = load("golay24.json")
    a = qdistrnd(code, iters=64, seed=5)
    b = qdistrnd(code, iters=64, seed=5, n_jobs=3)
    assert a.stats.trial_weights == b.stats.trial_weights
    assert a.stats.witness_counts == b.stats.witness_counts


def test_qdistrnd_upper_bound_never_below_distance(load):
    for name, d in [("golay24.json", 8), ("surface_d5.json", 5), ("colour_toric_18.json", 4)]:
        assert qdistrnd(load(name), iters=30, seed=0).distance >= d


def test_qdistrnd_weighted_uses_costs():
    from qdf.dem import parse_dem
    dem = parse_dem("error(0.01) L0\nerror(0.3) D0\nerror(0.3) D0 L0\n")
    res = qdistrnd(dem, iters=20, weighted=True)
    # the cheap path flips two likely errors instead of one unlikely error
    assert res.witness.to_dense().tolist() == [0, 1, 1]
    assert res.distance == pytest.approx(2 * math.log(0.7 / 0.3))


def test_qdistrnd_needs_observables():
    from qdf.dem import parse_dem
    with pytest.raises(NoResultError):
        qdistrnd(parse_dem("error(0.1) D0 D1"), iters=5)


def test_qdistrnd_rejects_zero_iterations(load):
    with pytest.raises(ValueError):
        qdistrnd(load("rep3.json"), iters=0)


def test_qdistrnd_budget(load):
    res = qdistrnd(load("golay24.json"), iters=10**6, max_time=0.2)
    assert res.stats.iter_count < 10**6
    assert res.distance >= 8


def test_evol_params_validation():
    with pytest.raises(ValueError):
        EvolParams(lam=10, mu=3)
    with pytest.raises(ValueError):
        EvolParams(p_mut=0)
    with pytest.raises(ValueError):
        EvolParams(n_gens=0)


def test_qdistevol_finds_distance(load):
    res = qdistevol(load("513.json"), EvolParams(n_gens=5, lam=20, mu=4), seed=2)
    assert res.distance == 3
    assert len(res.trace) == 5
    best = [t[1] for t in res.trace]
    assert best[-1] <= best[0]


def test_qdistevol_thread_count_independent(load):
    code = load("golay24.json")
    p = EvolParams(n_gens=3, lam=12, mu=3)
    a = qdistevol(code, p, seed=9)
    b = qdistevol(code, p, seed=9, n_jobs=4)
    assert a.trace == b.trace and a.stats.trial_weights == b.stats.trial_weights


def test_mutation_swaps_pivot_with_non_pivot():
    rng = np.random.default_rng(0)
    genome = np.arange(10)
    parent = _Member(genome, (1.0, 1.0), np.array([0, 1, 2]))
    child = _mutate(parent, rng, p_mut=1, s_mut=0.0, swap_pivot=True)
    moved = np.flatnonzero(child != genome)
    assert len(moved) == 2
    values = set(genome[moved])
    assert len(values & {0, 1, 2}) == 1
    assert sorted(child) == list(range(10))


def test_mutation_count_at_least_one():
    rng = np.random.default_rng(1)
    parent = _Member(np.arange(6), (1.0, 1.0), np.zeros(0, np.int64))
    child = _mutate(parent, rng, p_mut=0.1, s_mut=0.0, swap_pivot=False)
    assert not np.array_equal(child, np.arange(6))


def test_kernel_search_regroup_columns(load):
    dem = dem_from_code(load("513.json"), rep=3)
    ks = KernelSearch(dem, regroup=True)
    assert ks.genome_size == 5
    assert ks.columns(np.array([2, 0])).tolist() == [7, 2, 12, 5, 0, 10]
    with pytest.raises(ValueError):
        KernelSearch(dem_from_code(ClassicalCode(H=BitMatrix.from_strings(["11"]))), regroup=True)
