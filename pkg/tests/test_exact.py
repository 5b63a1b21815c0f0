import numpy as np
import pytest

import oracles
from qdf.codes import ClassicalCode, CssCode, StabiliserCode, dem_from_code
from qdf.exact.codeword import (WeightEnumerator, bz_distance, codeword_space, detect_evenness,
                                distance_via_macwilliams, exhaustive_distance, is_basis, macwilliams,
                                weight_enumerator)
from qdf.exact.errors import connected_cluster_distance, exhaustive_error_distance, meet_in_middle_distance
from qdf.gf2 import BitMatrix, vstack
from qdf.results import NoResultError, Status

CODEWORD_METHODS = [exhaustive_distance, bz_distance]
ERROR_METHODS = [exhaustive_error_distance, meet_in_middle_distance, connected_cluster_distance]


def test_five_qubit_enumerators(load):
    code = load("513.json")
    WG = weight_enumerator(vstack([code.S, code.L]), symplectic=True)
    WH = weight_enumerator(code.S, symplectic=True)
    assert WG.as_dict() == {0: 1, 3: 30, 4: 15, 5: 18}
    assert WH.as_dict() == {0: 1, 4: 15}
    assert macwilliams(WH, "quantum").as_dict() == WG.as_dict()


def test_enumerator_matches_oracle(load):
    G = load("golay24.json").G
    assert weight_enumerator(G).as_dict() == {0: 1, 8: 759, 12: 2576, 16: 759, 24: 1}
    H = load("hamming74.json")
    assert weight_enumerator(H.G).as_dict() == oracles.weight_distribution(H.G.to_dense())
    assert macwilliams(weight_enumerator(H.H)).as_dict() == weight_enumerator(H.G).as_dict()


def test_macwilliams_rejects_inconsistent_input():
    with pytest.raises(ValueError):
        macwilliams(WeightEnumerator([1, 2], 3))
    with pytest.raises(ValueError):
        macwilliams(WeightEnumerator([1], 3), "ternary")


def test_enumeration_budget(load):
    with pytest.raises(ValueError, match="budget"):
        weight_enumerator(load("golay24.json").G, budget=100)
    with pytest.raises(ValueError, match="budget"):
        exhaustive_distance(load("golay24.json"), budget=100)


@pytest.mark.parametrize("name, d", [("hamming74.json", 3), ("golay24.json", 8), ("rep7.json", 7),
                                     ("513.json", 3), ("steane.json", 3), ("surface_d3.json", 3),
                                     ("colour_toric_18.json", 4)])
def test_codeword_methods_on_fixtures(load, name, d):
    code = load(name)
    for method in CODEWORD_METHODS:
        res = method(code)
        assert res.status is Status.EXACT and res.distance == d, method.__name__
    assert distance_via_macwilliams(code).distance == d


@pytest.mark.parametrize("rep", [2, 3, 4])
def test_all_representations_agree(load, rep):
    code = load("513.json")
    for method in CODEWORD_METHODS:
        res = method(code, rep=rep)
        assert res.distance == 3
        w = res.witness.to_dense()
        assert np.count_nonzero(w[:5] | w[5:]) == 3
    dem = dem_from_code(code, rep=rep)
    assert distance_via_macwilliams(dem).distance == 3
    if rep != 2:
        for method in ERROR_METHODS:
            assert method(dem).distance == 3


def test_witness_is_a_logical(load):
    code = load("513.json")
    res = bz_distance(code, rep=3)
    from qdf.codes import symplectic_products
    w = BitMatrix.from_rows([res.witness], 10)
    assert not symplectic_products(w, code.S).any()
    assert symplectic_products(w, code.L).any()


@pytest.mark.parametrize("mode, want", [("none", 1), ("even", 2)])
def test_evenness_options(load, mode, want):
    res = bz_distance(load("golay24.json"), evenness=mode)
    assert res.distance == 8


def test_detect_evenness(load):
    assert detect_evenness(load("golay24.json").G) == 4
    assert detect_evenness(load("hamming74.json").G) == 1
    assert detect_evenness(BitMatrix.from_strings(["11111111"])) == 8


def test_information_sets_are_disjoint(load):
    G = codeword_space(load("golay24.json")).G
    basis = is_basis(G, attempts=5, seed=3)
    flat = [c for s in basis.ISList for c in s]
    assert len(flat) == len(set(flat))
    for M, S in zip(basis.GList, basis.ISList):
        D = M.to_dense()
        assert np.array_equal(D[:, S][: len(S)], np.eye(len(S), dtype=np.uint8))


def test_bz_trace_bounds_are_monotone(load):
    res = bz_distance(load("golay24.json"))
    lbs = [t[2] for t in res.trace]
    ubs = [t[3] for t in res.trace]
    assert lbs == sorted(lbs)
    assert ubs == sorted(ubs, reverse=True)


def test_bz_budget_on_large_code(fixtures_dir):
    from qdf.io import load_code
    res = bz_distance(load_code(fixtures_dir / "large" / "bch_63_36.json"), max_time=0.3)
    assert res.status in (Status.BOUNDS, Status.EXACT)
    assert 1 <= res.d_lower <= res.d_upper <= 63


def test_error_methods_without_observables():
    code = ClassicalCode(H=BitMatrix.from_strings(["11", "01"]))
    with pytest.raises((NoResultError, ValueError)):
        exhaustive_error_distance(code)


def test_error_methods_reject_two_block(load):
    with pytest.raises(ValueError):
        exhaustive_error_distance(load("513.json"), rep=2)


def test_cluster_restricted_support(load):
    dem = dem_from_code(load("surface_d3.json"))
    res = connected_cluster_distance(dem, restrict_support=0)
    assert res.status is Status.UPPER_ONLY and res.distance >= 3
    res = connected_cluster_distance(dem, restrict_support=0, transitive=True)
    assert res.status is Status.EXACT


def test_mitm_weight_one_logical():
    from qdf.dem import parse_dem
    dem = parse_dem("error(0.1) D0\nerror(0.1) L0\n")
    assert meet_in_middle_distance(dem).distance == 1
    assert exhaustive_error_distance(dem).distance == 1


@pytest.mark.parametrize("seed", range(25))
def test_random_classical_codes_match_oracle(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(4, 12))
    H = rng.integers(0, 2, (int(rng.integers(1, n)), n)).astype(np.uint8)
    code = ClassicalCode(H=BitMatrix.from_dense(H))
    if code.k == 0:
        pytest.skip("trivial code")
    d = oracles.classical_distance(H)
    for method in CODEWORD_METHODS:
        assert method(code).distance == d
    assert distance_via_macwilliams(code).distance == d
    for method in ERROR_METHODS[:2]:
        assert method(code).distance == d


@pytest.mark.parametrize("seed", range(15))
def test_random_stabiliser_codes_match_oracle(seed):
    rng = np.random.default_rng(100 + seed)
    n = int(rng.integers(3, 6))
    r = int(rng.integers(1, n))
    S = oracles.random_stabiliser(n, r, rng)
    code = StabiliserCode(BitMatrix.from_dense(S.astype(np.uint8)))
    d = oracles.stabiliser_distance(S)
    for rep in (2, 3, 4):
        assert bz_distance(code, rep=rep).distance == d
        assert exhaustive_distance(code, rep=rep).distance == d
    assert distance_via_macwilliams(code).distance == d
    assert exhaustive_error_distance(code, rep=3).distance == d


@pytest.mark.parametrize("seed", range(10))
def test_random_css_codes_match_oracle(seed):
    rng = np.random.default_rng(200 + seed)
    n = int(rng.integers(4, 8))
    HX, HZ = oracles.random_css(n, int(rng.integers(1, 3)), int(rng.integers(1, 3)), rng)
    code = CssCode(BitMatrix.from_dense(HX.astype(np.uint8)), BitMatrix.from_dense(HZ.astype(np.uint8)))
    if code.k == 0:
        pytest.skip("no logical qubits")
    d = oracles.css_distance(HX, HZ)
    got = min(bz_distance(code, basis="Z").distance, bz_distance(code, basis="X").distance)
    assert got == d
