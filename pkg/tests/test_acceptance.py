"""One test per acceptance criterion; each prints a single PASS/FAIL line.

Tolerances: exact integers everywhere except the
failure-probability check (1e-12) and the wall-clock limits.  Kernel
compilation is warmed up on a different code before any timed section.
"""
import math
import time
import warnings

import numpy as np
import pytest

import oracles
from conftest import FIXTURES, GOLDEN
from qdf.codes import ClassicalCode, StabiliserCode, dem_from_code, from_block, symplectic_products, to_block
from qdf.decoder import DecoderConfig, ProbeOptions, bp_decode, decoder_distance, osd_postprocess
from qdf.dem import DetectorModel, chromobius_basis, filter_dem
from qdf.exact.codeword import (bz_distance, distance_via_macwilliams, exhaustive_distance, macwilliams,
                                weight_enumerator)
from qdf.exact.errors import connected_cluster_distance, exhaustive_error_distance, meet_in_middle_distance
from qdf.gf2 import BitMatrix, vstack
from qdf.heuristic import EvolParams, qdistevol, qdistrnd
from qdf.io import load_code
from qdf.results import NoResultError, Status, TrialStats
from qdf.solvers import ClauseSet, build_sat_model, milp_distance, row_constraint, sat_distance, serialize_wcnf
from qdf.undetectable import cc_search, ge_search, ue_search

FIVE_QUBIT_H3 = ["01001|00110|01111", "10100|00011|10111", "01010|10001|11011", "00101|11000|11101"]
FIVE_QUBIT_L3 = ["11111|00000|11111", "00000|11111|11111"]
FIVE_QUBIT_WG = {0: 1, 3: 30, 4: 15, 5: 18}
FIVE_QUBIT_WH = {0: 1, 4: 15}

# Best upper bound for fixtures/random_48_5.json (20000 qdistrnd trials).  bz_distance
# with a 1500 s budget only certifies 5 <= d <= 10, so this value is frozen, not proven.
CODE_48_DISTANCE = 10


def _rows(strings):
    return BitMatrix.from_strings([s.replace("|", "") for s in strings])


def _warm_up():
    code = load_code(FIXTURES / "steane.json")
    for fn in (exhaustive_distance, distance_via_macwilliams, bz_distance, exhaustive_error_distance,
               meet_in_middle_distance, connected_cluster_distance, sat_distance, milp_distance):
        fn(code)
    weight_enumerator(BitMatrix.from_strings(["1100", "0011"]), symplectic=True)


def test_five_qubit_golden_path(verdict):
    _warm_up()
    code = load_code(FIXTURES / "513.json")
    t0 = time.perf_counter()
    dem = dem_from_code(code, rep=3)
    display_ok = dem.H == _rows(FIVE_QUBIT_H3) and dem.L == _rows(FIVE_QUBIT_L3)
    methods = {
        "exhaustive": exhaustive_distance, "macwilliams": distance_via_macwilliams, "bz": bz_distance,
        "error-exhaustive": exhaustive_error_distance, "mitm": meet_in_middle_distance,
        "cluster": connected_cluster_distance, "sat": sat_distance, "milp": milp_distance,
    }
    got = {name: fn(code).distance for name, fn in methods.items()}
    WH = weight_enumerator(code.S, symplectic=True).as_dict()
    WG = weight_enumerator(vstack([code.S, code.L]), symplectic=True).as_dict()
    WG_dual = macwilliams(weight_enumerator(code.S, symplectic=True), "quantum").as_dict()
    elapsed = time.perf_counter() - t0
    ok = (display_ok and all(d == 3 for d in got.values()) and WG == WG_dual == FIVE_QUBIT_WG
          and WH == FIVE_QUBIT_WH and elapsed < 1.0)
    verdict(1, ok, f"[[5,1,3]] display={display_ok} distances={got} W_G={WG_dual} W_H={WH} "
                   f"time={elapsed:.3f}s (limit 1 s)")


def _random_classical(rng):
    while True:
        n = int(rng.integers(3, 15))
        H = rng.integers(0, 2, (int(rng.integers(1, n)), n)).astype(np.uint8)
        code = ClassicalCode(H=BitMatrix.from_dense(H))
        if code.k > 0:
            return code, oracles.classical_distance(H)


def _random_quantum(rng, css: bool):
    while True:
        n = int(rng.integers(3, 9))
        if css:
            HX, HZ = oracles.random_css(n, int(rng.integers(1, 3)), int(rng.integers(1, 3)), rng)
            S = np.vstack([np.hstack([HX, 0 * HX]), np.hstack([0 * HZ, HZ])])
        else:
            S = oracles.random_stabiliser(n, int(rng.integers(1, n)), rng)
        S = S[np.any(S, axis=1)]
        if S.shape[0] == 0 or oracles.gf2_rank(S) == n:
            continue
        code = StabiliserCode(BitMatrix.from_dense(S.astype(np.uint8)))
        return code, oracles.stabiliser_distance(S)


EXACT_METHODS = {
    "exhaustive": lambda c: exhaustive_distance(c),
    "macwilliams": lambda c: distance_via_macwilliams(c),
    "bz": lambda c: bz_distance(c),
    "error-exhaustive": lambda c: exhaustive_error_distance(c),
    "mitm": lambda c: meet_in_middle_distance(c),
    "cluster": lambda c: connected_cluster_distance(c),
    "sat": lambda c: sat_distance(c),
    "milp": lambda c: milp_distance(c, rep=2 if isinstance(c, StabiliserCode) else 3),
}

HEURISTIC_METHODS = {
    "qdistrnd": lambda c, s: qdistrnd(c, iters=50, seed=s),
    "qdistevol": lambda c, s: qdistevol(c, EvolParams(n_gens=3, lam=20, mu=4), seed=s),
    "decoder": lambda c, s: decoder_distance(c, ProbeOptions(iters=20, seed=s)),
    "cc": lambda c, s: cc_search(c),
    "ue": lambda c, s: ue_search(c),
}


def test_oracle_equivalence(verdict):
    rng = np.random.default_rng(2024)
    cases = [_random_classical(rng) for _ in range(200)]
    cases += [_random_quantum(rng, css=i % 2 == 0) for i in range(100)]
    t0 = time.perf_counter()
    exact_bad, heur_bad, hits = [], [], 0
    for i, (code, d) in enumerate(cases):
        for name, fn in EXACT_METHODS.items():
            res = fn(code)
            if res.status is not Status.EXACT or res.distance != d:
                exact_bad.append((i, name, res.distance, d))
        for name, fn in HEURISTIC_METHODS.items():
            try:
                res = fn(code, i)
            except NoResultError:
                continue
            if res.d_upper < d:
                heur_bad.append((i, name, res.d_upper, d))
        hits += qdistrnd(code, iters=2000, seed=i).distance == d
    elapsed = time.perf_counter() - t0
    rate = hits / len(cases)
    ok = not exact_bad and not heur_bad and rate >= 0.95 and elapsed < 600
    verdict(2, ok, f"{len(cases)} codes, exact mismatches={exact_bad[:5]}, heuristic UB<d={heur_bad[:5]}, "
                   f"qdistrnd(2000) UB=d rate={rate:.3f} (need >= 0.95), time={elapsed:.1f}s (limit 600 s)")


def test_wcnf_bit_exact(verdict):
    same = []
    for fixture, golden in [("rep3.json", "repetition3.wcnf"), ("513.json", "five_qubit_rep3.wcnf")]:
        text = serialize_wcnf(build_sat_model(load_code(FIXTURES / fixture), rep=3))
        same.append(text.split() == (GOLDEN / golden).read_text().split())
    gadget = ClauseSet(var_count=3)
    row_constraint(gadget, 3, 1, 2)
    cs = ClauseSet(var_count=5)
    cs.add(1, [5])
    cs.add(53, [1])
    cs.add(0, [3, -4, 5])
    lines = serialize_wcnf(cs).splitlines()
    samples = lines[1] == "1 5 0" and lines[3] == "55 3 -4 5 0"
    ok = all(same) and len(gadget.clauses) == 4 and samples
    verdict(3, ok, f"golden match={same}, gadget clauses={len(gadget.clauses)}, sample lines={samples}")


def test_failure_probability(verdict):
    stats = TrialStats(witness_counts={b"a": 4, b"b": 2})
    err = abs(stats.p_fail - math.exp(-3))
    ok = stats.mean_count == 3 and err <= 1e-12
    verdict(4, ok, f"<n>={stats.mean_count}, |pFail - e^-3|={err:.2e} (tolerance 1e-12)")


def test_block_round_trips(verdict):
    failures = []
    for n in range(1, 7):
        allv = np.array([[(v >> j) & 1 for j in range(2 * n)] for v in range(4 ** n)], np.uint8)
        M = BitMatrix.from_dense(allv)
        for rep in (3, 4):
            if from_block(to_block(M, rep), rep) != M:
                failures.append((n, rep))
    rng = np.random.default_rng(7)
    mismatches = 0
    pairs = 0
    for n in (1, 3, 8, 20, 64, 100):
        count = 100000 // 6 + (1 if n == 1 else 0) * (100000 % 6)
        A = BitMatrix.from_dense(rng.integers(0, 2, (count, 2 * n), dtype=np.uint8))
        B = BitMatrix.from_dense(rng.integers(0, 2, (count, 2 * n), dtype=np.uint8))
        A3, B3 = to_block(A, 3).to_dense().astype(np.int64), to_block(B, 3).to_dense().astype(np.int64)
        dots = np.einsum("ij,ij->i", A3, B3) % 2
        symp = np.array([symplectic_products(A.select_rows([i]), B.select_rows([i]))[0, 0]
                         for i in range(min(count, 200))])
        ax, az = A.to_dense()[:, :n].astype(np.int64), A.to_dense()[:, n:].astype(np.int64)
        bx, bz = B.to_dense()[:, :n].astype(np.int64), B.to_dense()[:, n:].astype(np.int64)
        omega = (np.einsum("ij,ij->i", ax, bz) + np.einsum("ij,ij->i", az, bx)) % 2
        mismatches += int(np.count_nonzero(dots != omega)) + int(np.count_nonzero(symp != omega[:len(symp)]))
        pairs += count
    ok = not failures and mismatches == 0 and pairs == 100000
    verdict(5, ok, f"round-trip failures={failures} for n<=6, dot-product mismatches={mismatches} "
                   f"over {pairs} pairs")


def test_graphlike_exactness(verdict):
    parts = []
    ok = True
    for name, d in [("surface_d3.json", 3), ("surface_d5.json", 5)]:
        code = load_code(FIXTURES / name)
        ge, bz = ge_search(code), bz_distance(code)
        ok &= ge.status is Status.EXACT and ge.distance == bz.distance == d
        parts.append(f"{name}: ge {ge.status} d={ge.distance}, bz d={bz.distance}")
    colour = load_code(FIXTURES / "colour_toric_18.json")
    d_colour = oracles.css_distance(colour.HX.to_dense(), colour.HZ.to_dense())
    try:
        ge_search(colour)
        ge_status = "returned"
    except NoResultError:
        ge_status = "NoResult"
    cc = cc_search(colour)
    ok &= ge_status == "NoResult" and cc.distance == d_colour
    parts.append(f"colour: ge {ge_status}, cc d={cc.distance}, oracle d={d_colour}")
    verdict(6, ok, "; ".join(parts))


def test_qdistevol_regression(verdict):
    path = FIXTURES / "random_48_5.json"
    code = load_code(path)
    params = EvolParams(n_gens=100)
    assert params.lam * params.n_gens == 10000
    hits = sum(qdistevol(code, params, seed=s).distance == CODE_48_DISTANCE for s in range(20))
    baseline = sum(qdistrnd(code, iters=10000, seed=s).distance == CODE_48_DISTANCE for s in range(3))
    ok = code.n == 48 and code.k == 5 and hits >= 1
    verdict(7, ok, f"[[48,5]] with frozen d={CODE_48_DISTANCE}: qdistevol hit d in {hits}/20 runs (need >= 1); "
                   f"qdistrnd baseline {baseline}/3 (informational)")


def _two_basis_dem(rng):
    nd = int(rng.integers(1, 12))
    m = int(rng.integers(1, 30))
    H = (rng.random((nd, m)) < 0.25).astype(np.uint8)
    L = (rng.random((2, m)) < 0.2).astype(np.uint8)
    coords = {i: (float(i), 0.0, 0.0, float(rng.integers(0, 6))) for i in range(nd)}
    return DetectorModel(BitMatrix.from_dense(H), BitMatrix.from_dense(L), rng.uniform(0.001, 0.1, m), coords)


def test_dem_filter(verdict):
    rng = np.random.default_rng(99)
    bad = 0
    for i in range(1000):
        dem = _two_basis_dem(rng)
        basis = "XZ"[i % 2]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            out = filter_dem(dem, basis)
        H = dem.H.to_dense()
        kept = [j for j in range(dem.num_detectors) if chromobius_basis(dem.coords[j]) == basis]
        allowed = {(tuple(H[kept, j]), tuple(dem.L.to_dense()[:, j]))
                   for j in range(dem.num_errors) if not np.delete(H[:, j], kept).any()}
        good = all(chromobius_basis(c) == basis for c in out.coords.values())
        good &= out.num_detectors == len(kept)
        good &= all((tuple(out.H.to_dense()[:, j]), tuple(out.L.to_dense()[:, j])) in allowed
                    for j in range(out.num_errors))
        bad += not good
    full = load_code(FIXTURES / "surface_memory_x_d3.dem")
    out = filter_dem(full, "X")
    ok = bad == 0 and (out.num_errors, out.num_detectors) == (55, 16)
    verdict(8, ok, f"property violations={bad}/1000; surface d=3 memory DEM filtered to "
                   f"{out.num_errors} errors / {out.num_detectors} detectors (expected 55 / 16)")


def test_decoder_validity(verdict):
    rng = np.random.default_rng(31)
    invalid = worse = total = 0
    config = DecoderConfig(bp_iters=30)
    for _ in range(10):
        r, n = 15, 30
        H = np.zeros((r, n), np.uint8)
        for j in range(n):
            H[rng.choice(r, 3, replace=False), j] = 1
        p = config.prior_vector(n)
        for _ in range(1000):
            e = (rng.random(n) < rng.uniform(0.02, 0.2)).astype(np.uint8)
            s = H @ e % 2
            marg = bp_decode(H, s, config).marginals
            c0 = osd_postprocess(H, s, marg, 0, p).to_dense()
            c1 = osd_postprocess(H, s, marg, 1, p).to_dense()
            invalid += (H @ c1 % 2 != s).any() + (H @ c0 % 2 != s).any()
            worse += int(c1.sum() > c0.sum())
            total += 1
    ok = invalid == 0 and worse == 0 and total == 10000
    verdict(9, ok, f"{total} syndromes: invalid corrections={invalid}, OSD-1 heavier than OSD-0 in {worse}")


def test_budget_contract(verdict):
    bz_distance(load_code(FIXTURES / "golay24.json"))
    code = load_code(FIXTURES / "large" / "bch_63_36.json")
    t0 = time.perf_counter()
    res = bz_distance(code, max_time=2.0)
    wall = time.perf_counter() - t0
    ok = res.status is Status.BOUNDS and wall < 3.0 and res.d_lower >= 1 and res.d_upper <= code.n
    verdict(10, ok, f"[63,36] with 2 s budget: {res.status} {res.d_lower} <= d <= {res.d_upper}, "
                    f"wall={wall:.2f}s (limit 3 s)")
