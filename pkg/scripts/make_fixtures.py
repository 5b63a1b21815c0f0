"""Regenerate the bundled fixtures under fixtures/.

Needs stim for the circuit-level detector error model; everything else is
built from explicit constructions.  Run from the repository root:

    python3 scripts/make_fixtures.py
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from qdf.codes import ClassicalCode, CssCode, StabiliserCode  # noqa: E402
from qdf.dem import DetectorModel, format_dem  # noqa: E402
from qdf.gf2 import BitMatrix  # noqa: E402
from qdf.io import code_to_dict, write_alist  # noqa: E402

OUT = ROOT / "fixtures"


def repetition(n: int) -> ClassicalCode:
    H = np.zeros((n - 1, n), np.uint8)
    for i in range(n - 1):
        H[i, i] = H[i, i + 1] = 1
    return ClassicalCode(H=BitMatrix.from_dense(H), name=f"repetition_{n}")


def hamming74() -> ClassicalCode:
    H = BitMatrix.from_strings(["1010101", "0110011", "0001111"])
    return ClassicalCode(H=H, name="hamming_7_4")


def golay24() -> ClassicalCode:
    # extended binary Golay code: [I | B] with B from the icosahedron complement
    row = [1, 1, 0, 1, 1, 1, 0, 0, 0, 1, 0]
    A = np.array([np.roll(row, i) for i in range(11)], np.uint8)
    B = np.ones((12, 12), np.uint8)
    B[:11, :11] = A
    B[11, 11] = 0
    G = np.hstack([np.eye(12, dtype=np.uint8), B])
    return ClassicalCode(G=BitMatrix.from_dense(G), name="golay_24_12")


def _gf64_tables(prim: int = 0b1000011):
    exp = [0] * 126
    log = [0] * 64
    x = 1
    for i in range(63):
        exp[i] = exp[i + 63] = x
        log[x] = i
        x <<= 1
        if x & 64:
            x ^= prim
    return exp, log


def _minimal_poly(coset: list[int], exp, log) -> list[int]:
    """Coefficients over GF(2), lowest degree first."""
    poly = [1]
    for e in coset:
        root = exp[e]
        nxt = [0] * (len(poly) + 1)
        for i, c in enumerate(poly):
            nxt[i + 1] ^= c
            if c:
                nxt[i] ^= exp[(log[c] + log[root]) % 63]
        poly = nxt
    assert all(c in (0, 1) for c in poly)
    return poly


def bch_63_36() -> ClassicalCode:
    """Narrow-sense BCH code of length 63, designed distance 11, field x^6 + x + 1."""
    exp, log = _gf64_tables()
    seen: set[int] = set()
    g = [1]
    for b in range(1, 11):
        if b in seen:
            continue
        coset, x = [], b
        while x not in coset:
            coset.append(x)
            x = 2 * x % 63
        seen |= set(coset)
        m = _minimal_poly(coset, exp, log)
        prod = [0] * (len(g) + len(m) - 1)
        for i, a in enumerate(g):
            for j, c in enumerate(m):
                prod[i + j] ^= a & c
        g = prod
    k = 63 - (len(g) - 1)
    G = np.zeros((k, 63), np.uint8)
    for i in range(k):
        G[i, i : i + len(g)] = g
    return ClassicalCode(G=BitMatrix.from_dense(G), name="bch_63_36")


def five_qubit() -> StabiliserCode:
    # generators IXZZX, XIXZZ, ZXIXZ, ZZXIX with logicals XXXXX and ZZZZZ
    S = BitMatrix.from_strings(["01001|00110", "10100|00011", "01010|10001", "00101|11000"])
    L = BitMatrix.from_strings(["11111|00000", "00000|11111"])
    return StabiliserCode(S, L, name="five_qubit")


def steane() -> CssCode:
    H = hamming74().H
    return CssCode(H, H, name="steane_7_1_3")


def surface(d: int) -> CssCode:
    """Planar surface code as the hypergraph product of two repetition codes."""
    H = repetition(d).H.to_dense()
    m, n = H.shape
    HX = np.hstack([np.kron(H, np.eye(n, dtype=np.uint8)), np.kron(np.eye(m, dtype=np.uint8), H.T)])
    HZ = np.hstack([np.kron(np.eye(n, dtype=np.uint8), H), np.kron(H.T, np.eye(m, dtype=np.uint8))])
    return CssCode(BitMatrix.from_dense(HX % 2), BitMatrix.from_dense(HZ % 2), name=f"surface_d{d}")


def toric_colour(L: int = 3) -> CssCode:
    """6.6.6 colour code on an L x L torus: faces on a triangular lattice,
    qubits on its up and down triangles, so every qubit sits on three faces."""
    face = lambda i, j: (i % L) * L + (j % L)
    H = np.zeros((L * L, 2 * L * L), np.uint8)
    for i in range(L):
        for j in range(L):
            up = 2 * face(i, j)
            down = up + 1
            for f in (face(i, j), face(i + 1, j), face(i, j + 1)):
                H[f, up] = 1
            for f in (face(i + 1, j), face(i, j + 1), face(i + 1, j + 1)):
                H[f, down] = 1
    M = BitMatrix.from_dense(H)
    return CssCode(M, M, name=f"toric_colour_{2 * L * L}")


def surface_memory_dem(distance: int = 3, rounds: int = 3, p: float = 0.001) -> DetectorModel:
    """Circuit-level DEM of a rotated surface-code X memory experiment.

    Detector coordinates gain a fourth entry: 0 for X-type detectors and 3
    for Z-type, matching the convention read by ``chromobius_basis``.
    X-type detectors are those at the (x, y) positions of the first round's
    detectors, which in an X memory experiment are exactly the X checks.
    """
    import stim

    circuit = stim.Circuit.generated("surface_code:rotated_memory_x", distance=distance, rounds=rounds,
                                     after_clifford_depolarization=p)
    dem = circuit.detector_error_model(decompose_errors=False, flatten_loops=True).flattened()
    coords = dem.get_detector_coordinates()
    first = {tuple(c[:2]) for c in coords.values() if c[2] == 0}
    lines = []
    for k in sorted(coords):
        c = coords[k]
        tag = 0 if tuple(c[:2]) in first else 3
        lines.append(f"detector({', '.join(_num(v) for v in [*c, tag])}) D{k}")
    for inst in dem:
        if inst.type == "error":
            targets = " ".join(f"D{t.val}" if t.is_relative_detector_id() else f"L{t.val}"
                               for t in inst.targets_copy() if not t.is_separator())
            lines.append(f"error({inst.args_copy()[0]!r}) {targets}")
    from qdf.dem import parse_dem

    text = "\n".join(lines) + "\n"
    return parse_dem(text, name=f"surface_memory_x_d{distance}")


def _num(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(v)


def write_code(code, name: str, reference: int | None, members: list, **extra) -> None:
    (OUT / f"{name}.json").write_text(json.dumps(code_to_dict(code, **extra), indent=1) + "\n")
    entry = {"file": f"{name}.json"}
    if reference is not None:
        entry["reference"] = reference
    members.append(entry)


def main() -> None:
    OUT.mkdir(exist_ok=True)
    small: list = []
    write_code(five_qubit(), "513", 3, small)
    write_code(steane(), "steane", 3, small)
    write_code(hamming74(), "hamming74", 3, small)
    write_code(golay24(), "golay24", 8, small)
    for n in range(3, 10):
        write_code(repetition(n), f"rep{n}", n, small)
    write_code(surface(3), "surface_d3", 3, small)
    write_code(surface(5), "surface_d5", 5, small)
    write_code(toric_colour(3), "colour_toric_18", 4, small)
    (OUT / "manifest.json").write_text(json.dumps({"name": "small", "members": small}, indent=1) + "\n")

    (OUT / "large").mkdir(exist_ok=True)
    write_code(bch_63_36(), "large/bch_63_36", 11, [])
    (OUT / "hamming74.alist").write_text(write_alist(hamming74().H))

    dem = surface_memory_dem()
    (OUT / "surface_memory_x_d3.dem").write_text(format_dem(dem))
    print("wrote fixtures to", OUT)


if __name__ == "__main__":
    main()
