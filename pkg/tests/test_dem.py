import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qdf.dem import DemParseError, DetectorModel, chromobius_basis, filter_dem, format_dem, parse_dem
from qdf.gf2 import BitMatrix, BitVector

SAMPLE = """
# two rounds of a toy model
detector(0, 0, 0, 0) D0
detector(1, 0, 0, 3) D1
error(0.1) D0 D1
error(0.2) D0 ^ L0
shift_detectors(0, 0, 1) 2
detector(0, 0, 0, 0) D0
error(0.05) D0 D1
error(0.05) D0 D1
error[tagged](0.01) L0
"""


def test_parse_sample():
    dem = parse_dem(SAMPLE)
    assert dem.num_detectors == 4
    assert dem.num_observables == 1
    assert dem.num_errors == 4
    assert dem.H.to_strings() == ["1100", "1000", "0010", "0010"]
    assert dem.L.to_strings() == ["0101"]
    assert dem.coords[2] == (0, 0, 1, 0)
    # merged duplicates combine as independent flips
    assert dem.p[2] == pytest.approx(0.05 * 0.95 * 2)


def test_parse_without_merge_keeps_duplicates():
    assert parse_dem(SAMPLE, merge=False).num_errors == 5


@pytest.mark.parametrize("text, message", [
    ("error(1.5) D0", "probability"),
    ("error(0) D0", "probability"),
    ("error(0.1) D0 D0", "repeated"),
    ("error(0.1) X3", "bad target"),
    ("repeat 3 {", "cannot parse|unsupported"),
    ("detector(a) D0", "bad arguments"),
])
def test_parse_errors(text, message):
    with pytest.raises(DemParseError, match=message):
        parse_dem(text)


def test_probability_above_half_is_rejected():
    with pytest.raises(DemParseError):
        parse_dem("error(0.7) D0 L0")


def test_format_roundtrip():
    dem = parse_dem(SAMPLE)
    again = parse_dem(format_dem(dem))
    assert again.H == dem.H and again.L == dem.L
    assert np.allclose(again.p, dem.p)
    assert again.coords == dem.coords


def test_model_helpers():
    dem = parse_dem("error(0.1) D0 D1\nerror(0.1) D1 L0\nerror(0.1) D0 L0\n")
    assert dem.is_undetectable_logical(BitVector.from_dense([1, 1, 0])) is False
    assert dem.is_undetectable_logical(BitVector.from_dense([0, 0, 0])) is False
    e = BitVector.from_dense([1, 0, 0])
    assert not dem.is_undetectable_logical(e)
    assert dem.costs() == pytest.approx(np.full(3, np.log(9)))
    sub = dem.select_errors([1, 2])
    assert sub.num_errors == 2 and sub.p.tolist() == [0.1, 0.1]


def test_model_validates_shapes():
    with pytest.raises(ValueError):
        DetectorModel(BitMatrix.zeros(1, 3), BitMatrix.zeros(1, 4))
    with pytest.raises(ValueError):
        DetectorModel(BitMatrix.zeros(1, 3), BitMatrix.zeros(1, 3), p=[0.1, 0.1])
    with pytest.raises(ValueError):
        DetectorModel(BitMatrix.zeros(1, 3), BitMatrix.zeros(1, 3), rep=3)


def test_chromobius_basis():
    assert chromobius_basis((0, 0, 0, 1)) == "X"
    assert chromobius_basis((0, 0, 0, 5)) == "Z"
    with pytest.raises(ValueError):
        chromobius_basis((0, 0, 0))
    with pytest.raises(ValueError):
        chromobius_basis((0, 0, 0, 7))


def random_two_basis_dem(seed: int) -> DetectorModel:
    rng = np.random.default_rng(seed)
    nd = int(rng.integers(1, 12))
    m = int(rng.integers(1, 30))
    H = (rng.random((nd, m)) < 0.25).astype(np.uint8)
    L = (rng.random((2, m)) < 0.2).astype(np.uint8)
    coords = {i: (float(i), 0.0, 0.0, float(rng.integers(0, 6))) for i in range(nd)}
    return DetectorModel(BitMatrix.from_dense(H), BitMatrix.from_dense(L), rng.uniform(0.001, 0.1, m), coords)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["X", "Z"]))
def test_filter_keeps_only_desired_basis(seed, basis):
    dem = random_two_basis_dem(seed)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        out = filter_dem(dem, basis)
    assert all(chromobius_basis(c) == basis for c in out.coords.values())
    kept = [i for i in range(dem.num_detectors) if chromobius_basis(dem.coords[i]) == basis]
    assert out.num_detectors == len(kept)
    # each kept error is an original column restricted to kept detectors with nothing lost
    orig = {(tuple(dem.H.to_dense()[kept, j]), tuple(dem.L.to_dense()[:, j]))
            for j in range(dem.num_errors)
            if not np.delete(dem.H.to_dense()[:, j], kept).any()}
    for j in range(out.num_errors):
        col = (tuple(out.H.to_dense()[:, j]), tuple(out.L.to_dense()[:, j]))
        assert col in orig
        assert any(col[0]) or any(col[1])


def test_filter_warns_when_observable_mixes_bases():
    text = ("detector(0,0,0,0) D0\ndetector(1,0,0,3) D1\n"
            "error(0.1) D0 L0\nerror(0.1) D1 L0\n")
    with pytest.warns(UserWarning, match="both bases"):
        filter_dem(parse_dem(text), "X")


def test_filter_needs_coordinates():
    with pytest.raises(ValueError, match="no coordinates"):
        filter_dem(parse_dem("error(0.1) D0 L0"), "X")


def test_surface_memory_fixture(fixtures_dir):
    dem = parse_dem((fixtures_dir / "surface_memory_x_d3.dem").read_text())
    assert (dem.num_errors, dem.num_detectors) == (221, 24)
    out = filter_dem(dem, "X")
    assert (out.num_errors, out.num_detectors) == (55, 16)
