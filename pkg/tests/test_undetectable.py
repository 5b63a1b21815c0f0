import pytest

from qdf.codes import dem_from_code
from qdf.dem import parse_dem
from qdf.exact.codeword import bz_distance
from qdf.exact.errors import connected_cluster_distance
from qdf.results import NoResultError, Status
from qdf.undetectable import UESearchParams, cc_search, ge_search, ue_search, undetectable_error_search


@pytest.mark.parametrize("name", ["surface_d3.json", "surface_d5.json", "rep5.json"])
def test_graphlike_search_is_exact(load, name):
    code = load(name)
    res = ge_search(code)
    assert res.status is Status.EXACT
    assert res.distance == bz_distance(code).distance == connected_cluster_distance(code).distance


def test_graphlike_on_colour_code_gives_no_result(load):
    code = load("colour_toric_18.json")
    with pytest.raises(NoResultError):
        ge_search(code)
    res = cc_search(code)
    assert res.distance == 4
    assert res.status is Status.UPPER_ONLY


def test_schedule_stops_on_repeat(load):
    res = ue_search(load("513.json"), rep=3)
    assert res.distance == 3


def test_truncation_parameters():
    dem = parse_dem("error(0.1) D0 D1 D2\nerror(0.1) D0 D1 D2 L0\n")
    assert undetectable_error_search(dem, UESearchParams(3, 3)).distance == 2
    with pytest.raises(NoResultError):
        undetectable_error_search(dem, UESearchParams(2, 8))
    with pytest.raises(ValueError):
        UESearchParams(2, 1)


def test_no_increase_prunes_growth():
    # every search path passes through a single active detector and then grows
    text = "error(0.1) D0 D2 D3 L0\nerror(0.1) D1 D3\nerror(0.1) D1 D2 D3\nerror(0.1) D0 D3\n"
    dem = parse_dem(text)
    assert undetectable_error_search(dem, UESearchParams(3, 6)).distance == 4
    with pytest.raises(NoResultError):
        undetectable_error_search(dem, UESearchParams(3, 6, no_increase=True))


def test_two_block_models_rejected(load):
    with pytest.raises(ValueError):
        ge_search(dem_from_code(load("513.json"), rep=2))
