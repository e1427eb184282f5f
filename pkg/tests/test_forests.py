import numpy as np
import pytest

from torusmaps import _rng, paths
from torusmaps import forests as fo

SMALL = [(0, 1), (1, 1), (2, 1), (1, 2), (3, 2), (2, 4)]


@pytest.mark.parametrize("rho,tau", SMALL)
def test_formula_matches_brute_force(rho, tau):
    brute = list(fo.enumerate_forests(rho, tau))
    assert len(brute) == fo.count_forests(rho, tau) == paths.count_forest_words(rho, tau)
    assert len(set(brute)) == len(brute)
    assert all(fo.is_well_labeled(f) for f in brute)


def test_empty_forest():
    assert fo.count_forests(0, 3) == 1
    (f,) = fo.enumerate_forests(0, 3)
    assert f.rho == 0 and f.tau == 3


@pytest.mark.parametrize("rho,tau", SMALL)
def test_word_and_contour_round_trip(rho, tau):
    for f in fo.enumerate_forests(rho, tau):
        b = fo.encode_word(f)
        assert fo.decode_word(b, rho, tau) == f
        _, c, lab = fo.contour_pair(f)
        assert len(c) == 2 * rho + tau + 1
        assert c[-1] == tau
        g = fo.from_contour(c, lab)
        assert (g.parent, g.label) == (f.parent, f.label)


def test_text_round_trip():
    rng = _rng.stream(2, 0)
    for _ in range(50):
        f = fo.sample_uniform_forest(6, 3, rng)
        assert fo.from_text(fo.to_text(f)) == f


def test_from_contour_rejects_bad_steps():
    with pytest.raises(fo.MalformedForest):
        fo.from_contour([0, 2], [0, 0])
    with pytest.raises(fo.MalformedForest):
        fo.from_contour([1, 2], [0, 0])


def test_validate_catches_bad_labels():
    f = fo.sample_uniform_forest(3, 1, _rng.stream(0, 0))
    kid = f.children[0][0] if f.children[0] else f.children[1][0]
    f.label[kid] = 5
    with pytest.raises(fo.MalformedForest):
        f.validate()


def test_gw_laws_are_distributions():
    assert sum(fo.gw_floor_law(c) for c in range(200)) == pytest.approx(1.0)
    assert sum(fo.gw_vertex_law(c) for c in range(400)) == pytest.approx(1.0)


def test_gw_sampler_support():
    rng = _rng.stream(4, 0)
    for _ in range(200):
        f = fo.sample_gw_forest(4, 2, rng)
        f.validate()
        assert (f.rho, f.tau) == (4, 2)


def test_samplers_agree_on_small_class():
    # both samplers against the exact uniform law on F^2_1 (4 forests)
    rng = _rng.stream(9, 0)
    forests = list(fo.enumerate_forests(2, 1))
    index = {f.canonical(): i for i, f in enumerate(forests)}
    for draw in (fo.sample_gw_forest, fo.sample_uniform_forest):
        obs = np.zeros(len(forests))
        for _ in range(4000):
            obs[index[draw(2, 1, rng).canonical()]] += 1
        assert np.all(np.abs(obs / 4000 - 1 / len(forests)) < 0.04)
