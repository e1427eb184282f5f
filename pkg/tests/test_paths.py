import itertools
from collections import Counter

import numpy as np
import pytest

from torusmaps import _rng, paths


@pytest.mark.parametrize("sigma", range(0, 8))
def test_count_motzkin_matches_step_enumeration(sigma):
    tally = Counter(sum(s) for s in itertools.product((-1, 0, 1), repeat=sigma))
    for g in range(-sigma - 1, sigma + 2):
        assert paths.count_motzkin(sigma, g) == tally.get(g, 0)


def test_extend_unextend_inverse():
    for st in itertools.product((-1, 0, 1), repeat=5):
        m = paths.from_steps(st)
        e = paths.extend(m)
        assert len(e) - 1 == 2 * 5 + m[-1]
        assert e[-1] == m[-1]
        assert paths.unextend(e) == m
        assert paths.inverse(paths.inverse(m)) == m


@pytest.mark.parametrize("c", [0, 1])
def test_c_shift_round_trip(c):
    m = paths.from_steps([1, 0, -1, 1])
    e = paths.extend(m)
    s = paths.c_shift(e, c)
    assert s[-1] == m[-1] + c - 1
    assert paths.c_unshift(s) == (c, e)


def test_ascii_round_trip():
    m = paths.from_steps([1, -1, 0, 0, 1])
    assert paths.from_ascii(paths.to_ascii(m)) == m
    with pytest.raises(ValueError):
        paths.from_ascii("+x")


def test_cycle_lemma_small_words():
    rng = _rng.stream(3, 0)
    for _ in range(300):
        k = int(rng.integers(1, 4))
        q = int(rng.integers(0, 5))
        p = k * q + int(rng.integers(1, 5))
        letters = ["0"] * p + ["1"] * q
        rng.shuffle(letters)
        got, rots = paths.cycle_lemma_count("".join(letters), k)
        assert got == p - k * q == len(rots)


def test_first_passage_sampler():
    rng = _rng.stream(5, 0)
    for rho, tau in [(0, 1), (3, 2), (10, 4)]:
        w = paths.sample_first_passage(rho, tau, rng)
        assert paths.is_first_passage(w, tau)


def test_motzkin_bridge_endpoint():
    rng = _rng.stream(1, 0)
    for sigma, g in [(0, 0), (4, -2), (9, 3)]:
        m = paths.sample_motzkin_bridge(sigma, g, rng)
        assert len(m) == sigma + 1
        assert m[-1] == g
        assert set(paths.steps(m)) <= {-1, 0, 1}
    with pytest.raises(paths.EmptyClass):
        paths.sample_motzkin_bridge(0, 1, rng)
