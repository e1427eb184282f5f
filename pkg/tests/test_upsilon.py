import math

import pytest

from torusmaps import _rng, sampler
from torusmaps.harness import upsilon


def test_needs_enough_samples():
    with pytest.raises(upsilon.InsufficientSamples):
        upsilon.estimate_upsilon(10, _rng.stream(0, 0))


def test_estimate_is_reproducible():
    a = upsilon.estimate_upsilon(20000, _rng.stream(4, 0))
    b = upsilon.estimate_upsilon(20000, _rng.stream(4, 0))
    assert a == b
    assert a.low < a.value < a.high


def test_estimate_agrees_with_exact_counts():
    # the count ratio |G(n)| / (2 Y (256/27)^(n-2)) tends to 1; at n = 2048 it is
    # still about 1% high, so only the direction and size of the gap are checked
    est = upsilon.estimate_upsilon(200000, _rng.stream(1, 0))
    r = upsilon.count_ratio(sampler.parameter_law(2048).log_count(), 2048, est.value)
    assert 0.99 < r < 1.03
    r_small = upsilon.count_ratio(sampler.parameter_law(128).log_count(), 128, est.value)
    assert r_small > r


def test_count_ratio_formula():
    assert upsilon.count_ratio(math.log(2 * 3.0), 2, 3.0) == pytest.approx(1.0)


def test_integrand_nonnegative_and_ci_shrinks():
    small = upsilon.estimate_upsilon(10000, _rng.stream(6, 0))
    big = upsilon.estimate_upsilon(160000, _rng.stream(6, 1))
    assert small.min_integrand >= 0 and big.min_integrand >= 0
    # sixteen times the samples, a quarter of the width (loosely)
    assert 0.15 < big.stderr / small.stderr < 0.4
