import json
import math
from pathlib import Path

import numpy as np
import pytest

from torusmaps import _rng, sampler
from torusmaps.decomp import tau_of

COUNTS = json.loads((Path(__file__).parent / "fixtures" / "counts.json").read_text())["counts"]


def test_law_counts_match_frozen_values():
    assert sampler.triangulation_counts(12) == COUNTS


@pytest.mark.parametrize("n", [1, 2, 3])
def test_oracle_agrees_with_enumeration(n, enum):
    brute = {w.key() for w in sampler.brute_force_words(n)}
    assert brute == {w.key() for w in enum[n].words}
    assert len(brute) == COUNTS[n - 1]
    # each rooted map is reached 12 times from (unrooted map, slot) pairs
    assert set(enum[n].weight.values()) == {12}


def test_pmf_total_is_three_times_count():
    for n in (1, 2, 3, 4):
        pm = sampler.parameter_pmf(n)
        w = sum(v[0] for v in pm.values())
        assert w == 3 * COUNTS[n - 1]
        assert {v[1] for v in pm.values()} == {w}


def test_float_law_matches_exact():
    for n in (64, 300, 512):
        ex = sampler.ParameterLaw(n, "exact")
        fl = sampler.ParameterLaw(n, "float")
        assert fl.log_count() == pytest.approx(ex.log_count(), rel=1e-9)
        mk_e, mk_f = ex.marginal_k(), fl.marginal_k()
        for k in mk_e:
            assert mk_f[k] == pytest.approx(mk_e[k], abs=1e-9)


def test_log_count_forests():
    assert math.exp(float(sampler.log_count_forests(2, 1))) == pytest.approx(4)
    assert math.exp(float(sampler.log_count_forests(0, 5))) == pytest.approx(1)


def test_parameter_vectors_are_consistent():
    rng = _rng.stream(1, 0)
    law = sampler.parameter_law(80)
    for _ in range(200):
        p = sampler.sample_parameters(80, rng, law)
        assert p.n == 80
        assert p.tau == tau_of(p.k, p.sigma[: p.t], p.gamma[: p.t])
        assert all(x >= 0 for x in p.rho + p.sigma)
        assert all(abs(g) <= s + 1 for g, s in zip(p.gamma, p.sigma))


def test_seeded_samples_reproduce():
    a = sampler.sample_triangulation(40, 5, 3)
    b = sampler.sample_triangulation(40, 5, 3)
    c = sampler.sample_triangulation(40, 5, 4)
    assert a.word == b.word
    assert a.to_json_obj() == b.to_json_obj()
    assert a.word != c.word


def test_sample_record_json(sampled):
    obj = sampled[0].to_json_obj()
    assert obj["n"] == 60
    assert len(obj["word"]) == 4 * 60 + 1
    assert 1 <= obj["slot"] <= 4
    json.dumps(obj)


def test_small_uniformity():
    # n = 2: eight rooted maps, 16000 draws, chi-square on the exact oracle
    from scipy.stats import chisquare

    keys = {w.key(): i for i, w in enumerate(sampler.brute_force_words(2))}
    rng = _rng.stream(2, 0)
    obs = np.zeros(len(keys))
    for _ in range(16000):
        obs[keys[sampler.sample_triangulation(2, rng, close=False).word.key()]] += 1
    assert chisquare(obs).pvalue > 1e-3


def test_enumeration_budget():
    with pytest.raises(sampler.BudgetExceeded):
        sampler.enumerate_all(5)
