import numpy as np
import pytest

from torusmaps import _rng, closure, sampler
from torusmaps.closure import canonical_form, complete_closure, verify_closure_output
from torusmaps.unicell import FaceWord


def test_enumerated_closures_are_valid_and_distinct(enum):
    for n, e in enum.items():
        for tri in e.triangulations:
            assert verify_closure_output(tri) == []
            assert tri.n == n
            assert tri.g.n_faces == 2 * n
        assert sampler.closures_distinct(e.triangulations)


def test_sampled_closures_are_valid(sampled):
    for rec in sampled:
        tri = rec.triangulation
        assert verify_closure_output(tri) == []
        assert np.all(tri.outdegree == 3)


def test_closing_order_does_not_matter(enum):
    rng = _rng.stream(8, 0)
    for tri in enum[3].triangulations[::25]:
        want = canonical_form(tri.g)
        for _ in range(3):
            assert canonical_form(closure.closure_any_order(tri.word, rng)) == want


def test_root_triangle_contains_root():
    rec = sampler.sample_triangulation(40, 3, 0)
    cyc = closure.root_triangle(rec.triangulation)
    assert len(cyc) == 3 and cyc[0] == 0


def test_lambda_walk():
    rec = sampler.sample_triangulation(25, 1, 0, close=False)
    lam = closure.compute_lambda(rec.word)
    assert lam[0] == 3 and lam[-1] == 0
    assert np.all(lam >= 0)


def test_unrooted_word_rejected():
    with pytest.raises(ValueError):
        complete_closure(FaceWord(np.array([2, 3, 0, 1])))


def test_corrupted_orientation_is_reported():
    rec = sampler.sample_triangulation(30, 2, 0)
    tri = rec.triangulation
    bad = closure.Triangulation(tri.word, tri.g, ~tri.out, tri.gamma_angle, tri.lam, tri.attach, tri.order)
    checks = {b["check"] for b in verify_closure_output(bad, full=False)}
    assert "outdegree" in checks or "orientation_consistency" in checks
