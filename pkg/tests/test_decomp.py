import numpy as np
import pytest

from torusmaps import _rng, decomp, sampler
from torusmaps.decomp import assemble, decompose
from torusmaps.unicell import add_root, strip_root


def test_kernel_table():
    assert decomp.kernel_spec(0).t == 2
    assert all(decomp.kernel_spec(k).t == 3 for k in range(1, 10))
    for k in range(10):
        assert decomp.type_of_corners(decomp.kernel_spec(k).c) == k
    with pytest.raises(decomp.UnknownKernel):
        decomp.kernel_spec(10)


def test_tau_of_square():
    assert decomp.tau_of(0, [1, 0], [0, 1]) == [3, 2, 3, 0]


def test_round_trip_on_enumeration(enum):
    for e in enum.values():
        for T in e.words:
            u, slot = strip_root(T)
            d = decompose(u)
            d.check()
            assert assemble(d) == u
            assert add_root(assemble(d), slot) == T


def test_json_round_trip(sampled):
    for rec in sampled:
        u, _ = strip_root(rec.word)
        d = decompose(u)
        again = decomp.from_json_obj(d.to_json_obj())
        assert again == d
        assert again.n == rec.n


def test_check_rejects_inconsistent_parameters():
    rng = _rng.stream(0, 0)
    d = sampler.sample_decomposition(6, rng)
    bad = decomp.DecomposedMap(d.k, list(d.forests), [tuple(m) for m in d.motzkin])
    bad.motzkin[0] = tuple(bad.motzkin[0]) + (bad.motzkin[0][-1] + 1,)
    with pytest.raises(Exception):
        bad.check()


def test_shifted_labeling_ends(sampled):
    for rec in sampled:
        u, _ = strip_root(rec.word)
        d = decompose(u)
        sl = decomp.shifted_labeling(d, u)
        assert sl.s_bullet[0] == 0
        # the corner-shifted chain endpoints always add up to -4
        assert sl.s_bullet[-1] == sum(g + c - 1 for g, c in zip(d.gamma, d.kernel.c)) == -4
        assert len(sl.s) == 2 * d.n + 2
