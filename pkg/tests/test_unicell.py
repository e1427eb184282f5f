import numpy as np
import pytest

from torusmaps import unicell
from torusmaps.unicell import FaceWord


def test_square_and_theta_shapes():
    sq = unicell.square_map()
    assert sq.genus == 1
    assert sq.shape == unicell.SQUARE
    th = unicell.theta_map()
    assert th.shape == unicell.HEXAGONAL
    assert th.n_vertices == 2
    assert len(th.special) == 2


def test_theta_map_is_class_member():
    th = unicell.theta_map()
    assert th.in_class(2)
    assert th.is_balanced()
    assert len(unicell.slot_angles(th)) == 4


def test_non_involution_rejected():
    with pytest.raises(unicell.NotUnicellular):
        FaceWord(np.array([1, 2, 0]))


def test_rooted_word_needs_root_stem():
    with pytest.raises(unicell.MissingRoot):
        FaceWord(np.array([1, 0]), rooted=True)


def test_add_strip_root_inverse():
    th = unicell.theta_map()
    u, _ = unicell.strip_root(unicell.add_root(th, 1))
    for slot in range(1, 5):
        t = unicell.add_root(u, slot)
        assert t.rooted and t.in_class(2)
        # the unrooted map may come back re-rooted at another kernel half-edge
        v, s = unicell.strip_root(t)
        assert unicell.add_root(v, s) == t
    with pytest.raises(unicell.InvalidSlot):
        unicell.add_root(u, 5)


def test_enumerated_words_are_safe_class_members(enum):
    for n, e in enum.items():
        for T in e.words:
            assert T.in_class(n)
            assert T.is_safe()
            assert len(T) == 4 * n + 1


def test_gamma_changes_sign_on_reversal(enum):
    for T in enum[3].words[:40]:
        u, _ = unicell.strip_root(T)
        for cyc in u.cycles():
            assert u.gamma(u.reverse(cyc)) == -u.gamma(cyc)
            assert u.gamma(cyc) == 0
