"""Small worked examples with known answers, one module at a time."""

import json
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from torusmaps import decomp, paths, rotmap, sampler
from torusmaps import forests as fo
from torusmaps import labels as lb
from torusmaps.closure import complete_closure, verify_closure_output
from torusmaps.unicell import FaceWord, HEXAGONAL, add_root, slot_angles, strip_root

FIX = Path(__file__).parent / "fixtures"

# ---------------------------------------------------------------- rotmap


def test_star_of_stems_is_planar():
    m = rotmap.build_map([(None, 1), (None, 2), (None, 0)])
    assert (m.n_vertices, m.n_edges, m.n_faces, m.euler_genus()) == (1, 0, 1, 0)


def test_torus_square_single_face_of_degree_four():
    m = rotmap.torus_square()
    assert m.face_degrees().tolist() == [4]
    assert rotmap.is_essentially_simple(m)


def test_faces_have_zero_homology(sampled):
    g = sampled[0].triangulation.g
    lab = rotmap.homology_labels(g)
    for face in g.faces():
        assert not lab[face].sum(axis=0).any()


# ---------------------------------------------------------------- paths

M = (0, 1, 0, 0, -1, -2)


def test_extension_example():
    assert paths.extend(M) == (0, 1, 2, 1, 0, 1, 0, -1, -2)
    assert paths.extend((0, -1, -2, -3)) == (0, -1, -2, -3)


def test_inverse_example():
    assert paths.inverse(M) == (0, 1, 2, 2, 3, 2)
    assert paths.extend(paths.inverse(M)) == (0, 1, 2, 1, 2, 3, 2, 3, 2, 3, 4, 3, 2)


def test_c_shift_examples():
    # M~ is read from index 0, so c = 0 and c = 1 outputs differ in length by one
    assert paths.c_shift((0, 1, 0), 0) == (0, -1, 0, -1)
    assert paths.c_shift((0, 1, 0), 1) == (0, 1, 0, 1, 0)


def test_dominating_words():
    assert not paths.is_k_dominating("01001", 1)
    assert paths.is_k_dominating("000011001", 1)
    assert not paths.is_k_dominating("000011001", 2)
    assert paths.is_k_dominating("0000", 5)
    assert paths.cycle_lemma_count("000011001", 1)[0] == 3
    assert paths.cycle_lemma_count("00000", 2)[0] == 5
    assert paths.cycle_lemma_count("000100010001", 3)[0] == 0


def test_motzkin_counts():
    assert paths.count_motzkin(0, 0) == 1
    assert paths.count_motzkin(2, 0) == 3
    assert paths.count_motzkin(5, -2) == 30


# ---------------------------------------------------------------- forests

R_F = "1,11,111,1111,111,11,112,11,1,2,21,2,3,31,3,32,321,32,3,4,5,51,511,51,5,6,61,611,61,612,61,6,7"
C_F = [0, -1, -2, -3, -2, -1, -2, -1, 0, 1, 0, 1, 2, 1, 2, 1, 0, 1, 2, 3, 4, 3, 2, 3, 4, 5, 4, 3, 4, 3, 4, 5, 6]
L_F = [0, -1, -2, -1, -2, -1, -1, -1, 0, 0, -1, 0, 0, -1, 0, -1, -1, -1, 0, 0, 0, -1, -2, -1, 0, 0, -1, -1, -1,
       -1, -1, 0, 0]
B_F = "1100100000100000010000100010100000001100000001010001000000"


@pytest.fixture
def example_forest():
    keys = [tuple(int(ch) for ch in x) for x in R_F.split(",")]
    return fo.from_elements(set(keys), dict(zip(keys, L_F))), keys


def test_forest_contour_example(example_forest):
    f, keys = example_forest
    assert (f.rho, f.tau) == (13, 6)
    _, c, lab = fo.contour_pair(f)
    assert fo.contour_keys(f) == keys
    assert c == C_F
    assert lab == L_F


def test_forest_word_example(example_forest):
    f, _ = example_forest
    assert fo.encode_word(f) == B_F
    assert len(B_F) == 4 * 13 + 6 and B_F.count("1") == 13
    assert fo.decode_word(B_F, 13, 6) == f


def test_forest_counts():
    assert fo.encode_word(next(fo.enumerate_forests(0, 1))) == "0"
    assert [fo.count_forests(0, t) for t in range(1, 6)] == [1] * 5
    assert fo.count_forests(1, 1) == 1
    assert fo.count_forests(2, 1) == 4
    assert fo.count_forests(1, 2) == 2


def test_gw_offspring_laws():
    assert Fraction(fo.gw_floor_law(0)).limit_denominator(100) == Fraction(3, 4)
    assert fo.gw_vertex_law(0) == pytest.approx(27 / 64)


def test_identity_symmetrization(example_forest):
    f, _ = example_forest
    ident = {v: list(range(len(ch))) for v, ch in enumerate(f.children) if ch}
    for mode in ("partial", "complete"):
        assert fo.symmetrize(f, ident, mode) == f


# ---------------------------------------------------------------- decomposition


def test_kernel_rows():
    assert (decomp.kernel_spec(1).gamma_sums, decomp.kernel_spec(1).c) == ((1, 0), (0, 0, 0, 1, 1, 0))
    assert (decomp.kernel_spec(6).gamma_sums, decomp.kernel_spec(6).c) == ((-1, -1), (0, 1, 1, 0, 0, 0))
    assert (decomp.kernel_spec(9).gamma_sums, decomp.kernel_spec(9).c) == ((-1, 0), (1, 1, 0, 0, 0, 0))


def test_square_type_floor_counts():
    rng = np.random.default_rng(0)
    for _ in range(20):
        sigma = rng.integers(0, 5, size=2).tolist()
        tau = decomp.tau_of(0, sigma, [0, 0])
        assert tau[0] == tau[2] == 2 * sigma[0] + 1
        assert tau[1] == tau[3] == 2 * sigma[1] + 1


def test_minimal_type_one_map():
    # gamma_1 + gamma_2 = 1 forces one chain of length one; everything else empty
    sigma, gamma = [1, 0, 0], [1, 0, 0]
    d = decomp.DecomposedMap(1, [next(fo.enumerate_forests(0, t)) for t in decomp.tau_of(1, sigma, gamma)],
                             [(0, 1), (0,), (0,)])
    d.check()
    assert d.n == 3
    u = decomp.assemble(d)
    assert u.in_class(3) and u.shape == HEXAGONAL
    assert decomp.decompose(u) == d


# ---------------------------------------------------------------- rooting, closure and labels


def test_four_slots_give_four_rooted_maps(enum):
    u, _ = strip_root(enum[3].words[0])
    assert len(slot_angles(u)) == 4
    assert len({add_root(u, s) for s in range(1, 5)}) == 4


def test_smallest_triangulation(enum):
    (tri,) = enum[1].triangulations
    g = tri.g
    assert (g.n_vertices, g.n_edges, g.n_faces) == (1, 3, 2)


@pytest.fixture(scope="module")
def k7():
    word = FaceWord(np.array(json.loads((FIX / "k7.json").read_text())["word"]), rooted=True)
    return complete_closure(word)


def test_k7_closure(k7):
    g = k7.g
    v = g.vertex_of
    pairs = {tuple(sorted((int(v[h]), int(v[g.twin[h]])))) for h in range(g.n_half_edges)}
    assert (g.n_vertices, g.n_edges, g.n_faces) == (7, 21, 14)
    assert len(pairs) == 21
    assert rotmap.is_essentially_simple(g)
    assert verify_closure_output(k7) == []
    assert k7.word.in_class(7) and k7.word.is_safe()
    assert strip_root(k7.word)[0].shape == HEXAGONAL


def test_k7_labels(k7):
    lt = lb.LabelTable(k7)
    assert lt.lam[0] == 3 and lt.lam[-1] == 0
    assert lt.m[k7.v0] == 0 and np.all(np.delete(lt.m, k7.v0) > 0)
    vals = [lb.neighbor_label_bound(k7, lt, h) for h in range(k7.g.n_half_edges)]
    assert 0 <= min(vals) and max(vals) <= 7


def test_attached_stem_labels(sampled):
    for rec in sampled:
        tri = rec.triangulation
        stems = np.flatnonzero(tri.word.partner < 0)
        assert np.array_equal(tri.lam[tri.attach[stems]], tri.lam[stems] - 1)
