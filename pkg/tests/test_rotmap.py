import numpy as np
import pytest

from torusmaps import rotmap


def test_torus_square_is_genus_one():
    m = rotmap.torus_square()
    assert m.n_vertices == 1
    assert m.n_edges == 2
    assert m.n_faces == 1
    assert m.euler_genus() == 1
    assert m.is_connected()


def test_bad_twin_rejected():
    with pytest.raises(rotmap.NonInvolutionTwin):
        rotmap.RotMap(np.array([1, 2, 0]), np.array([1, 2, 0]))


def test_json_round_trip():
    m = rotmap.torus_square()
    again = rotmap.from_json(m.to_json())
    assert again.same_as(m)


def test_homology_labels_span_z2():
    m = rotmap.torus_square()
    lab = rotmap.homology_labels(m)
    assert lab.shape == (4, 2)
    # twin half-edges carry opposite classes
    assert np.all(lab[m.twin] == -lab)
    assert np.linalg.matrix_rank(lab[[0, 1]]) == 2


def test_closed_maps_are_essentially_simple(sampled):
    for rec in sampled:
        g = rec.triangulation.g
        assert rotmap.is_essentially_simple(g)
        assert g.euler_genus() == 1
