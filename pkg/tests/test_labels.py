import numpy as np
import pytest

from torusmaps import _rng
from torusmaps import labels as lb


def test_label_facts(sampled, enum):
    tris = [r.triangulation for r in sampled] + list(enum[3].triangulations)
    for tri in tris:
        lt = lb.LabelTable(tri)
        assert lb.label_checks(tri, lt) == []
        assert np.all(lt.M - lt.m <= 6)
        assert lb.chain_checks(lt, range(tri.n)) == []


def test_distance_bounds(sampled):
    rng = _rng.stream(0, 7)
    for rec in sampled:
        assert lb.distance_bounds(rec.triangulation, pairs=300, rng=rng) == []


def test_neighbor_bound_on_every_edge(sampled):
    tri = sampled[0].triangulation
    lt = lb.LabelTable(tri)
    vals = [lb.neighbor_label_bound(tri, lt, h) for h in range(tri.g.n_half_edges)]
    assert max(vals) <= 7


def test_rightmost_walks(sampled):
    for rec in sampled[:4]:
        tri = rec.triangulation
        bad, stats = lb.appendix_walk_checks(tri)
        assert bad == []
        assert stats["max_h"] <= 4
        e = int(np.flatnonzero(tri.out)[0])
        w = lb.rightmost_walk(tri, e)
        assert w.vertices[-1] == tri.v0
        assert len(w.path_edges) <= len(w.edges)
        # the pruned walk is a path
        assert len(set(w.path_vertices)) == len(w.path_vertices)


def test_walk_needs_outgoing_edge(sampled):
    tri = sampled[0].triangulation
    e = int(np.flatnonzero(~tri.out)[0])
    with pytest.raises(ValueError):
        lb.rightmost_walk(tri, e)


def test_path_decomposition(sampled):
    for rec in sampled[:2]:
        tri = rec.triangulation
        bad, counts = lb.appendix_path_checks(tri, lb.LabelTable(tri))
        assert bad == []
        assert sum(counts.values()) > 0
