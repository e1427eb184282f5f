import numpy as np

from torusmaps import labels as lb
from torusmaps import sampler
from torusmaps.harness import metrics


def test_ifub_matches_all_pairs(sampled, enum):
    extra = [sampler.sample_triangulation(n, 21, i).triangulation for n in (20, 150) for i in range(20)]
    tris = [r.triangulation for r in sampled] + list(enum[3].triangulations) + extra
    for tri in tris:
        g = metrics.Graph(tri)
        d = metrics.diameter(g)
        assert d.exact
        assert d.value == metrics.brute_diameter(g)


def test_budget_gives_certified_interval():
    tri = sampler.sample_triangulation(400, 4, 0).triangulation
    g = metrics.Graph(tri)
    true = metrics.brute_diameter(g)
    d = metrics.diameter(metrics.Graph(tri), budget=5)
    assert d.low <= true <= d.high
    assert d.bfs_runs <= 5 or d.exact


def test_bfs_matches_labels_module(sampled):
    tri = sampled[1].triangulation
    g = metrics.Graph(tri)
    want = lb.bfs(lb.adjacency(tri), tri.v0)
    assert np.array_equal(g.bfs(tri.v0), want)


def test_label_gap_within_hard_bounds(sampled):
    for rec in sampled:
        gap = metrics.label_gap(rec.triangulation)
        assert gap.upper_violations == 0 and gap.lower_violations == 0
        assert gap.max_gap >= 0


def test_measure_row():
    row, extra = metrics.measure(128, 3, 0)
    assert row.n == 128
    assert row.runtime_ms == ""
    assert row.diam_over_n14 == round(row.diameter / 128**0.25, 6)
    assert extra["diameter_exact"]
    assert len(row.row()) == len(metrics.StatRow.header())
