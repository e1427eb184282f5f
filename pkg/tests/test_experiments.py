import csv
import io
import json

import numpy as np
import pytest

from torusmaps.harness import experiments as ex


def test_config_parsing():
    cfg = ex.ExperimentConfig.from_text("n_list = 64, 128  # sizes\nreplicas=3\nseed = 9\ntiming = yes\n")
    assert cfg.n_list == [64, 128]
    assert (cfg.replicas, cfg.seed, cfg.timing) == (3, 9, True)
    with pytest.raises(ValueError):
        ex.ExperimentConfig.from_text("colour = red")


def test_stats_independent_of_workers():
    cfg = ex.ExperimentConfig(n_list=[64, 96], replicas=3, seed=2)
    rows1, _ = ex.run_stats(cfg)
    cfg.threads = 2
    rows2, _ = ex.run_stats(cfg)
    assert ex.stats_csv(rows1) == ex.stats_csv(rows2)
    table = list(csv.DictReader(io.StringIO(ex.stats_csv(rows1))))
    assert len(table) == 6
    assert table[0]["runtime_ms"] == ""


def test_summary_fields():
    rows, _ = ex.run_stats(ex.ExperimentConfig(n_list=[64, 128, 256], replicas=4, seed=1))
    s = ex.summarize(rows)
    assert s["n"] == [64, 128, 256]
    assert 0 < s["diameter_slope"] < 1
    assert isinstance(s["gap_decreasing"], bool)


def test_rescaled_processes():
    cfg = ex.ExperimentConfig(experiment="rescaled", n_list=[200], replicas=2, seed=3, points=50)
    recs = ex.emit_rescaled_processes(cfg)
    assert len(recs) == 2
    for r in recs:
        assert r["S"]["ends"] == [0, -4]
        for f in r["forests"]:
            assert f["C_end"] == f["tau"]
    text = ex.jsonl(recs)
    assert [json.loads(x) for x in text.splitlines()] == json.loads(json.dumps(recs))


def test_pseudo_metric_export():
    rec = ex.rescaled_record(24, 5, 1, points=20)
    d = np.array(rec["d0"])
    assert d.shape == (2 * 24 + 2, 2 * 24 + 2)
    assert np.array_equal(d, d.T)
    # m-bar(u, u) lies in [m(u), m(u) + 6]
    assert np.all((-12 <= np.diag(d)) & (np.diag(d) <= 0))
    assert "d0" not in ex.rescaled_record(80, 5, 1, points=20)
