import json

import pytest

from torusmaps.harness import cli


def run(tmp_path, name, *argv):
    out = tmp_path / name
    code = cli.main([*argv, "--out", str(out)])
    return code, out.read_text()


def test_sample_encode_decode_round_trip(tmp_path):
    code, text = run(tmp_path, "s.jsonl", "sample", "--n", "25", "--count", "3", "--seed", "4")
    assert code == 0
    recs = [json.loads(x) for x in text.splitlines()]
    assert [r["index"] for r in recs] == [0, 1, 2]
    assert all(len(r["triangulation"]["orientation"]) == 6 * 25 for r in recs)
    _, enc = run(tmp_path, "e.jsonl", "encode", "--in", str(tmp_path / "s.jsonl"))
    _, dec = run(tmp_path, "d.jsonl", "decode", "--in", str(tmp_path / "e.jsonl"))
    words = [json.loads(x)["word"] for x in dec.splitlines()]
    assert words == [r["word"] for r in recs]
    again = [json.loads(x)["triangulation"] for x in dec.splitlines()]
    assert again == [r["triangulation"] for r in recs]


def test_enumerate_counts(tmp_path):
    _, text = run(tmp_path, "e.jsonl", "enumerate", "--n", "3", "--no-map")
    assert len(text.splitlines()) == 71


def test_verify_exit_code(tmp_path):
    code, text = run(tmp_path, "v.json", "verify", "closure", "--n-list", "20", "--count", "3")
    rep = json.loads(text)
    assert code == 0 and rep["passed"]
    assert "seconds" not in rep


def test_stats_csv_and_summary(tmp_path):
    summary = tmp_path / "sum.json"
    code, text = run(tmp_path, "s.csv", "stats", "--n-list", "32,64", "--replicas", "2", "--summary", str(summary))
    assert code == 0
    assert text.splitlines()[0].startswith("n,replica,seed,diameter")
    assert len(text.splitlines()) == 5
    assert json.loads(summary.read_text())["hard_bound_violations"] == 0


def test_stats_config_file(tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("experiment = rescaled\nn_list = 40\nreplicas = 2\npoints = 16\n")
    _, text = run(tmp_path, "r.jsonl", "stats", "--config", str(cfg))
    assert len(text.splitlines()) == 2
    assert json.loads(text.splitlines()[0])["n"] == 40


@pytest.mark.parametrize("argv", [
    ["sample", "--n", "30", "--count", "4", "--seed", "8"],
    ["stats", "--n-list", "48,64", "--replicas", "3", "--seed", "5", "--format", "json"],
])
def test_threads_do_not_change_output(tmp_path, argv):
    _, one = run(tmp_path, "a", *argv, "--threads", "1")
    _, two = run(tmp_path, "b", *argv, "--threads", "2")
    assert one == two


def test_missing_n(tmp_path):
    with pytest.raises(SystemExit):
        cli.main(["sample"])
