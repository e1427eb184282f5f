"""Replica orchestration: stats tables, rescaled process dumps, trend summaries.

Replica ``i`` of size ``n`` always uses the generator stream
``(seed, i + n * REPLICA_STRIDE)``; pools only change who computes a row,
never its value, and rows are written in (n, replica) order.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .. import _rng
from .. import forests as fo
from .. import paths
from .. import sampler
from .. import labels as lb
from ..closure import complete_closure
from ..decomp import decompose, shifted_labeling
from ..unicell import slot_angles, strip_root
from .metrics import StatRow, measure

REPLICA_STRIDE = 1 << 20
PSEUDO_METRIC_MAX_N = 64


@dataclass
class ExperimentConfig:
    experiment: str = "stats"
    n_list: list[int] = field(default_factory=lambda: [1024])
    replicas: int = 8
    seed: int = 0
    out: str | None = None
    mode: str | None = None
    threads: int = 1
    timing: bool = False
    points: int = 256

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        """key = value lines; '#' starts a comment; n_list is comma separated."""
        cfg = cls()
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, value = line.partition("=")
            key, value = key.strip().replace("-", "_"), value.strip()
            if key == "n_list":
                cfg.n_list = [int(x) for x in value.replace(" ", "").split(",") if x]
            elif key in ("replicas", "seed", "threads", "points"):
                setattr(cfg, key, int(value))
            elif key == "timing":
                cfg.timing = value.lower() in ("1", "true", "yes")
            elif key in ("experiment", "out", "mode"):
                setattr(cfg, key, value or None)
            else:
                raise ValueError(f"unknown config key {key!r}")
        return cfg

    def to_json_obj(self) -> dict:
        return asdict(self)


def replica_index(n: int, replica: int) -> int:
    return replica + n * REPLICA_STRIDE


def pmap(fn, tasks: list, threads: int = 1) -> list:
    """Ordered map; results do not depend on the worker count."""
    if threads <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * threads))))


def _stat_task(args):
    n, seed, replica, mode, timing = args
    row, extra = measure(n, seed, replica_index(n, replica), mode=mode, timing=timing)
    row.replica = replica
    return row, extra


def run_stats(cfg: ExperimentConfig) -> tuple[list[StatRow], list[dict]]:
    """Diameter and label-gap rows for every (n, replica)."""
    tasks = [(n, cfg.seed, r, cfg.mode, cfg.timing) for n in cfg.n_list for r in range(cfg.replicas)]
    res = pmap(_stat_task, tasks, cfg.threads)
    return [r for r, _ in res], [e for _, e in res]


run_diameter_scaling = run_stats
run_label_gap = run_stats


def stats_csv(rows: list[StatRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(StatRow.header())
    for r in rows:
        w.writerow(r.row())
    return buf.getvalue()


def summarize(rows: list[StatRow]) -> dict:
    """Per-n medians, the log-log diameter slope and the gap trend."""
    by_n: dict[int, list[StatRow]] = {}
    for r in rows:
        by_n.setdefault(r.n, []).append(r)
    ns = sorted(by_n)
    med_d = [float(np.median([r.diameter for r in by_n[n]])) for n in ns]
    med_g = [float(np.median([r.gap_over_n14 for r in by_n[n]])) for n in ns]
    med_dq = [float(np.median([r.diam_over_n14 for r in by_n[n]])) for n in ns]
    out = {"n": ns, "median_diameter": med_d, "median_gap_over_n14": med_g, "median_diam_over_n14": med_dq}
    if len(ns) >= 2 and min(med_d) > 0:
        slope = np.polyfit(np.log(ns), np.log(med_d), 1)[0]
        out["diameter_slope"] = float(slope)
        out["gap_decreasing"] = bool(all(b < a for a, b in zip(med_g, med_g[1:])))
        out["diam_over_n14_spread"] = float(max(med_dq) / min(med_dq) - 1)
    return out


# ---------------------------------------------------------------- rescaled processes


def _thin(x: np.ndarray, points: int) -> np.ndarray:
    if len(x) <= points:
        return np.arange(len(x))
    return np.unique(np.linspace(0, len(x) - 1, points).round().astype(np.int64))


def rescaled_record(n: int, seed: int, replica: int, mode: str | None = None, points: int = 256) -> dict:
    """Rescaled parameter vector and thinned contour, label and S traces of one sample."""
    rec = sampler.sample_triangulation(n, seed, replica_index(n, replica), mode=mode, close=False)
    u, slot = strip_root(rec.word)
    d = decompose(u)
    g_scale = (9 / (8 * n)) ** 0.25
    vec = {
        "k": d.k,
        "rho": [r / n for r in d.rho],
        "gamma": [g_scale * g for g in d.gamma],
        "sigma": [s / math.sqrt(2 * n) for s in d.sigma],
    }
    forests = []
    for f in d.forests:
        _, C, Lab = fo.contour_pair(f)
        C = np.asarray(C)
        Lab = np.asarray(Lab)
        idx = _thin(C, points)
        forests.append({
            "s": (idx / (2 * n)).round(9).tolist(),
            "C": (C[idx] / math.sqrt(3 * n)).round(9).tolist(),
            "L": (g_scale * Lab[idx]).round(9).tolist(),
            "C_end": int(C[-1]),
            "tau": f.tau,
        })
    sl = shifted_labeling(d, u)
    sb = sl.s_bullet
    idx = _thin(sb, points)
    out = {
        "n": n, "seed": seed, "replica": replica, "vector": vec, "forests": forests,
        "S": {"s": (idx / len(sb)).round(9).tolist(), "value": (g_scale * sb[idx]).round(9).tolist(),
              "ends": [int(sb[0]), int(sb[-1])]},
        "max_m_proxy": int(sb.max() - sb.min()),
    }
    if n <= PSEUDO_METRIC_MAX_N:
        out["d0"] = pseudo_metric(rec.word, u, slot, sl).tolist()
    return out


def pseudo_metric(T, u, slot, sl) -> np.ndarray:
    """Integer matrix d°(i, j) = m(r_Q(i)) + m(r_Q(j)) - 2 mbar over the angles of Q.

    Symmetrised from i <= j; multiply by (9/8n)^(1/4) for the rescaled version.
    """
    tri = complete_closure(T)
    lt = lb.LabelTable(tri)
    vm = sampler.unrooted_vertex_map(u, slot_angles(u)[slot - 1], tri)
    q = vm[sl.r_q]
    m = lt.m[q]
    N = len(q)
    i, j = np.triu_indices(N)
    d = np.zeros((N, N), dtype=np.int64)
    d[i, j] = m[i] + m[j] - 2 * lt.mbar(q[i], q[j])
    d[j, i] = d[i, j]
    return d


def _rescaled_task(args):
    return rescaled_record(*args)


def emit_rescaled_processes(cfg: ExperimentConfig) -> list[dict]:
    tasks = [(n, cfg.seed, r, cfg.mode, cfg.points) for n in cfg.n_list for r in range(cfg.replicas)]
    return pmap(_rescaled_task, tasks, cfg.threads)


def jsonl(objs) -> str:
    return "".join(json.dumps(o, sort_keys=True, separators=(",", ":")) + "\n" for o in objs)
