"""Graph distances on closed triangulations: BFS, exact diameters, label gaps."""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, fields

import numba
import numpy as np

from .. import labels as lb
from .. import sampler
from ..closure import Triangulation


@numba.njit(cache=True)
def _bfs(indptr, indices, src):
    n = indptr.shape[0] - 1
    dist = np.full(n, -1, np.int64)
    queue = np.empty(n, np.int64)
    dist[src] = 0
    queue[0] = src
    head, tail = 0, 1
    while head < tail:
        v = queue[head]
        head += 1
        for i in range(indptr[v], indptr[v + 1]):
            w = indices[i]
            if dist[w] < 0:
                dist[w] = dist[v] + 1
                queue[tail] = w
                tail += 1
    return dist


class Graph:
    """CSR adjacency of a triangulation (multi-edges and loops kept once)."""

    def __init__(self, tri: Triangulation):
        a = lb.adjacency(tri)
        self.indptr = a.indptr.astype(np.int64)
        self.indices = a.indices.astype(np.int64)
        self.n = a.shape[0]
        self.bfs_count = 0

    def bfs(self, src: int) -> np.ndarray:
        self.bfs_count += 1
        return _bfs(self.indptr, self.indices, int(src))


@dataclass
class Diameter:
    low: int
    high: int
    bfs_runs: int

    @property
    def exact(self) -> bool:
        return self.low == self.high

    @property
    def value(self) -> float:
        return (self.low + self.high) / 2


def diameter(g: Graph, budget: int | None = None) -> Diameter:
    """Exact diameter by iterative fringe upper bounds (iFUB).

    Starts from the middle of a double sweep, then scans BFS levels of that
    centre from the outside in until the lower bound beats twice the level.
    With ``budget`` BFS runs exhausted (the four sweeps included) the
    certified interval is returned.
    """
    if g.n == 1:
        return Diameter(0, 0, 0)
    d = g.bfs(0)
    a = int(np.argmax(d))
    da = g.bfs(a)
    b = int(np.argmax(da))
    low = int(da[b])
    db = g.bfs(b)
    # a vertex halfway between a and b
    mid = np.flatnonzero((da + db == low) & (da == low // 2))
    u = int(mid[0]) if len(mid) else a
    du = g.bfs(u)
    ecc = int(du.max())
    low = max(low, ecc)
    high = 2 * ecc
    order = np.argsort(-du, kind="stable")
    levels = du[order]
    pos = 0
    for i in range(ecc, 0, -1):
        # pairs not yet seen both lie within distance i of u
        high = min(high, max(low, 2 * i))
        if low >= high:
            break
        while pos < len(order) and levels[pos] == i:
            if budget is not None and g.bfs_count >= budget:
                return Diameter(low, high, g.bfs_count)
            low = max(low, int(g.bfs(int(order[pos])).max()))
            pos += 1
    return Diameter(low, low, g.bfs_count)


def brute_diameter(g: Graph) -> int:
    return max(int(g.bfs(v).max()) for v in range(g.n))


@dataclass
class LabelGap:
    max_gap: int
    upper_violations: int  # d > m
    lower_violations: int  # 7 d < m


def label_gap(tri: Triangulation, g: Graph | None = None, lt: lb.LabelTable | None = None) -> LabelGap:
    lt = lt or lb.LabelTable(tri)
    g = g or Graph(tri)
    d = g.bfs(lt.v0)
    m = lt.m
    return LabelGap(int(np.abs(d - m).max()), int(np.sum(d > m)), int(np.sum(7 * d < m)))


@dataclass
class StatRow:
    n: int
    replica: int
    seed: int
    diameter: float
    max_label_gap: int
    gap_over_n14: float
    diam_over_n14: float
    k: int
    sum_sigma: int
    runtime_ms: float | str

    @classmethod
    def header(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def row(self) -> list:
        return [getattr(self, f) for f in self.header()]

    def to_json_obj(self) -> dict:
        return asdict(self)


def measure(n: int, seed: int, replica: int, mode: str | None = None, timing: bool = False,
            diameter_budget: int | None = None) -> tuple[StatRow, dict]:
    """One replica: sample, close, measure.  The dict carries hard-bound counts."""
    t0 = time.perf_counter()
    rec = sampler.sample_triangulation(n, seed, replica, mode=mode)
    tri = rec.triangulation
    g = Graph(tri)
    diam = diameter(g, diameter_budget)
    gap = label_gap(tri, g)
    q = n ** 0.25
    pv = rec.parameters
    ms = round(1e3 * (time.perf_counter() - t0), 3) if timing else ""
    row = StatRow(n, replica, seed, diam.value, gap.max_gap, round(gap.max_gap / q, 6),
                  round(diam.value / q, 6), pv.k, sum(pv.sigma[: pv.t]), ms)
    extra = {"diameter_exact": diam.exact, "diameter_low": diam.low, "diameter_high": diam.high,
             "d_gt_m": gap.upper_violations, "7d_lt_m": gap.lower_violations}
    return row, extra
