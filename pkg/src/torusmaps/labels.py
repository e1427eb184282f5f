"""Angle labels of the rooted unicellular map and what they say about distances.

The word of a rooted map has angles ``a_0..a_L`` (``L = 4n+1``); ``a_p`` is
at ``vertex(p)`` for ``p < L`` and ``a_L`` is the other side of the root
angle at the root vertex ``v0``.  Labels start at 3, go up by one across a
stem and down by one along an edge, and end at 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numba
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from . import rotmap
from .closure import Triangulation, right_region, rightmost_successor


class UnclassifiedEdge(ValueError):
    pass


class BoundViolation(AssertionError):
    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


class DegenerateSubpath(ValueError):
    pass


EDGE_VARIATION = {"N": (0, -2), "P": (-3, 1), "R": (-6, 4)}

# M(v) - m(v) per vertex class, as closed intervals
VERTEX_SPREAD = {
    "a": (2, 2), "b": (3, 3), "c": (3, 3), "d": (3, 3),
    "e": (6, 6), "f": (4, 6), "g": (4, 5), "h": (4, 4),
    "i": (6, 6), "j": (4, 6), "k": (4, 5), "l": (4, 4),
}

SUBPATH_CONSTANT = {
    "LR_l": -2, "RR_l": 0, "RL_l": -3, "LL_l": -5,
    "LR_r": 4, "RR_r": 6, "RL_r": 3, "LL_r": 1,
    "LR_n": 1, "RR_n": 3, "RL_n": 0, "LL_n": -2,
    "LR_l^h": -10, "RR_l^h": -8, "RL_l^h": -11, "LL_l^h": -13,
    "LR_r^h": -4, "RR_r^h": -2, "RL_r^h": -5, "LL_r^h": -7,
    "LR_n^h": -3, "RR_n^h": -1, "RL_n^h": -4, "LL_n^h": -6,
}


class RangeMin:
    """Sparse table for range minima over a fixed integer array."""

    def __init__(self, a):
        a = np.asarray(a)
        self.levels = [a]
        k = 1
        while 2 * k <= len(a):
            prev = self.levels[-1]
            self.levels.append(np.minimum(prev[:-k], prev[k:]))
            k *= 2

    def query(self, i, j):
        """min a[i..j] (inclusive); works elementwise on arrays."""
        i = np.asarray(i)
        j = np.asarray(j)
        lo = np.minimum(i, j)
        hi = np.maximum(i, j)
        span = hi - lo + 1
        lev = np.floor(np.log2(span)).astype(np.int64)
        out = np.empty(np.broadcast(lo, hi).shape, dtype=self.levels[0].dtype)
        flat_lev = np.broadcast_to(lev, out.shape)
        lo_b = np.broadcast_to(lo, out.shape)
        hi_b = np.broadcast_to(hi, out.shape)
        for L in np.unique(flat_lev):
            sel = flat_lev == L
            tab = self.levels[L]
            out[sel] = np.minimum(tab[lo_b[sel]], tab[hi_b[sel] - (1 << L) + 1])
        return out if out.shape else out.item()


@dataclass(eq=False)
class LabelTable:
    tri: Triangulation

    @property
    def word(self):
        return self.tri.word

    @property
    def lam(self) -> np.ndarray:
        return self.tri.lam

    @cached_property
    def L(self) -> int:
        return len(self.word)

    @cached_property
    def angle_vertex(self) -> np.ndarray:
        """Vertex of G holding angle a_i, i = 0..L (the vertex contour)."""
        v = self.tri.g.vertex_of[: self.L]
        return np.concatenate((v, v[:1]))

    @cached_property
    def word_to_graph(self) -> np.ndarray:
        """Vertex ids of the word mapped to vertex ids of G."""
        out = np.empty(self.word.n_vertices, dtype=np.int64)
        out[self.word.vertex] = self.tri.g.vertex_of[: self.L]
        return out

    @cached_property
    def graph_to_word(self) -> np.ndarray:
        out = np.empty_like(self.word_to_graph)
        out[self.word_to_graph] = np.arange(len(out))
        return out

    @cached_property
    def m(self) -> np.ndarray:
        out = np.full(self.word.n_vertices, np.iinfo(np.int64).max)
        np.minimum.at(out, self.angle_vertex, self.lam)
        return out

    @cached_property
    def M(self) -> np.ndarray:
        out = np.full(self.word.n_vertices, np.iinfo(np.int64).min)
        np.maximum.at(out, self.angle_vertex, self.lam)
        return out

    @cached_property
    def b(self) -> np.ndarray:
        """First angle index of each vertex."""
        out = np.full(self.word.n_vertices, self.L + 1)
        np.minimum.at(out, self.angle_vertex, np.arange(self.L + 1))
        return out

    @cached_property
    def rmq(self) -> RangeMin:
        return RangeMin(self.lam)

    def mbar(self, u, v):
        return self.rmq.query(self.b[u], self.b[v])

    @property
    def v0(self) -> int:
        return int(self.tri.g.vertex_of[0])

    # -- structure of the word: proper part, root path, classes

    @cached_property
    def root_path(self) -> list[int]:
        """Vertices r_0 = v0, ..., r_s (first proper vertex), as vertices of G."""
        return [int(self.word_to_graph[x]) for x in self._root_path_word]

    @cached_property
    def _root_path_word(self) -> list[int]:
        w = self.word
        proper = w.proper
        v0 = int(w.vertex[0])
        if proper[v0]:
            return [v0]
        vert = w.vertex
        adj: dict[int, list[int]] = {}
        for p in np.flatnonzero(w.partner >= 0):
            adj.setdefault(int(vert[p]), []).append(int(vert[w.partner[p]]))
        parent = {v0: -1}
        queue = [v0]
        i = 0
        while i < len(queue):
            x = queue[i]
            i += 1
            if proper[x]:
                path = [x]
                while parent[path[-1]] >= 0:
                    path.append(parent[path[-1]])
                return path[::-1]
            for y in adj.get(x, []):
                if y not in parent:
                    parent[y] = x
                    queue.append(y)
        raise AssertionError("no proper vertex reachable")

    @cached_property
    def edge_class(self) -> np.ndarray:
        """Per word position of an edge: 'N', 'P' or 'R' ('' for stems)."""
        w = self.word
        vert = w.vertex
        cls = np.full(self.L, "", dtype="<U1")
        rp = self._root_path_word
        rset = {frozenset(e) for e in zip(rp, rp[1:])}
        core = w.core_half_edge
        for p in np.flatnonzero(w.partner >= 0):
            if core[p]:
                cls[p] = "P"
            elif frozenset((int(vert[p]), int(vert[w.partner[p]]))) in rset:
                cls[p] = "R"
            else:
                cls[p] = "N"
        return cls

    def edge_label_variation(self, p: int) -> tuple[int, int]:
        """(lam(a_{j+1}) - lam(a_i), lam(a_{i+1}) - lam(a_j)) for the edge at position p."""
        w = self.word
        q = int(w.partner[p])
        if q < 0:
            raise UnclassifiedEdge(f"position {p} is a stem")
        i, j = min(p, q), max(p, q)
        lam = self.lam
        got = (int(lam[j + 1] - lam[i]), int(lam[i + 1] - lam[j]))
        cls = str(self.edge_class[p])
        if cls not in EDGE_VARIATION:
            raise UnclassifiedEdge(f"edge at {p} has no class")
        if got != EDGE_VARIATION[cls]:
            raise BoundViolation(f"edge {p} of class {cls}: variation {got}", witness=p)
        return got

    def vertex_class(self, v: int) -> str:
        """Letter a..l of the vertex kinds (root vertex, root path, special, proper, other)."""
        w = self.word
        rp = self._root_path_word
        s = len(rp) - 1
        v = int(self.graph_to_word[v])
        proper = bool(w.proper[v])
        special = v in w.special
        hexa = w.shape == "hexagonal"
        if v == rp[0]:
            if not proper:
                return "i"
            if not special:
                return "j"
            return "k" if hexa else "l"
        if s > 0 and v == rp[-1]:
            if not special:
                return "f"
            return "g" if hexa else "h"
        if v in rp[1:-1]:
            return "e"
        if not proper:
            return "a"
        if not special:
            return "b"
        return "c" if hexa else "d"

    # -- successor chains and the greedy walk

    def successor_chain(self, v: int) -> list[int]:
        """J(v): from b(v), follow stems to their attachment angle, edges to the next angle."""
        w = self.word
        attach = self.tri.attach
        j = int(self.b[v])
        out = [j]
        while j != self.L:
            j = int(attach[j]) if w.partner[j] < 0 else j + 1
            out.append(j)
        return out

    def greedy_walk(self, v: int) -> list[int]:
        """The strictly m-decreasing walk to v0 (stems lead to their attachment vertex)."""
        w = self.word
        attach = self.tri.attach
        lam = self.lam
        r = self.angle_vertex
        path = [v]
        while path[-1] != self.v0:
            x = path[-1]
            idx = np.flatnonzero((r[: self.L] == x) & (lam[: self.L] == self.m[x]))
            i = int(idx[0])
            nxt = int(r[attach[i]]) if w.partner[i] < 0 else int(r[i + 1])
            if self.m[nxt] >= self.m[x]:
                raise BoundViolation("greedy walk did not decrease m", witness=x)
            path.append(nxt)
        return path


# ---------------------------------------------------------------- distances


def adjacency(tri: Triangulation) -> csr_matrix:
    g = tri.g
    vert = g.vertex_of
    n = g.n_vertices
    h = np.arange(g.n_half_edges)
    a = csr_matrix((np.ones(len(h), dtype=np.int8), (vert[h], vert[g.twin[h]])), shape=(n, n))
    a.data[:] = 1
    return a


def bfs(adj: csr_matrix, sources) -> np.ndarray:
    d = shortest_path(adj, method="D", unweighted=True, indices=sources)
    return d.astype(np.int64)


def distance_bounds(tri: Triangulation, lt: LabelTable | None = None, pairs: int = 0,
                    rng: np.random.Generator | None = None) -> list[dict]:
    """Check m/7 <= d(v0, v) <= m for all v and the pairwise bound on random pairs."""
    lt = lt or LabelTable(tri)
    adj = adjacency(tri)
    d0 = bfs(adj, lt.v0)
    m = lt.m
    bad = []
    for v in np.flatnonzero((7 * d0 < m) | (d0 > m)).tolist():
        bad.append({"check": "m/7<=d<=m", "vertex": v, "d": int(d0[v]), "m": int(m[v])})
    if pairs:
        n = len(m)
        us = rng.integers(n, size=pairs)
        vs = rng.integers(n, size=pairs)
        src = np.unique(us)
        dist = bfs(adj, src)
        row = np.searchsorted(src, us)
        duv = dist[row, vs]
        bound = m[us] + m[vs] - 2 * lt.mbar(us, vs) + 14
        for k in np.flatnonzero(duv > bound).tolist():
            bad.append({"check": "pairwise", "u": int(us[k]), "v": int(vs[k]), "d": int(duv[k]), "bound": int(bound[k])})
    return bad


def neighbor_label_bound(tri: Triangulation, lt: LabelTable | None, h: int) -> int:
    lt = lt or LabelTable(tri)
    g = tri.g
    val = abs(int(lt.m[g.vertex_of[h]]) - int(lt.m[g.vertex_of[g.twin[h]]]))
    if val > 7:
        raise BoundViolation(f"|m(u)-m(v)| = {val} on half-edge {h}", witness=h)
    return val


def label_checks(tri: Triangulation, lt: LabelTable | None = None) -> list[dict]:
    """All exact label facts that need no distances."""
    lt = lt or LabelTable(tri)
    bad = []
    lam = lt.lam
    L = lt.L
    if lam[0] != 3 or lam[L] != 0:
        bad.append({"check": "endpoints", "first": int(lam[0]), "last": int(lam[L])})
    if np.any(lam[:L] <= 0):
        bad.append({"check": "positive", "index": int(np.flatnonzero(lam[:L] <= 0)[0])})
    w = lt.word
    stems = np.flatnonzero(w.partner < 0)
    att = tri.attach[stems]
    if np.any(lam[att] != lam[stems] - 1):
        bad.append({"check": "attach_label", "stem": int(stems[np.flatnonzero(lam[att] != lam[stems] - 1)[0]])})
    if np.any(att <= stems):
        bad.append({"check": "attach_after_stem"})
    # every angle of G carries the label of its word angle
    ga = tri.gamma_angle
    if np.any(tri.angle_label != lam[ga]):
        bad.append({"check": "inheritance"})
    m = lt.m
    if m[lt.v0] != 0 or np.any(np.delete(m, lt.v0) <= 0):
        bad.append({"check": "m_positive"})
    spread = lt.M - lt.m
    if np.any(spread > 6):
        bad.append({"check": "M-m<=6", "vertex": int(np.argmax(spread))})
    for v in range(len(m)):
        c = lt.vertex_class(v)
        lo, hi = VERTEX_SPREAD[c]
        if not lo <= spread[v] <= hi:
            bad.append({"check": "vertex_class", "vertex": v, "class": c, "spread": int(spread[v])})
    for p in np.flatnonzero(w.partner > np.arange(L)).tolist():
        try:
            lt.edge_label_variation(p)
        except BoundViolation as exc:
            bad.append({"check": "edge_variation", "position": p, "msg": str(exc)})
    g = tri.g
    vert = g.vertex_of
    if np.any(np.abs(m[vert] - m[vert[g.twin]]) > 7):
        bad.append({"check": "|m(u)-m(v)|<=7"})
    return bad


def chain_checks(lt: LabelTable, vertices) -> list[dict]:
    bad = []
    lam = lt.lam
    for v in vertices:
        J = lt.successor_chain(v)
        k = int(lam[J[0]])
        if k <= 0 or len(J) != k + 1:
            bad.append({"check": "chain_length", "vertex": v})
            continue
        b = int(lt.b[v])
        for i, j in enumerate(J):
            if lam[j] != k - i:
                bad.append({"check": "chain_labels", "vertex": v})
                break
            cand = np.flatnonzero(lam[b:] == k - i)
            if b + int(cand[0]) != j:
                bad.append({"check": "chain_min_index", "vertex": v, "i": i})
                break
        walk = lt.greedy_walk(v)
        if len(walk) - 1 > lt.m[v]:
            bad.append({"check": "greedy_length", "vertex": v})
    return bad


# ---------------------------------------------------------------- rightmost walks


@dataclass
class RightmostWalk:
    start: int
    edges: list[int]  # W_R(e) as half-edges
    vertices: list[int]
    path_edges: list[int]  # P_R(e)
    path_vertices: list[int]
    h: list[int]


def _right_between(g, a, d):
    out = []
    q = int(g.next_ccw[a])
    while q != d:
        out.append(q)
        q = int(g.next_ccw[q])
    return out


def rightmost_walk(tri: Triangulation, e: int, succ: np.ndarray | None = None) -> RightmostWalk:
    g = tri.g
    if not tri.out[e]:
        raise ValueError("rightmost walks start along an outgoing half-edge")
    if succ is None:
        succ = rightmost_successor(tri)
    vert = g.vertex_of
    v0 = tri.v0
    edges = [e]
    verts = [int(vert[e]), int(vert[g.twin[e]])]
    limit = g.n_half_edges + 3
    while verts[-1] != v0:
        d = int(succ[edges[-1]])
        edges.append(d)
        verts.append(int(vert[g.twin[d]]))
        if len(edges) > limit:
            raise AssertionError("rightmost walk never reaches the root vertex")
    last = {}
    for i, v in enumerate(verts):
        last[v] = i
    pe, pv = [], [verts[0]]
    i = 0
    k = len(edges)
    while i < k:
        i = last[verts[i]]
        if i >= k:
            break
        pe.append(edges[i])
        pv.append(verts[i + 1])
        i += 1
    h = []
    for idx in range(1, len(pe)):
        a = int(g.twin[pe[idx - 1]])
        if any(tri.out[x] for x in _right_between(g, a, pe[idx])):
            h.append(pv[idx])
    return RightmostWalk(e, edges, verts, pe, pv, h)


def appendix_walk_checks(tri: Triangulation, lt: LabelTable | None = None) -> tuple[list[dict], dict]:
    """W_R and P_R bounds over every outgoing half-edge; returns violations and extremes."""
    lt = lt or LabelTable(tri)
    g = tri.g
    succ = rightmost_successor(tri)
    m = lt.m
    bad = []
    stats = {"max_h": 0, "max_pruned": 0, "min_wr_slack": 10**9, "min_pr_slack": 10**9}
    for e in np.flatnonzero(tri.out).tolist():
        w = rightmost_walk(tri, e, succ)
        u = int(g.vertex_of[e])
        W, P = len(w.edges), len(w.path_edges)
        mu = int(m[u])
        if not mu - 18 <= W <= mu + 6:
            bad.append({"check": "m-18<=|W_R|<=m+6", "edge": e, "W": W, "m": mu})
        if not P <= W <= P + 24:
            bad.append({"check": "|P_R|<=|W_R|<=|P_R|+24", "edge": e, "W": W, "P": P})
        if len(w.h) > 4:
            bad.append({"check": "|h|<=4", "edge": e, "h": len(w.h)})
        if not mu - 42 <= P <= mu + 6:
            bad.append({"check": "m-42<=|P_R|<=m+6", "edge": e, "P": P, "m": mu})
        stats["max_h"] = max(stats["max_h"], len(w.h))
        stats["max_pruned"] = max(stats["max_pruned"], W - P)
        stats["min_wr_slack"] = min(stats["min_wr_slack"], W - (mu - 18), mu + 6 - W)
        stats["min_pr_slack"] = min(stats["min_pr_slack"], P - (mu - 42), mu + 6 - P)
    return bad, stats


# ---------------------------------------------------------------- sub-paths of shortest paths


@numba.njit(cache=True)
def _overlap_dp(order, dist0, vert, twin, nxt, first, good):
    nv = dist0.shape[0]
    best = np.zeros(nv, np.int64)
    choice = np.full(nv, -1, np.int64)
    for x in order:
        if dist0[x] == 0:
            continue
        top = -1
        arg = -1
        h = first[x]
        while True:
            y = vert[twin[h]]
            if dist0[y] == dist0[x] - 1:
                val = best[y] + (1 if good[h] else 0)
                if val > top or (val == top and h < arg):
                    top = val
                    arg = h
            h = nxt[h]
            if h == first[x]:
                break
        best[x] = top
        choice[x] = arg
    return choice


def shortest_path_max_overlap(tri: Triangulation, u: int, prefer: list[int], dist0: np.ndarray) -> list[int]:
    """Shortest path u -> v0 (as half-edges) using as many ``prefer`` edges as possible.

    Layered dynamic programme over the BFS levels from v0; ties go to the
    smallest half-edge id so the path is deterministic.
    """
    g = tri.g
    vert = g.vertex_of
    good = np.zeros(g.n_half_edges, dtype=bool)
    if len(prefer):
        pr = np.asarray(prefer, dtype=np.int64)
        good[pr] = True
        good[g.twin[pr]] = True
    first = tri.cache.get("first_half_edge")
    if first is None:
        first = np.empty(g.n_vertices, dtype=np.int64)
        first[vert[::-1]] = np.arange(g.n_half_edges)[::-1]
        tri.cache["first_half_edge"] = first
    d = np.asarray(dist0, dtype=np.int64)
    order = np.argsort(d, kind="stable")
    choice = _overlap_dp(order, d, vert, g.twin, g.next_ccw, first, good)
    path = []
    x = u
    while d[x] > 0:
        h = int(choice[x])
        path.append(h)
        x = int(vert[g.twin[h]])
    return path


def split_at_path(tri: Triangulation, q_edges: list[int], p_vertices: list[int]) -> list[list[int]]:
    """Cut Q into sub-paths meeting P only at their endpoints."""
    vert = tri.g.vertex_of
    twin = tri.g.twin
    on_p = set(p_vertices)
    parts, cur = [], []
    for h in q_edges:
        cur.append(h)
        if int(vert[twin[h]]) in on_p:
            parts.append(cur)
            cur = []
    if cur:
        parts.append(cur)
    return parts


def classify_subpath_type(tri: Triangulation, walk: RightmostWalk, s_edges: list[int], lab=None) -> tuple[str, int, int, int]:
    """Type tag of a sub-path S of G relative to P_R(e), with its endpoints i < j on P_R.

    Returns ``(tag, c, i, j)``.
    """
    g = tri.g
    vert = g.vertex_of
    pv = walk.path_vertices
    pe = walk.path_edges
    k = len(pe)
    pos = {v: idx for idx, v in enumerate(pv)}
    w0 = int(vert[s_edges[0]])
    wp = int(vert[g.twin[s_edges[-1]]])
    if w0 not in pos or wp not in pos or w0 == wp:
        raise DegenerateSubpath("endpoints must be distinct vertices of P_R")
    i, j = pos[w0], pos[wp]
    if i > j:
        raise DegenerateSubpath("endpoints must be ordered along P_R")
    pe_set = {int(h) for h in pe} | {int(g.twin[h]) for h in pe}
    if len(s_edges) == 1 and s_edges[0] in pe_set:
        raise DegenerateSubpath("sub-path is an edge of P_R")
    inner = [int(vert[g.twin[h]]) for h in s_edges[:-1]]
    if any(x in pos for x in inner):
        raise DegenerateSubpath("sub-path meets P_R in its interior")
    leave_right = False
    if i > 0:
        leave_right = s_edges[0] in _right_between(g, int(g.twin[pe[i - 1]]), pe[i])
    enter_right = False
    if j < k:
        enter_right = int(g.twin[s_edges[-1]]) in _right_between(g, int(g.twin[pe[j - 1]]), pe[j])
    tag = ("R" if leave_right else "L") + ("R" if enter_right else "L")
    cyc = list(s_edges) + [int(g.twin[h]) for h in reversed(pe[i:j])]
    if lab is None:
        lab = rotmap.homology_labels(g)
    if lab[cyc].sum(axis=0).any():
        sub = "n"
    elif right_region(g, cyc) is not None:
        sub = "r"
    else:
        sub = "l"
    tag += "_" + sub
    cverts = {int(vert[h]) for h in cyc}
    if cverts & set(walk.h):
        tag += "^h"
    return tag, SUBPATH_CONSTANT[tag], i, j


def interior_leaving_count(tri: Triangulation, cyc: list[int]) -> int | None:
    """Edges inside the disk bounded by cyc that leave a vertex of cyc (y = t - 3 identity)."""
    g = tri.g
    region = right_region(g, cyc)
    side = "right"
    if region is None:
        cyc = [int(g.twin[h]) for h in reversed(cyc)]
        region = right_region(g, cyc)
        side = "left"
    if region is None:
        return None
    cset = {int(x) for x in cyc} | {int(g.twin[x]) for x in cyc}
    y = 0
    for idx, d in enumerate(cyc):
        a = int(g.twin[cyc[idx - 1]])
        for x in _right_between(g, a, d):
            if tri.out[x] and x not in cset:
                y += 1
    return y


def appendix_path_checks(tri: Triangulation, lt: LabelTable, edges=None, lab=None) -> tuple[list[dict], dict]:
    """Sub-path constants, y = t - 3, n_LLl <= 2, n^Y_LLn <= 2 and the |Q| bound."""
    g = tri.g
    vert = g.vertex_of
    adj = adjacency(tri)
    dist0 = bfs(adj, lt.v0)
    succ = rightmost_successor(tri)
    if lab is None:
        lab = rotmap.homology_labels(g)
    if edges is None:
        edges = np.flatnonzero(tri.out).tolist()
    bad = []
    counts: dict[str, int] = {}
    for e in edges:
        w = rightmost_walk(tri, e, succ)
        u = int(vert[e])
        q = shortest_path_max_overlap(tri, u, w.path_edges, dist0)
        parts = split_at_path(tri, q, w.path_vertices)
        types = []
        for s in parts:
            try:
                tag, c, i, j = classify_subpath_type(tri, w, s, lab)
            except DegenerateSubpath:
                types.append((None, None, None))
                continue
            counts[tag] = counts.get(tag, 0) + 1
            types.append((tag, i, j))
            p = len(s)
            if p < j - i + c:
                bad.append({"check": "p>=j-i+c", "edge": e, "type": tag, "p": p, "i": i, "j": j})
            if not tag.split("_")[1].startswith("n"):
                cyc = list(s) + [int(g.twin[h]) for h in reversed(w.path_edges[i:j])]
                y = interior_leaving_count(tri, cyc)
                if y is not None and y != len(cyc) - 3:
                    bad.append({"check": "y=t-3", "edge": e, "y": y, "t": len(cyc)})
        n_lll = sum(1 for t, _, _ in types if t == "LL_l")
        if n_lll > 2:
            bad.append({"check": "n_LLl<=2", "edge": e, "count": n_lll})
        # Y: sub-paths outside the 18-wide windows after each h(e) vertex is passed
        hpos = sorted(w.path_vertices.index(x) for x in w.h)
        ends = []
        for s in parts:
            x = int(vert[g.twin[s[-1]]])
            ends.append(w.path_vertices.index(x) if x in w.path_vertices else -1)
        window = set()
        for z in range(1, len(hpos) + 1):
            tz = next((qq for qq, jj in enumerate(ends) if jj >= 0 and sum(1 for hp in hpos if hp <= jj) >= z), None)
            if tz is not None:
                window.update(range(tz, tz + 18))
        n_lln_y = sum(1 for qq, (t, _, _) in enumerate(types) if t == "LL_n" and qq not in window)
        if n_lln_y > 2:
            bad.append({"check": "n^Y_LLn<=2", "edge": e, "count": n_lln_y})
        n_lrl = sum(1 for t, _, _ in types if t == "LR_l")
        n_rll = sum(1 for t, _, _ in types if t == "RL_l")
        if len(q) < len(w.path_edges) - 2 * n_lrl - 3 * n_rll - 922:
            bad.append({"check": "|Q| bound", "edge": e})
    return bad, counts
