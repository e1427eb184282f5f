"""Maps on oriented surfaces as rotation systems with dangling stems.

Half-edge ``h`` has a twin (``-1`` for a stem) and a successor ``next_ccw[h]``
counterclockwise around its vertex.  Vertices and faces are orbits computed
on demand.  The face permutation is ``phi(h) = next_ccw[twin(h)]`` where a
stem acts as its own twin, so the face walk goes out along ``h``, turns and
comes back along the next half-edge clockwise at the far end.  A stem is
thus passed on both of its sides in one step.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import breadth_first_order, connected_components


class NonInvolutionTwin(ValueError):
    pass


class BrokenPermutation(ValueError):
    pass


class GenusMismatch(ValueError):
    pass


class NotGenusOne(ValueError):
    pass


class Disconnected(ValueError):
    pass


def perm_orbits(perm: np.ndarray) -> tuple[int, np.ndarray]:
    """Number of cycles of a permutation and the cycle index of each point."""
    n = len(perm)
    if n == 0:
        return 0, np.zeros(0, dtype=np.int64)
    g = coo_matrix((np.ones(n, dtype=np.int8), (np.arange(n), perm)), shape=(n, n))
    k, lab = connected_components(g, directed=True, connection="weak")
    return int(k), lab.astype(np.int64)


@dataclass(frozen=True, eq=False)
class RotMap:
    twin: np.ndarray
    next_ccw: np.ndarray
    genus: int | None = None
    root: int | None = None

    def __post_init__(self):
        twin = np.asarray(self.twin, dtype=np.int64)
        nxt = np.asarray(self.next_ccw, dtype=np.int64)
        object.__setattr__(self, "twin", twin)
        object.__setattr__(self, "next_ccw", nxt)
        h = len(twin)
        if len(nxt) != h:
            raise BrokenPermutation("twin and next_ccw differ in length")
        if h and (nxt.min() < 0 or nxt.max() >= h or len(np.unique(nxt)) != h):
            raise BrokenPermutation("next_ccw is not a permutation")
        e = twin >= 0
        if np.any(twin >= h):
            raise NonInvolutionTwin("twin out of range")
        idx = np.flatnonzero(e)
        if np.any(twin[idx] == idx) or np.any(twin[twin[idx]] != idx):
            raise NonInvolutionTwin("twin must be a fixed-point-free involution on edges")
        if self.genus is not None and self.euler_genus() != self.genus:
            raise GenusMismatch(f"declared genus {self.genus}, Euler count gives {self.euler_genus()}")

    # -- sizes

    @property
    def n_half_edges(self) -> int:
        return len(self.twin)

    def is_stem(self, h) -> bool:
        return self.twin[h] < 0

    @property
    def n_stems(self) -> int:
        return int(np.count_nonzero(self.twin < 0))

    @property
    def n_edges(self) -> int:
        return int(np.count_nonzero(self.twin >= 0)) // 2

    @cached_property
    def _vertices(self):
        return perm_orbits(self.next_ccw)

    @property
    def n_vertices(self) -> int:
        return self._vertices[0]

    @property
    def vertex_of(self) -> np.ndarray:
        return self._vertices[1]

    @cached_property
    def phi(self) -> np.ndarray:
        t = np.where(self.twin >= 0, self.twin, np.arange(self.n_half_edges))
        return self.next_ccw[t]

    @cached_property
    def _faces(self):
        return perm_orbits(self.phi)

    @property
    def n_faces(self) -> int:
        return self._faces[0]

    @property
    def face_of(self) -> np.ndarray:
        return self._faces[1]

    def euler_genus(self) -> int:
        chi = self.n_vertices - self.n_edges + self.n_faces
        if chi % 2:
            raise GenusMismatch(f"odd Euler characteristic {chi}")
        return (2 - chi) // 2

    @cached_property
    def prev_ccw(self) -> np.ndarray:
        p = np.empty_like(self.next_ccw)
        p[self.next_ccw] = np.arange(self.n_half_edges)
        return p

    def head(self, h: int) -> int:
        """Vertex at the far end of an edge half-edge."""
        return int(self.vertex_of[self.twin[h]])

    def edge_ids(self) -> np.ndarray:
        """One representative half-edge per edge (the smaller id)."""
        idx = np.arange(self.n_half_edges)
        return idx[(self.twin >= 0) & (self.twin > idx)]

    def is_connected(self) -> bool:
        if self.n_half_edges == 0:
            return True
        e = np.flatnonzero(self.twin >= 0)
        h = self.n_half_edges
        rows = np.concatenate((np.arange(h), e))
        cols = np.concatenate((self.next_ccw, self.twin[e]))
        g = coo_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(h, h))
        return connected_components(g, directed=False)[0] == 1

    # -- faces

    def faces(self) -> list[list[int]]:
        """Face walks as half-edge lists starting at the smallest id; stems listed twice."""
        seen = np.zeros(self.n_half_edges, dtype=bool)
        out = []
        for h0 in range(self.n_half_edges):
            if seen[h0]:
                continue
            walk = []
            h = h0
            while not seen[h]:
                seen[h] = True
                walk.append(h)
                if self.twin[h] < 0:
                    walk.append(h)
                h = int(self.phi[h])
            out.append(walk)
        return out

    def face_degrees(self) -> np.ndarray:
        deg = np.bincount(self.face_of, minlength=self.n_faces)
        stems = np.bincount(self.face_of[self.twin < 0], minlength=self.n_faces)
        return deg + stems

    # -- serialization

    def to_table(self) -> list[tuple[int | None, int]]:
        return [(None if t < 0 else int(t), int(n)) for t, n in zip(self.twin, self.next_ccw)]

    def to_json_obj(self) -> dict:
        return {
            "genus": self.euler_genus(),
            "half_edges": [
                {"id": i, "twin": t, "next_ccw": n} for i, (t, n) in enumerate(self.to_table())
            ],
            "root_half_edge": self.root,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), separators=(",", ":"))

    def same_as(self, other: "RotMap") -> bool:
        return (
            np.array_equal(self.twin, other.twin)
            and np.array_equal(self.next_ccw, other.next_ccw)
            and self.root == other.root
        )


def build_map(table, genus: int | None = None, root: int | None = None) -> RotMap:
    """RotMap from rows ``(twin or None, next_ccw)`` indexed by half-edge id."""
    twin = np.array([-1 if t is None else int(t) for t, _ in table], dtype=np.int64)
    nxt = np.array([int(n) for _, n in table], dtype=np.int64)
    return RotMap(twin, nxt, genus=genus, root=root)


def from_json(text_or_obj) -> RotMap:
    obj = json.loads(text_or_obj) if isinstance(text_or_obj, str) else text_or_obj
    rows = sorted(obj["half_edges"], key=lambda r: r["id"])
    if [r["id"] for r in rows] != list(range(len(rows))):
        raise BrokenPermutation("ids must be dense from 0")
    return build_map([(r["twin"], r["next_ccw"]) for r in rows], obj.get("genus"), obj.get("root_half_edge"))


def from_rotations(rotations: list[list[tuple[int, int | None]]]) -> RotMap:
    """Build from per-vertex ccw lists of ``(edge_id, end)`` entries.

    ``end`` is 0 or 1 for the two ends of an edge and ``None`` for a stem
    (whose edge id is then just a unique tag).
    """
    ids = {}
    nxt = []
    for rot in rotations:
        first = len(nxt)
        for j, key in enumerate(rot):
            ids[tuple(key)] = len(nxt)
            nxt.append(first + (j + 1) % len(rot))
    twin = [-1] * len(nxt)
    for (e, end), h in ids.items():
        if end is not None:
            twin[h] = ids[(e, 1 - end)]
    return RotMap(np.array(twin), np.array(nxt))


# ---------------------------------------------------------------- homology


def homology_labels(m: RotMap) -> np.ndarray:
    """Integer vector per half-edge (stems get zeros).

    Spanning-tree edges get (0, 0); a spanning tree of the dual on the
    remaining edges is peeled from its leaves so every face boundary sums
    to zero; the 2g leftover edges are generators with unit vectors.
    """
    if not m.is_connected():
        raise Disconnected("homology needs a connected map")
    g = m.euler_genus()
    H = m.n_half_edges
    lab = np.zeros((H, max(2 * g, 1)), dtype=np.int64)
    vert = m.vertex_of
    face = m.face_of
    reps = m.edge_ids()
    # primal spanning tree by BFS
    nv = m.n_vertices
    in_tree = np.zeros(H, dtype=bool)
    seen_v = np.zeros(nv, dtype=bool)
    adj: list[list[int]] = [[] for _ in range(nv)]
    for h in range(H):
        if m.twin[h] >= 0:
            adj[vert[h]].append(h)
    seen_v[vert[0]] = True if H else False
    queue = [int(vert[0])] if H else []
    while queue:
        v = queue.pop()
        for h in adj[v]:
            w = vert[m.twin[h]]
            if not seen_v[w]:
                seen_v[w] = True
                in_tree[h] = in_tree[m.twin[h]] = True
                queue.append(w)
    # dual spanning tree over the cotree edges
    nf = m.n_faces
    dual_adj: list[list[int]] = [[] for _ in range(nf)]
    for h in reps:
        if not in_tree[h]:
            dual_adj[face[h]].append(int(h))
            dual_adj[face[m.twin[h]]].append(int(m.twin[h]))
    parent_edge = [-1] * nf
    seen_f = [False] * nf
    order = []
    if nf:
        seen_f[0] = True
        stack = [0]
        while stack:
            f = stack.pop()
            order.append(f)
            for h in dual_adj[f]:
                other = face[m.twin[h]]
                if not seen_f[other]:
                    seen_f[other] = True
                    # h lies on face f; its twin on the child face
                    parent_edge[other] = int(m.twin[h])
                    stack.append(other)
    dual_tree = np.zeros(H, dtype=bool)
    for f in range(nf):
        h = parent_edge[f]
        if h >= 0:
            dual_tree[h] = dual_tree[m.twin[h]] = True
    gens = [h for h in reps if not in_tree[h] and not dual_tree[h]]
    if len(gens) != 2 * g:
        raise AssertionError("leftover edge count differs from 2g")
    for i, h in enumerate(gens):
        lab[h, i] = 1
        lab[m.twin[h], i] = -1
    # leaves first: a face's boundary determines its parent edge
    members: list[list[int]] = [[] for _ in range(nf)]
    for h in range(H):
        if m.twin[h] >= 0:
            members[face[h]].append(h)
    for f in reversed(order):
        h = parent_edge[f]
        if h < 0:
            continue
        s = lab[members[f]].sum(axis=0) - lab[h]
        lab[h] = -s
        lab[m.twin[h]] = s
    return lab[:, : 2 * g] if g else lab[:, :0]


def is_essentially_simple(m: RotMap, lab: np.ndarray | None = None) -> bool:
    """No null-homologous loop and no two edges u-v with the same homology offset."""
    if m.euler_genus() != 1:
        raise NotGenusOne("essential simplicity is decided on the torus")
    if lab is None:
        lab = homology_labels(m)
    vert = m.vertex_of
    seen = set()
    for h in m.edge_ids():
        u, v = int(vert[h]), int(vert[m.twin[h]])
        x = tuple(int(a) for a in lab[h])
        if u > v:
            u, v, x = v, u, tuple(-a for a in x)
        if u == v:
            if x == (0, 0):
                return False
            if x < (0, 0):
                x = tuple(-a for a in x)
        key = (u, v, x)
        if key in seen:
            return False
        seen.add(key)
    return True


def torus_square() -> RotMap:
    """One vertex with two loops a, b in ccw order a+ b+ a- b- (4 half-edges)."""
    return build_map([(2, 1), (3, 2), (0, 3), (1, 0)], genus=1)
