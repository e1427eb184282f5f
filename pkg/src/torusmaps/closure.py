"""Complete closure of rooted toroidal unicellular maps.

Sweeping counterclockwise around the face from the root angle (positions
``L-1`` down to ``0`` of the face word), edge sides are pushed on a stack
as the index of the angle that follows them.  A stem meeting at least two
stacked sides closes an admissible triple: it becomes an edge towards the
angle ending the second side, and that angle replaces the two sides on the
stack.  A stem meeting fewer than two sides would have to wrap over the
root angle, so the map is not safe.  The root stem at position 0 always
closes last, leaving the root triangle's three sides.

The triangulation keeps the ``L`` half-edges of the word (stems turned into
edges) and adds one half-edge per stem at its attachment angle, numbered
``L + k`` for the ``k``-th closure.  Half-edges attached at the same angle
of the word sit in closure order, counterclockwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numba
import numpy as np

from . import rotmap
from .rotmap import RotMap
from .unicell import FaceWord


class ClosureFailure(RuntimeError):
    pass


class NoAdmissibleTriple(ClosureFailure):
    pass


class SafetyViolation(ClosureFailure):
    pass


@numba.njit(cache=True)
def _sweep(partner):
    L = partner.shape[0]
    attach = np.full(L, -1, np.int64)
    order = np.full(L, -1, np.int64)
    stack = np.empty(L + 1, np.int64)
    top = 0
    k = 0
    for p in range(L - 1, -1, -1):
        if partner[p] >= 0:
            stack[top] = p + 1
            top += 1
        else:
            if top < 2:
                return attach, order, -1 - p
            j1 = stack[top - 2]
            top -= 2
            attach[p] = j1
            order[p] = k
            k += 1
            stack[top] = j1
            top += 1
    return attach, order, top


@numba.njit(cache=True)
def _build(partner, attach, order, n_stems):
    L = partner.shape[0]
    H = L + n_stems
    twin = np.empty(H, np.int64)
    nxt = np.empty(H, np.int64)
    gamma_angle = np.empty(H, np.int64)
    for p in range(L):
        if partner[p] >= 0:
            twin[p] = partner[p]
            nxt[p] = (partner[p] + 1) % L
        else:
            twin[p] = L + order[p]
            twin[L + order[p]] = p
            nxt[p] = (p + 1) % L
        gamma_angle[p] = p
    # new half-edges per attachment angle, in closure order
    by_k = np.empty(n_stems, np.int64)
    for p in range(L):
        if partner[p] < 0:
            by_k[order[p]] = p
    count = np.zeros(L + 2, np.int64)
    for k in range(n_stems):
        count[attach[by_k[k]] + 1] += 1
    for j in range(L + 1):
        count[j + 1] += count[j]
    slots = np.empty(n_stems, np.int64)
    fill = count.copy()
    for k in range(n_stems):
        j = attach[by_k[k]]
        slots[fill[j]] = L + k
        fill[j] += 1
    # angle j lies between prev_j (the ccw predecessor of h_j) and h_{j mod L}
    for j in range(1, L + 1):
        a, b = count[j], count[j + 1]
        if a == b:
            continue
        q = j - 1
        prev = partner[q] if partner[q] >= 0 else q
        hj = j % L
        nxt[prev] = slots[a]
        for i in range(a, b - 1):
            nxt[slots[i]] = slots[i + 1]
            gamma_angle[slots[i]] = j
        nxt[slots[b - 1]] = hj
        gamma_angle[slots[b - 1]] = j
    return twin, nxt, gamma_angle


def sweep(t: FaceWord):
    """Attachment angle and closure rank per position (-1 for edges)."""
    attach, order, top = _sweep(t.partner)
    if top < 0:
        raise SafetyViolation(f"stem at position {-1 - top} would wrap over the root angle")
    return attach, order, top


def is_safe(t: FaceWord) -> bool:
    if not t.rooted:
        raise ValueError("safety is defined for rooted words")
    return _sweep(t.partner)[2] >= 0


def compute_lambda(t: FaceWord) -> np.ndarray:
    """Labels of the angles a_0..a_L: start at 3, +1 after a stem, -1 after an edge side."""
    st = np.where(t.partner < 0, 1, -1)
    return np.concatenate(([3], 3 + np.cumsum(st)))


@dataclass(eq=False)
class Triangulation:
    """Closure output with everything inherited from the word."""

    word: FaceWord
    g: RotMap
    out: np.ndarray  # per half-edge of g: outgoing in the canonical orientation
    gamma_angle: np.ndarray  # per half-edge x: index i of the word angle a_i containing the angle before x
    lam: np.ndarray  # labels of a_0..a_L
    attach: np.ndarray  # per word position: attachment angle of the stem, -1 for edges
    order: np.ndarray  # per word position: closure rank of the stem
    cache: dict = field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return self.g.n_vertices

    @property
    def v0(self) -> int:
        return int(self.g.vertex_of[0])

    @cached_property
    def angle_label(self) -> np.ndarray:
        """Label of the angle before each half-edge of g."""
        return self.lam[self.gamma_angle]

    def fiber(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.gamma_angle == i)

    @cached_property
    def outdegree(self) -> np.ndarray:
        return np.bincount(self.g.vertex_of[self.out], minlength=self.n)

    def to_json_obj(self) -> dict:
        obj = self.g.to_json_obj()
        obj["lambda"] = self.angle_label.tolist()
        obj["attach"] = {int(p): int(a) for p, a in enumerate(self.attach) if a >= 0}
        obj["orientation"] = ["out" if o else "in" for o in self.out.tolist()]
        return obj


def complete_closure(t: FaceWord) -> Triangulation:
    if not t.rooted:
        raise ValueError("closure needs a rooted word")
    attach, order, top = sweep(t)
    if top != 3:
        raise NoAdmissibleTriple(f"{top} sides left after the sweep, expected 3")
    n_stems = t.n_stems
    twin, nxt, ga = _build(t.partner, attach, order, n_stems)
    L = len(t)
    out = np.empty(len(twin), dtype=bool)
    out[:L] = t.canonical_out()
    out[L:] = False
    g = RotMap(twin, nxt, root=0)
    return Triangulation(t, g, out, ga, compute_lambda(t), attach, order)


def propagate_labels(tri: Triangulation) -> np.ndarray:
    return tri.angle_label


# ---------------------------------------------------------------- generic closure


def closure_any_order(t: FaceWord, rng: np.random.Generator | None = None) -> RotMap:
    """Close admissible triples one by one in arbitrary (random) order.

    Works on an explicit cyclic border; used to check that the result does
    not depend on the closing order.  Quadratic, for small maps only.
    """
    L = len(t)
    partner = t.partner
    # border items in clockwise order: ("e", half-edge on this side) or ("s", stem position)
    border = [("s", p) if partner[p] < 0 else ("e", p) for p in range(L)]
    twin = [int(x) for x in partner]
    nxt = [int(x) for x in t.next_ccw]
    twin += [-1] * t.n_stems
    nxt += [-1] * t.n_stems
    new_id = L
    while True:
        m = len(border)
        cands = [
            i
            for i in range(m)
            if border[i][0] == "s" and border[(i + 1) % m][0] == "e" and border[(i + 2) % m][0] == "e"
        ]
        if not cands:
            break
        # never close over the root angle, which sits between border[-1] and border[0]
        cands = [i for i in cands if i + 2 < m]
        if not cands:
            raise SafetyViolation("only triples over the root angle remain")
        i = cands[int(rng.integers(len(cands)))] if rng is not None else cands[0]
        s = border[i][1]
        e1 = border[i + 2][1]
        # attach at the angle after side e1: between the half-edge of e1 at its
        # end and the current ccw successor there
        end = twin[e1]
        h = new_id
        new_id += 1
        twin[s] = h
        twin[h] = s
        nxt[h] = nxt[end]
        nxt[end] = h
        border[i : i + 3] = [("e", s)]
    if sum(1 for b in border if b[0] == "s"):
        raise NoAdmissibleTriple("stems left unattached")
    return RotMap(np.array(twin), np.array(nxt), root=0)


def canonical_form(g: RotMap, root: int = 0) -> tuple:
    """Relabel half-edges by a traversal from the root; equal tuples iff isomorphic rooted maps."""
    label = {root: 0}
    queue = [root]
    i = 0
    while i < len(queue):
        h = queue[i]
        i += 1
        for x in (int(g.next_ccw[h]), int(g.twin[h])):
            if x >= 0 and x not in label:
                label[x] = len(label)
                queue.append(x)
    if len(label) != g.n_half_edges:
        raise rotmap.Disconnected("canonical form needs a connected map")
    inv = sorted(label, key=label.get)
    return tuple((label.get(int(g.twin[h]), -1), label[int(g.next_ccw[h])]) for h in inv)


# ---------------------------------------------------------------- verification


def rightmost_successor(tri: Triangulation) -> np.ndarray:
    """For each half-edge d, the rightmost outgoing half-edge after walking along d."""
    g = tri.g
    out = tri.out
    succ = np.full(g.n_half_edges, -1, dtype=np.int64)
    for d in range(g.n_half_edges):
        q = int(g.next_ccw[g.twin[d]])
        while not out[q]:
            q = int(g.next_ccw[q])
        succ[d] = q
    return succ


def _fundamental_cycles(g: RotMap, lab: np.ndarray) -> list[list[int]]:
    vert = g.vertex_of
    parent = {int(vert[0]): -1}
    queue = [int(vert[0])]
    adj: dict[int, list[int]] = {}
    for h in range(g.n_half_edges):
        adj.setdefault(int(vert[h]), []).append(h)
    tree = set()
    i = 0
    while i < len(queue):
        v = queue[i]
        i += 1
        for h in adj[v]:
            w = int(vert[g.twin[h]])
            if w not in parent:
                parent[w] = int(g.twin[h])  # half-edge at w pointing to its parent
                tree.add(h)
                tree.add(int(g.twin[h]))
                queue.append(w)
    # homology of the fundamental cycle of h is lab[h] + pot[u] - pot[v]
    pot = {int(vert[0]): np.zeros(lab.shape[1], dtype=np.int64)}
    for v in queue[1:]:
        p = parent[v]
        pot[v] = pot[int(vert[g.twin[p]])] + lab[g.twin[p]]
    picked: list[tuple[int, np.ndarray]] = []
    for h in g.edge_ids():
        h = int(h)
        if h in tree:
            continue
        c = lab[h] + pot[int(vert[h])] - pot[int(vert[g.twin[h]])]
        if not c.any():
            continue
        if picked and np.linalg.matrix_rank(np.stack([picked[0][1], c])) < 2:
            continue
        picked.append((h, c))
        if len(picked) == lab.shape[1]:
            break
    cycles = []
    for h, _ in picked:
        u, v = int(vert[h]), int(vert[g.twin[h]])

        def up(x):
            path = []
            while parent[x] >= 0:
                path.append(parent[x])
                x = int(vert[g.twin[parent[x]]])
            return path

        pu, pv = up(u), up(v)
        # trim the common part near the root
        while pu and pv and pu[-1] == pv[-1]:
            pu.pop()
            pv.pop()
        # walk v -> lca (pv), then lca -> u (reverse of pu), then the edge u -> v
        cyc = pv + [int(g.twin[x]) for x in reversed(pu)] + [h]
        cycles.append(cyc)
    return cycles


def gamma_on_graph(g: RotMap, out: np.ndarray, walk: list[int]) -> int:
    right = left = 0
    for i, d in enumerate(walk):
        a = int(g.twin[walk[i - 1]])
        q = int(g.next_ccw[a])
        while q != d:
            right += bool(out[q])
            q = int(g.next_ccw[q])
        q = int(g.next_ccw[d])
        while q != a:
            left += bool(out[q])
            q = int(g.next_ccw[q])
    return right - left


@numba.njit(cache=True)
def _flood(seeds, blocked, face, twin, vert, members, offsets, walk_vert, nv):
    nf = offsets.shape[0] - 1
    inside = np.zeros(nf, np.bool_)
    stack = np.empty(nf, np.int64)
    top = 0
    for f in seeds:
        if not inside[f]:
            inside[f] = True
            stack[top] = f
            top += 1
    while top:
        top -= 1
        f = stack[top]
        for i in range(offsets[f], offsets[f + 1]):
            h = members[i]
            if blocked[h]:
                continue
            f2 = face[twin[h]]
            if not inside[f2]:
                inside[f2] = True
                stack[top] = f2
                top += 1
    seen = np.zeros(nv, np.bool_)
    nverts = 0
    sides = 0
    nfaces = 0
    for f in range(nf):
        if not inside[f]:
            continue
        nfaces += 1
        for i in range(offsets[f], offsets[f + 1]):
            h = members[i]
            v = vert[h]
            if not walk_vert[v] and not seen[v]:
                seen[v] = True
                nverts += 1
            if not blocked[h]:
                sides += 1
    return inside, nverts - sides // 2 + nfaces


def _face_members(g: RotMap):
    cached = g.__dict__.get("_face_members")
    if cached is None:
        order = np.argsort(g.face_of, kind="stable")
        offsets = np.searchsorted(g.face_of[order], np.arange(g.n_faces + 1))
        cached = (order.astype(np.int64), offsets.astype(np.int64))
        g.__dict__["_face_members"] = cached
    return cached


def right_region(g: RotMap, walk: list[int]) -> set[int] | None:
    """Faces on the right of a closed walk, or None if that side is not a disk."""
    face = g.face_of
    prev = g.prev_ccw
    blocked = np.zeros(g.n_half_edges, dtype=bool)
    w = np.asarray(walk, dtype=np.int64)
    blocked[w] = True
    blocked[g.twin[w]] = True
    seeds = []
    for i, d in enumerate(walk):
        a = int(g.twin[walk[i - 1]])
        # the corner before x lies in the face of prev_ccw(x)'s twin side, i.e. face(phi^-1(x));
        # a walk may touch itself at a vertex: stop at the nearest walk half-edge
        q = int(g.next_ccw[a])
        while True:
            seeds.append(int(face[g.twin[prev[q]]]))
            if blocked[q]:
                break
            q = int(g.next_ccw[q])
    walk_vert = np.zeros(g.n_vertices, dtype=bool)
    walk_vert[g.vertex_of[w]] = True
    members, offsets = _face_members(g)
    inside, chi = _flood(np.asarray(seeds, dtype=np.int64), blocked, face, g.twin, g.vertex_of,
                         members, offsets, walk_vert, g.n_vertices)
    if chi != 1:
        return None
    return {int(f) for f in np.flatnonzero(inside)}


@numba.njit(cache=True)
def _triangles(twin, nxt, vert, lab, phi):
    H = twin.shape[0]
    out = []
    for h1 in range(H):
        v = vert[twin[h1]]
        h2 = twin[h1]
        start2 = h2
        while True:
            h2 = nxt[h2]
            if h2 == start2:
                break
            w = vert[twin[h2]]
            h3 = twin[h2]
            start3 = h3
            while True:
                h3 = nxt[h3]
                if h3 == start3:
                    break
                if vert[twin[h3]] != vert[h1]:
                    continue
                # one representative per cyclic rotation, faces excluded
                if h2 < h1 or h3 < h1:
                    continue
                if phi[h1] == h2 and phi[h2] == h3:
                    continue
                if phi[twin[h3]] == twin[h2] and phi[twin[h2]] == twin[h1]:
                    continue
                ok = True
                for c in range(lab.shape[1]):
                    if lab[h1, c] + lab[h2, c] + lab[h3, c] != 0:
                        ok = False
                if ok and h3 != twin[h1] and h2 != twin[h3]:
                    out.append((h1, h2, h3))
    return out


def contractible_triangles(g: RotMap, lab: np.ndarray) -> list[tuple[int, int, int]]:
    """Directed closed walks of three distinct edges with zero homology.

    Each walk is listed once (rotation starting at its smallest half-edge);
    face boundaries are left out.
    """
    res = _triangles(g.twin, g.next_ccw, g.vertex_of, np.ascontiguousarray(lab, dtype=np.int64), g.phi)
    return [(int(a), int(b), int(c)) for a, b, c in res]


def root_triangle(tri: Triangulation) -> tuple[int, int, int]:
    """Terminal cycle of the rightmost walks (must be unique and of length 3)."""
    succ = rightmost_successor(tri)
    d = 0 if tri.out[0] else int(np.flatnonzero(tri.out)[0])
    seen = {}
    while d not in seen:
        seen[d] = len(seen)
        d = int(succ[d])
    cyc = []
    x = d
    while True:
        cyc.append(x)
        x = int(succ[x])
        if x == d:
            break
    # rotate so the cycle starts with the root half-edge when it is on it
    if 0 in cyc:
        i = cyc.index(0)
        cyc = cyc[i:] + cyc[:i]
    return tuple(cyc)


def verify_closure_output(tri: Triangulation, full: bool = True) -> list[dict]:
    """Structured list of violations (empty when everything holds).

    ``full=False`` skips the triangle-maximality scan, which is the only
    super-linear check.
    """
    bad = []
    g = tri.g
    n = tri.n

    def fail(check, **kw):
        bad.append({"check": check, **kw})

    if g.euler_genus() != 1:
        fail("genus", genus=g.euler_genus())
    deg = g.face_degrees()
    if np.any(deg != 3):
        fail("triangular_faces", degrees=sorted(set(deg.tolist())))
    if g.n_faces != 2 * n or g.n_edges != 3 * n:
        fail("sizes", faces=g.n_faces, edges=g.n_edges, n=n)
    if g.n_stems:
        fail("stems_left", count=g.n_stems)
    outdeg = tri.outdegree
    if np.any(outdeg != 3):
        fail("outdegree", vertices=np.flatnonzero(outdeg != 3).tolist()[:10])
    tw = g.twin
    if np.any(tri.out == tri.out[tw]):
        fail("orientation_consistency")
    lab = rotmap.homology_labels(g)
    if not rotmap.is_essentially_simple(g, lab):
        fail("essentially_simple")
    for cyc in _fundamental_cycles(g, lab):
        val = gamma_on_graph(g, tri.out, cyc)
        if val != 0:
            fail("balanced", gamma=val, cycle=cyc)
    if bad:
        # the walk checks below presuppose a valid 3-orientation
        return bad
    # rightmost walks: one terminal cycle, the root triangle, interior on the right
    succ = rightmost_successor(tri)
    outs = np.flatnonzero(tri.out)
    k, comp = rotmap.perm_orbits(np.where(tri.out, succ, np.arange(g.n_half_edges)))
    tri_cycle = root_triangle(tri)
    if len(tri_cycle) != 3:
        fail("rightmost_terminal_length", length=len(tri_cycle))
    else:
        # every outgoing half-edge flows into that cycle
        reach = _flows_into(succ, outs, set(tri_cycle))
        if not reach:
            fail("rightmost_terminal_unique")
        if tri_cycle[0] != 0:
            fail("root_on_triangle", cycle=list(tri_cycle))
        if lab[list(tri_cycle)].sum(axis=0).any():
            fail("root_triangle_contractible")
        region = right_region(g, list(tri_cycle))
        if region is None:
            fail("root_triangle_interior_on_right")
        elif full:
            root_face = int(g.face_of[np.flatnonzero(g.phi == 0)[0]])
            if root_face not in region:
                fail("root_face_inside", face=root_face)
            for t3 in contractible_triangles(g, lab):
                if set(t3) == set(tri_cycle):
                    continue
                r = right_region(g, list(t3))
                if r is not None and region < r:
                    fail("root_triangle_maximal", bigger=list(t3))
                    break
    return bad


def _flows_into(succ, outs, target) -> bool:
    state = {}
    for d0 in outs.tolist():
        path = []
        d = d0
        while d not in target and d not in state:
            state[d] = None
            path.append(d)
            if len(path) > len(succ):
                return False
            d = int(succ[d])
        if d not in target and state.get(d) is not True:
            return False
        for x in path:
            state[x] = True
    return True
