"""Toroidal unicellular maps stored as face words.

A unicellular map with ``L`` half-edges is read clockwise around its
unique face.  Position ``p`` of the word is the ``p``-th half-edge met;
``partner[p]`` is the position of its twin, or ``-1`` for a stem.  Angle
``p`` is the corner just before half-edge ``p`` in counterclockwise order
around ``vertex(p)``.  With this convention

* ``next_ccw[p] = partner[p] + 1`` (or ``p + 1`` for a stem), mod L,
* the face permutation is ``p -> p + 1``,
* a rooted map (class T_r) has its root stem at position 0 and root angle 0.

An angle-rooted map has exactly one word, so words double as canonical
keys.  Unrooted maps of the U classes are stored rooted at a kernel
half-edge (position 0 is then that half-edge).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .rotmap import RotMap, perm_orbits


class NotUnicellular(ValueError):
    pass


class MissingRoot(ValueError):
    pass


class NotACycleOfMap(ValueError):
    pass


class InvalidSlot(ValueError):
    pass


class ClassViolation(ValueError):
    pass


SQUARE, HEXAGONAL = "square", "hexagonal"


@dataclass(frozen=True, eq=False)
class FaceWord:
    partner: np.ndarray
    rooted: bool = False  # position 0 is a root stem (T classes)

    def __post_init__(self):
        p = np.ascontiguousarray(self.partner, dtype=np.int64)
        object.__setattr__(self, "partner", p)
        L = len(p)
        e = np.flatnonzero(p >= 0)
        if np.any(p >= L) or np.any(p[e] == e) or np.any(p[p[e]] != e):
            raise NotUnicellular("partner must be an involution on edges")
        if self.rooted and (L == 0 or p[0] != -1):
            raise MissingRoot("rooted words start with the root stem")

    # -- basic data

    def __len__(self):
        return len(self.partner)

    def key(self) -> bytes:
        return bytes([self.rooted]) + self.partner.astype(np.int32).tobytes()

    def __eq__(self, other):
        return isinstance(other, FaceWord) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    @cached_property
    def is_stem(self) -> np.ndarray:
        return self.partner < 0

    @cached_property
    def next_ccw(self) -> np.ndarray:
        L = len(self.partner)
        t = np.where(self.partner >= 0, self.partner, np.arange(L))
        return (t + 1) % L

    @cached_property
    def _vertices(self):
        return perm_orbits(self.next_ccw)

    @property
    def n_vertices(self) -> int:
        return self._vertices[0]

    @property
    def vertex(self) -> np.ndarray:
        return self._vertices[1]

    @property
    def n_edges(self) -> int:
        return int(np.count_nonzero(self.partner >= 0)) // 2

    @property
    def n_stems(self) -> int:
        return int(np.count_nonzero(self.partner < 0))

    @cached_property
    def genus(self) -> int:
        chi = self.n_vertices - self.n_edges + 1
        return (2 - chi) // 2

    def to_rotmap(self) -> RotMap:
        return RotMap(np.where(self.partner >= 0, self.partner, -1), self.next_ccw, root=0)

    def rotate(self, x: int) -> "FaceWord":
        """Same unrooted map, re-read from angle x."""
        L = len(self)
        idx = (np.arange(L) + x) % L
        p = self.partner[idx]
        p = np.where(p >= 0, (p - x) % L, -1)
        return FaceWord(p, rooted=False)

    # -- core and kernel

    @cached_property
    def proper(self) -> np.ndarray:
        """Per-vertex flag: the vertex lies on a cycle (2-core)."""
        nv = self.n_vertices
        vert = self.vertex
        e = np.flatnonzero(self.partner >= 0)
        deg = np.bincount(vert[e], minlength=nv)
        alive = np.ones(nv, dtype=bool)
        adj_to = vert[self.partner[e]]
        owner = vert[e]
        order = np.argsort(owner, kind="stable")
        starts = np.searchsorted(owner[order], np.arange(nv + 1))
        stack = [v for v in range(nv) if deg[v] <= 1]
        while stack:
            v = stack.pop()
            if not alive[v]:
                continue
            alive[v] = False
            for j in order[starts[v] : starts[v + 1]]:
                w = adj_to[j]
                if alive[w]:
                    deg[w] -= 1
                    if deg[w] == 1:
                        stack.append(w)
        return alive

    @cached_property
    def core_half_edge(self) -> np.ndarray:
        p = self.partner
        ok = p >= 0
        pr = self.proper[self.vertex]
        return ok & pr & pr[np.where(ok, p, 0)]

    @cached_property
    def core_degree(self) -> np.ndarray:
        return np.bincount(self.vertex[self.core_half_edge], minlength=self.n_vertices)

    @cached_property
    def special(self) -> list[int]:
        return [int(v) for v in np.flatnonzero(self.core_degree >= 3)]

    @cached_property
    def shape(self) -> str:
        if self.genus != 1:
            raise NotUnicellular(f"genus {self.genus}, expected 1")
        deg = sorted(self.core_degree[self.special].tolist())
        if deg == [4]:
            return SQUARE
        if deg == [3, 3]:
            return HEXAGONAL
        raise NotUnicellular(f"core degrees {deg} are neither square nor hexagon")

    @cached_property
    def stems_at(self) -> np.ndarray:
        return np.bincount(self.vertex[self.is_stem], minlength=self.n_vertices)

    def kernel_half_edges(self) -> list[int]:
        """Core half-edges leaving special vertices, in word order."""
        sp = np.zeros(self.n_vertices, dtype=bool)
        sp[self.special] = True
        return [int(p) for p in np.flatnonzero(self.core_half_edge & sp[self.vertex])]

    def ccw_core_after(self, p: int) -> int:
        """Next core half-edge counterclockwise after half-edge p at its vertex."""
        q = int(self.next_ccw[p])
        while not self.core_half_edge[q]:
            q = int(self.next_ccw[q])
        return q

    def chain(self, h: int) -> list[int]:
        """Half-edges of the maximal chain starting with kernel half-edge h."""
        if not self.core_half_edge[h]:
            raise NotACycleOfMap(f"{h} is not a core half-edge")
        sp = set(self.special)
        out = [h]
        while True:
            a = int(self.partner[out[-1]])
            if int(self.vertex[a]) in sp:
                return out
            out.append(self.ccw_core_after(a))

    def chain_inner_vertices(self, h: int) -> list[int]:
        return [int(self.vertex[q]) for q in self.chain(h)[1:]]

    def cycles(self) -> list[list[int]]:
        """The 2 (square) or 3 (hexagon) cycles as half-edge lists, fixed by word order."""
        ks = self.kernel_half_edges()
        if self.shape == SQUARE:
            chains = []
            seen = set()
            for h in ks:
                c = self.chain(h)
                if h in seen:
                    continue
                seen.add(h)
                seen.add(int(self.partner[c[-1]]))
                chains.append(c)
            return chains
        a = int(self.vertex[ks[0]])
        outs = [h for h in ks if int(self.vertex[h]) == a]
        chains = [self.chain(h) for h in outs]
        back = [self.reverse(c) for c in chains]
        return [chains[0] + back[1], chains[1] + back[2], chains[2] + back[0]]

    def reverse(self, walk: list[int]) -> list[int]:
        return [int(self.partner[q]) for q in reversed(walk)]

    # -- orientation and gamma

    def canonical_out(self) -> np.ndarray:
        """Per half-edge: outgoing in the canonical orientation (stems always)."""
        if not self.rooted:
            raise MissingRoot("canonical orientation needs the root")
        return (self.partner < 0) | (self.partner < np.arange(len(self)))

    def sides(self, walk: list[int]) -> tuple[list[int], list[int]]:
        """Half-edges strictly on the right / left of a closed walk."""
        right, left = [], []
        k = len(walk)
        for i in range(k):
            a = int(self.partner[walk[i - 1]])
            d = walk[i]
            q = int(self.next_ccw[a])
            while q != d:
                right.append(q)
                q = int(self.next_ccw[q])
            q = int(self.next_ccw[d])
            while q != a:
                left.append(q)
                q = int(self.next_ccw[q])
        return right, left

    def gamma(self, walk: list[int], mode: str | None = None) -> int:
        """Outgoing right minus outgoing left on a closed walk of the map.

        ``mode`` is ``"edges_and_stems"`` (default for rooted words, uses
        the canonical orientation) or ``"stems_only"``.
        """
        self._check_cycle(walk)
        if mode is None:
            mode = "edges_and_stems" if self.rooted else "stems_only"
        out = self.canonical_out() if mode == "edges_and_stems" else self.is_stem
        r, l = self.sides(walk)
        return int(out[r].sum()) - int(out[l].sum())

    def _check_cycle(self, walk):
        if not walk:
            raise NotACycleOfMap("empty walk")
        verts = []
        for i, d in enumerate(walk):
            if self.partner[d] < 0:
                raise NotACycleOfMap("stems do not belong to cycles")
            nxt = walk[(i + 1) % len(walk)]
            if self.vertex[self.partner[d]] != self.vertex[nxt]:
                raise NotACycleOfMap("walk is not closed")
            verts.append(int(self.vertex[d]))
        if len(set(verts)) != len(verts):
            raise NotACycleOfMap("cycles are simple")

    def is_balanced(self) -> bool:
        return all(self.gamma(c) == 0 for c in self.cycles())

    # -- class membership

    def check_class(self, n: int | None = None) -> None:
        """Raise ClassViolation unless the word is in T_r(n) (rooted) or U(n)."""
        if self.genus != 1:
            raise ClassViolation(f"genus {self.genus}")
        nv = self.n_vertices
        if n is not None and nv != n:
            raise ClassViolation(f"{nv} vertices, expected {n}")
        if self.n_edges != nv + 1:
            raise ClassViolation("a toroidal unicellular map has n+1 edges")
        want = np.full(nv, 2)
        shape = self.shape
        for v in self.special:
            want[v] = 1 if shape == HEXAGONAL else 0
        if self.rooted:
            want[self.vertex[0]] += 1
        if not np.array_equal(self.stems_at, want):
            raise ClassViolation("stem-degree rule broken")

    def in_class(self, n: int | None = None) -> bool:
        try:
            self.check_class(n)
        except (ClassViolation, NotUnicellular):
            return False
        return True

    def is_safe(self) -> bool:
        from .closure import is_safe

        return is_safe(self)


def word(partner, rooted: bool = False) -> FaceWord:
    return FaceWord(np.asarray(partner, dtype=np.int64), rooted=rooted)


def classify_shape(u: FaceWord) -> tuple[str, list[int]]:
    return u.shape, u.special


def canonical_orientation(t: FaceWord) -> np.ndarray:
    return t.canonical_out()


def gamma(u: FaceWord, walk: list[int], mode: str | None = None) -> int:
    return u.gamma(walk, mode)


def is_balanced(u: FaceWord) -> bool:
    return u.is_balanced()


def is_safe(t: FaceWord) -> bool:
    return t.is_safe()


# ---------------------------------------------------------------- rooting


def slot_angles(u: FaceWord) -> list[int]:
    """Angles of an unrooted word where a root stem gives a safe rooted map.

    Reading counterclockwise from angle x (positions x-1, x-2, ...), each
    edge side counts +1 and each stem -1; the slot is valid iff every partial
    sum stays positive.  The total is 4, so the cycle lemma leaves exactly
    four valid angles.
    """
    L = len(u)
    st = np.where(u.partner >= 0, 1, -1)
    total = int(st.sum())
    if total != 4:
        raise ClassViolation(f"edge sides minus stems is {total}, expected 4")
    # partial sums going backward from x are P[x] - P[y] for y < x and
    # P[x] - P[y] + total for y >= x (wrapping); all must be positive
    P = np.concatenate(([0], np.cumsum(st)))[:L]
    before = np.concatenate(([np.iinfo(np.int64).min], np.maximum.accumulate(P)[:-1]))
    after = np.maximum.accumulate(P[::-1])[::-1] - total
    ok = (P > before) & (P > after)
    return [int(x) for x in np.flatnonzero(ok)]


def add_root_at(u: FaceWord, x: int) -> FaceWord:
    """Insert a root stem at angle x and re-read from there."""
    r = u.rotate(x)
    p = np.where(r.partner >= 0, r.partner + 1, -1)
    return FaceWord(np.concatenate(([-1], p)), rooted=True)


def add_root(u: FaceWord, slot: int) -> FaceWord:
    """Add the root stem in the ``slot``-th valid angle (1..4, word order)."""
    slots = slot_angles(u)
    if not 1 <= slot <= len(slots):
        raise InvalidSlot(f"slot {slot} not in 1..{len(slots)}")
    return add_root_at(u, slots[slot - 1])


def strip_root(t: FaceWord) -> tuple[FaceWord, int]:
    """Remove root angle and stem.

    Returns the unrooted map re-rooted at its first kernel half-edge after
    the root, and the slot that :func:`add_root` needs to undo the removal.
    """
    if not t.rooted:
        raise MissingRoot("strip_root needs a rooted word")
    p = t.partner[1:]
    u = FaceWord(np.where(p >= 0, p - 1, -1))
    ks = u.kernel_half_edges()
    h = ks[0]
    v = u.rotate(h)
    x = (len(u) - h) % len(u)
    slots = slot_angles(v)
    if x not in slots:
        raise InvalidSlot("root angle is not a valid slot (map not safe)")
    return v, slots.index(x) + 1


def reroot(u: FaceWord, h: int) -> FaceWord:
    return u.rotate(h)


# ---------------------------------------------------------------- small examples


def theta_map() -> FaceWord:
    """Hexagonal core with no inner vertices: two vertices, three parallel edges, one stem each."""
    # face word of the theta graph: W1, W2, W3 forward then reversed,
    # one stem after the first kernel half-edge at each vertex
    return _from_letters("a s b c a' s b' c'".split())


def square_map() -> FaceWord:
    """One vertex with two loops and no stems."""
    return _from_letters("a b a' b'".split())


def _from_letters(letters: list[str]) -> FaceWord:
    pos = {}
    partner = [-1] * len(letters)
    for i, x in enumerate(letters):
        if x == "s":
            continue
        base = x.rstrip("'")
        if base in pos:
            j = pos.pop(base)
            partner[i], partner[j] = j, i
        else:
            pos[base] = i
    if pos:
        raise ValueError("unpaired letters")
    return FaceWord(np.array(partner))
