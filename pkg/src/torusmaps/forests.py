"""Well-labeled forests with stems.

A forest with tau trees has tau + 1 floors (the last one childless) and
rho tree-vertices.  Floors carry label 0 and their children label -1.
Children of a tree-vertex ``u`` carry nondecreasing labels in
``[l(u) - 1, l(u) + 1]``; reading them with a virtual right child at
``l(u) - 1`` and a virtual left child at ``l(u) + 1``, every unit increase
is a stem, so each tree-vertex has exactly two stems.

Nodes are stored in arrays: floors are nodes ``0..tau`` and tree-vertices
follow in depth-first order.  Children are kept in counterclockwise order
(after the parent edge).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations_with_replacement
from math import comb
from typing import Iterator, Sequence

import numpy as np

from . import paths


class MalformedForest(ValueError):
    pass


class NotInverseDominating(ValueError):
    pass


class ConditioningTimeout(RuntimeError):
    pass


# token codes used when a forest is read as a walk around its plane tree
DOWN, UP, STEM, FLOOR = 0, 1, 2, 3


@dataclass
class Forest:
    tau: int
    parent: list[int]
    children: list[list[int]]
    label: list[int]
    _key: list[tuple] | None = field(default=None, repr=False, compare=False)

    @property
    def rho(self) -> int:
        return len(self.parent) - self.tau - 1

    def is_floor(self, u: int) -> bool:
        return u <= self.tau

    def floor_of(self, u: int) -> int:
        while u > self.tau:
            u = self.parent[u]
        return u

    def depth(self, u: int) -> int:
        d = 1
        while u > self.tau:
            u = self.parent[u]
            d += 1
        return d

    def keys(self) -> list[tuple]:
        """Integer-sequence names of the nodes (floors are (1,), (2,), ...)."""
        if self._key is None:
            key: list[tuple] = [()] * len(self.parent)
            for f in range(self.tau + 1):
                key[f] = (f + 1,)
            for u in range(len(self.parent)):
                for i, c in enumerate(self.children[u]):
                    key[c] = key[u] + (i + 1,)
            self._key = key
        return self._key

    def canonical(self) -> tuple:
        return (self.tau, encode_word(self))

    def __eq__(self, other):
        return isinstance(other, Forest) and self.canonical() == other.canonical()

    def __hash__(self):
        return hash(self.canonical())

    def validate(self) -> None:
        """Raise MalformedForest unless the forest and its labels are valid."""
        tau = self.tau
        if tau < 0 or len(self.parent) < tau + 1:
            raise MalformedForest("needs tau + 1 floors")
        if self.children[tau]:
            raise MalformedForest("the last floor has no children")
        for f in range(tau + 1):
            if self.parent[f] != -1 or self.label[f] != 0:
                raise MalformedForest("floors have no parent and label 0")
        seen = set(range(tau + 1))
        for u, ch in enumerate(self.children):
            for c in ch:
                if self.parent[c] != u or c in seen:
                    raise MalformedForest("inconsistent parent/children")
                seen.add(c)
            lab = [self.label[c] for c in ch]
            if any(a > b for a, b in zip(lab, lab[1:])):
                raise MalformedForest(f"children labels of {u} decrease")
            if u <= tau:
                if any(x != -1 for x in lab):
                    raise MalformedForest("children of floors carry label -1")
            elif lab and (lab[0] < self.label[u] - 1 or lab[-1] > self.label[u] + 1):
                raise MalformedForest(f"children labels of {u} leave [l-1, l+1]")
        if len(seen) != len(self.parent):
            raise MalformedForest("unreachable nodes")


def _new(tau: int) -> Forest:
    return Forest(tau, [-1] * (tau + 1), [[] for _ in range(tau + 1)], [0] * (tau + 1))


def _add_child(f: Forest, u: int, lab: int) -> int:
    v = len(f.parent)
    f.parent.append(u)
    f.children.append([])
    f.label.append(lab)
    f.children[u].append(v)
    return v


def from_elements(elements: Sequence[Sequence[int]], labels: dict | None = None) -> Forest:
    """Build a forest from its set of integer sequences (and optional labels keyed by tuple)."""
    els = sorted({tuple(e) for e in elements})
    floors = sorted(e[0] for e in els if len(e) == 1)
    if floors != list(range(1, len(floors) + 1)):
        raise MalformedForest("floors must be 1..t+1")
    tau = len(floors) - 1
    f = _new(tau)
    index = {(i + 1,): i for i in range(tau + 1)}
    # depth-first insertion keeps tree-vertices in contour order
    def kids(e):
        out = []
        i = 1
        while e + (i,) in index_all:
            out.append(e + (i,))
            i += 1
        return out

    index_all = set(els)
    if len(index_all) != len(els):
        raise MalformedForest("duplicate elements")
    for fl in range(tau + 1):
        stack = list(reversed(kids((fl + 1,))))
        while stack:
            e = stack.pop()
            lab = labels[e] if labels is not None else -1
            v = _add_child(f, index[e[:-1]], lab)
            index[e] = v
            stack.extend(reversed(kids(e)))
    if len(index) != len(els):
        raise MalformedForest("elements not prefix closed")
    if labels is None:
        # any valid labeling: every child one below its parent
        for u in range(tau + 1, len(f.parent)):
            f.label[u] = f.label[f.parent[u]] - 1
    return f


# ---------------------------------------------------------------- contour


def contour_pair(f: Forest) -> tuple[list[int], list[int], list[int]]:
    """Vertex contour r_F, C_F(i) = fl(r_F(i)) - |r_F(i)| and L(i) = l(r_F(i)).

    Returned on [0, 2 rho + tau]; r_F holds node indices.
    """
    r = [0]
    nxt = [0] * len(f.parent)
    u = 0
    while True:
        ch = f.children[u]
        if nxt[u] < len(ch):
            v = ch[nxt[u]]
            nxt[u] += 1
            u = v
        elif u > f.tau:
            u = f.parent[u]
        elif u < f.tau:
            u = u + 1
        else:
            break
        r.append(u)
    depth = [1] * len(f.parent)
    for u in range(f.tau + 1, len(f.parent)):
        depth[u] = depth[f.parent[u]] + 1
    floor = list(range(f.tau + 1)) + [0] * f.rho
    for u in range(f.tau + 1, len(f.parent)):
        floor[u] = floor[f.parent[u]]
    c = [floor[x] + 1 - depth[x] for x in r]
    lab = [f.label[x] for x in r]
    return r, c, lab


def contour_keys(f: Forest) -> list[tuple]:
    k = f.keys()
    return [k[u] for u in contour_pair(f)[0]]


def from_contour(c: Sequence[int], lab: Sequence[int]) -> Forest:
    """Rebuild (F, l) from its contour pair."""
    if not c or c[0] != 0 or len(c) != len(lab):
        raise MalformedForest("contour must start at 0")
    tau = c[-1]
    if tau < 0:
        raise MalformedForest("negative endpoint")
    f = _new(tau)
    u = 0
    depth = 1
    for a, b, l in zip(c, c[1:], lab[1:]):
        if b == a - 1:
            u = _add_child(f, u, l)
            depth += 1
        elif b == a + 1:
            if depth > 1:
                u = f.parent[u]
                depth -= 1
            else:
                u += 1
                if u > tau:
                    raise MalformedForest("too many floor steps")
        else:
            raise MalformedForest("contour steps are +-1")
        if f.label[u] != l:
            raise MalformedForest("label sequence inconsistent with contour")
    if u != tau or depth != 1:
        raise MalformedForest("contour must end on the last floor")
    f.validate()
    return f


# ---------------------------------------------------------------- words


def encode_word(f: Forest) -> str:
    """Counterclockwise walk around the forest: 1 going down a tree-edge, 0 going
    up, 0 for each stem and 0 for each floor-edge."""
    out: list[str] = []
    for fl in range(f.tau + 1):
        for root in f.children[fl]:
            # stack of (node, next child position, current virtual label)
            out.append("1")
            stack = [[root, 0, f.label[root] - 1]]
            while stack:
                top = stack[-1]
                v, i, cur = top
                ch = f.children[v]
                if i < len(ch):
                    c = ch[i]
                    out.append("0" * (f.label[c] - cur))
                    top[1] = i + 1
                    top[2] = f.label[c]
                    out.append("1")
                    stack.append([c, 0, f.label[c] - 1])
                else:
                    out.append("0" * (f.label[v] + 1 - cur))
                    out.append("0")
                    stack.pop()
        if fl < f.tau:
            out.append("0")
    return "".join(out)


def word_tokens(b: str, tau: int) -> np.ndarray:
    """Token code (DOWN, UP, STEM, FLOOR) of each letter of a forest word."""
    kinds = np.empty(len(b), dtype=np.int8)
    zeros = []  # zeros seen at each open tree-vertex
    fl = 0
    for i, ch in enumerate(b):
        if ch == "1":
            kinds[i] = DOWN
            zeros.append(0)
        elif zeros:
            z = zeros[-1] + 1
            if z == 3:
                kinds[i] = UP
                zeros.pop()
            else:
                kinds[i] = STEM
                zeros[-1] = z
        else:
            kinds[i] = FLOOR
            fl += 1
            if fl > tau:
                raise NotInverseDominating("walk passes the last floor")
        if ch not in "01":
            raise ValueError("words use the alphabet 01")
    if zeros or fl != tau:
        raise NotInverseDominating("walk does not end on the last floor")
    return kinds


def decode_word(b: str, rho: int, tau: int) -> Forest:
    if len(b) != 4 * rho + tau or b.count("1") != rho:
        raise NotInverseDominating("wrong length or number of ones")
    if not paths.is_inverse_k_dominating(b, 3):
        raise NotInverseDominating("reversed word is not 3-dominating")
    kinds = word_tokens(b, tau)
    f = _new(tau)
    u = 0
    zeros = [0] * (tau + 1)
    for k in kinds:
        if k == DOWN:
            lab = -1 if u <= tau else f.label[u] - 1 + zeros[u]
            u = _add_child(f, u, lab)
            zeros.append(0)
        elif k == STEM:
            zeros[u] += 1
        elif k == UP:
            u = f.parent[u]
        else:
            u += 1
    return f


def forest_from_walk(w: np.ndarray, tau: int) -> Forest:
    b = paths.word_from_walk(w)
    return decode_word(b, b.count("1"), tau)


# ---------------------------------------------------------------- counting


def count_forests(rho: int, tau: int) -> int:
    if tau < 1 or rho < 0:
        raise ValueError("need rho >= 0 and tau >= 1")
    n = 4 * rho + tau
    return tau * comb(n, rho) // n


@lru_cache(maxsize=None)
def _plane_forests(k: int, r: int) -> tuple:
    """All ordered sequences of k plane trees with r vertices in total (nested tuples)."""
    if k == 0:
        return ((),) if r == 0 else ()
    out = []
    for s in range(1, r - k + 2):
        for t in _plane_trees(s):
            for rest in _plane_forests(k - 1, r - s):
                out.append((t,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def _plane_trees(s: int) -> tuple:
    out = []
    for c in range(s):
        out.extend(_plane_forests(c, s - 1))
    return tuple(out)


def _floor_shapes(tau: int, rho: int) -> Iterator[tuple]:
    def rec(i, left):
        if i == tau:
            if left == 0:
                yield ()
            return
        for c in range(left + 1):
            for size in range(c, left + 1):
                for trees in _plane_forests(c, size):
                    for rest in rec(i + 1, left - size):
                        yield (trees,) + rest

    yield from rec(0, rho)


def enumerate_forests(rho: int, tau: int) -> Iterator[Forest]:
    """Every well-labeled forest of F^rho_tau, generated from plane-tree shapes
    and label vectors (independent of the word bijection)."""
    for shape in _floor_shapes(tau, rho):
        f = _new(tau)
        # list of (tree-vertex node, its subtree tuple) still to label
        pending = []
        for fl, trees in enumerate(shape):
            for t in trees:
                v = _add_child(f, fl, -1)
                pending.append((v, t))
        yield from _label_all(f, pending)


def _label_all(f: Forest, pending: list) -> Iterator[Forest]:
    if not pending:
        g = Forest(f.tau, list(f.parent), [list(c) for c in f.children], list(f.label))
        # renumber tree-vertices in depth-first order
        yield from_contour(*contour_pair(g)[1:])
        return
    (v, t), rest = pending[0], pending[1:]
    c = len(t)
    lv = f.label[v]
    for labs in combinations_with_replacement((lv - 1, lv, lv + 1), c):
        n0 = len(f.parent)
        new = []
        for sub, lab in zip(t, labs):
            new.append((_add_child(f, v, lab), sub))
        yield from _label_all(f, new + rest)
        del f.parent[n0:], f.children[n0:], f.label[n0:]
        f.children[v].clear()


# ---------------------------------------------------------------- sampling


def sample_uniform_forest(rho: int, tau: int, rng: np.random.Generator) -> Forest:
    return forest_from_walk(paths.sample_first_passage(rho, tau, rng), tau)


def sample_uniform_word(rho: int, tau: int, rng: np.random.Generator) -> str:
    return paths.word_from_walk(paths.sample_first_passage(rho, tau, rng))


def gw_floor_law(c: int) -> float:
    return 0.75 * 0.25**c


def gw_vertex_law(c: int) -> float:
    return comb(c + 2, 2) * gw_floor_law(c) / (16 / 9)


def _draw_vertex_children(rng: np.random.Generator) -> int:
    # B has pgf (27/64)(1 - z/4)^-3: a negative binomial with r=3, p=3/4
    return int(rng.negative_binomial(3, 0.75))


def sample_gw_forest(rho: int, tau: int, rng: np.random.Generator, budget: int = 1_000_000) -> Forest:
    """Galton-Watson forest conditioned on rho tree-vertices, then two stems per
    tree-vertex placed uniformly among the C(c+2, 2) slots.

    Floors have geometric(3/4) children, tree-vertices the size-biased law
    C(c+2,2) P(G=c) / (16/9).  The result is uniform on F^rho_tau.
    """
    for attempt in range(budget):
        floors = rng.geometric(0.75, size=tau) - 1
        total = int(floors.sum())
        if total > rho:
            continue
        counts = [int(x) for x in floors]
        queue = total
        ok = True
        kids = []
        while queue:
            c = _draw_vertex_children(rng)
            kids.append(c)
            total += c
            queue += c - 1
            if total > rho:
                ok = False
                break
        if not ok or total != rho:
            continue
        # breadth-first child counts -> forest
        f = _new(tau)
        frontier = []
        for fl, c in enumerate(counts):
            for _ in range(c):
                frontier.append(_add_child(f, fl, -1))
        k = 0
        head = 0
        while head < len(frontier):
            v = frontier[head]
            head += 1
            c = kids[k]
            k += 1
            slots = sorted(rng.choice(c + 2, size=2, replace=False).tolist())
            # stems occupy 2 of the c+2 positions; a child's label rises by one per stem before it
            pos = 0
            seen = 0
            lv = f.label[v]
            for j in range(c + 2):
                if pos < 2 and slots[pos] == j:
                    pos += 1
                    continue
                frontier.append(_add_child(f, v, lv - 1 + pos))
                seen += 1
        return from_contour(*contour_pair(f)[1:])
    raise ConditioningTimeout(f"no forest with rho={rho} after {budget} attempts")


# ---------------------------------------------------------------- symmetrization


def symmetrize(f: Forest, p: dict[int, Sequence[int]], mode: str = "partial") -> Forest:
    """Permute children: old child i of v moves to position p[v][i] (0-based).

    In ``partial`` mode the label increments stay at their positions; in
    ``complete`` mode they travel with the subtrees.
    """
    if mode not in ("partial", "complete"):
        raise ValueError("mode is partial or complete")
    for v, perm in p.items():
        if sorted(perm) != list(range(len(f.children[v]))):
            raise ValueError(f"InvalidPermutationVector at node {v}")
    inc = {}
    for v, ch in enumerate(f.children):
        for c in ch:
            inc[c] = f.label[c] - f.label[v]
    g = _new(f.tau)
    # old node -> new node, processed top-down
    stack = [(fl, fl) for fl in range(f.tau, -1, -1)]
    while stack:
        old, new = stack.pop()
        ch = f.children[old]
        perm = p.get(old, range(len(ch)))
        order = [0] * len(ch)
        for i, j in enumerate(perm):
            order[j] = i
        created = []
        for pos, i in enumerate(order):
            c = ch[i]
            d = inc[ch[pos]] if mode == "partial" else inc[c]
            created.append((c, _add_child(g, new, g.label[new] + d)))
        stack.extend(reversed(created))
    return from_contour(*contour_pair(g)[1:]) if mode == "partial" else _renumber(g)


def _renumber(g: Forest) -> Forest:
    r, c, lab = contour_pair(g)
    out = _new(g.tau)
    u = 0
    depth = 1
    for a, b, l in zip(c, c[1:], lab[1:]):
        if b == a - 1:
            u = _add_child(out, u, l)
            depth += 1
        elif depth > 1:
            u = out.parent[u]
            depth -= 1
        else:
            u += 1
    return out


def is_well_labeled(f: Forest) -> bool:
    try:
        f.validate()
    except MalformedForest:
        return False
    return True


# ---------------------------------------------------------------- text format


def to_text(f: Forest) -> str:
    """Parenthesized contour (floors separated by ``|``) and the label line."""
    parts = []
    for fl in range(f.tau + 1):
        out = []
        stack = [(c, False) for c in reversed(f.children[fl])]
        while stack:
            v, closing = stack.pop()
            if closing:
                out.append(")")
                continue
            out.append("(")
            stack.append((v, True))
            stack.extend((c, False) for c in reversed(f.children[v]))
        parts.append("".join(out))
    lab = contour_pair(f)[2]
    return "|".join(parts) + "\n" + " ".join(str(x) for x in lab)


def from_text(text: str) -> Forest:
    shape, labels = text.strip().split("\n")
    lab = [int(x) for x in labels.split()]
    c = [0]
    for i, part in enumerate(shape.split("|")):
        if i:
            c.append(c[-1] + 1)
        for ch in part:
            if ch not in "()":
                raise MalformedForest(f"bad character {ch!r}")
            c.append(c[-1] - 1 if ch == "(" else c[-1] + 1)
    return from_contour(c, lab)
