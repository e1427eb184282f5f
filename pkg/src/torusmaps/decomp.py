"""Kernel type, forests and Motzkin paths of a balanced kernel-rooted unicellular map.

The kernel face reads ``e1 e2 e1' e2'`` (square, t = 2) or
``e1 e2 e3 e1' e2' e3'`` (hexagon, t = 3) from the root half-edge, so the
face visits the maximal chains W_1..W_t forward and then backward.  The
forward pass is the right side of W_i, the backward pass its left side.
Part ``j`` of the face runs from the corner alpha_j (just after the previous
pass) to the last half-edge of pass ``j``.  Read along the face, a part is
exactly a forest word: tree edges going down and up, tree stems, and one
floor letter per core stem or chain half-edge.

Motzkin path M_i has one step per inner vertex of W_i, in forward order:
``+1`` for two stems on the right, ``0`` for one on each side, ``-1`` for
two on the left.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import forests as fo
from . import paths
from .unicell import HEXAGONAL, SQUARE, FaceWord, MissingRoot, NotUnicellular


class UnknownKernel(ValueError):
    pass


class InconsistentParameters(ValueError):
    pass


# type k: (gamma_1 + gamma_2, gamma_2 + gamma_3), (c_1, ..., c_6)
KERNEL_TABLE = {
    1: ((1, 0), (0, 0, 0, 1, 1, 0)),
    2: ((1, 1), (0, 0, 0, 0, 1, 1)),
    3: ((0, 0), (0, 1, 0, 0, 1, 0)),
    4: ((0, -1), (0, 0, 1, 1, 0, 0)),
    5: ((0, 0), (0, 0, 1, 0, 0, 1)),
    6: ((-1, -1), (0, 1, 1, 0, 0, 0)),
    7: ((0, 0), (1, 0, 0, 1, 0, 0)),
    8: ((0, 1), (1, 0, 0, 0, 0, 1)),
    9: ((-1, 0), (1, 1, 0, 0, 0, 0)),
}


@dataclass(frozen=True)
class KernelSpec:
    k: int

    @property
    def t(self) -> int:
        return 2 if self.k == 0 else 3

    @property
    def gamma_sums(self) -> tuple[int, int] | None:
        return None if self.k == 0 else KERNEL_TABLE[self.k][0]

    @property
    def c(self) -> tuple[int, ...]:
        return (0, 0, 0, 0) if self.k == 0 else KERNEL_TABLE[self.k][1]


def kernel_spec(k: int) -> KernelSpec:
    if not 0 <= k <= 9:
        raise UnknownKernel(f"type {k} is not in 0..9")
    return KernelSpec(k)


def type_of_corners(c: tuple[int, ...]) -> int:
    if len(c) == 4:
        if any(c):
            raise UnknownKernel("square kernels carry no stems")
        return 0
    for k, (_, row) in KERNEL_TABLE.items():
        if row == tuple(c):
            return k
    raise UnknownKernel(f"corner stems {c} match no type")


def tau_of(k: int, sigma, gamma) -> list[int]:
    """tau_i = 2 sigma_i + 1 + gamma_i + c_i over the 2t parts (gamma, sigma of length t)."""
    spec = kernel_spec(k)
    t = spec.t
    out = []
    for j in range(2 * t):
        i = j % t
        g = gamma[i] if j < t else -gamma[i]
        out.append(2 * sigma[i] + 1 + g + spec.c[j])
    return out


@dataclass
class DecomposedMap:
    k: int
    forests: list  # 2t Forest objects
    motzkin: list  # t Motzkin paths as tuples

    @property
    def kernel(self) -> KernelSpec:
        return kernel_spec(self.k)

    @property
    def t(self) -> int:
        return self.kernel.t

    @property
    def rho(self) -> list[int]:
        return [f.rho for f in self.forests]

    @property
    def tau(self) -> list[int]:
        return [f.tau for f in self.forests]

    @property
    def sigma(self) -> list[int]:
        s = [len(m) - 1 for m in self.motzkin]
        return s + s

    @property
    def gamma(self) -> list[int]:
        g = [m[-1] for m in self.motzkin]
        return g + [-x for x in g]

    @property
    def n(self) -> int:
        return sum(self.rho) + sum(self.sigma[: self.t]) + self.t - 1

    def parameters(self) -> dict:
        return {"k": self.k, "rho": self.rho, "tau": self.tau, "gamma": self.gamma, "sigma": self.sigma}

    def key(self) -> tuple:
        return (self.k, tuple(f.canonical() for f in self.forests), tuple(tuple(m) for m in self.motzkin))

    def __eq__(self, other):
        return isinstance(other, DecomposedMap) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def check(self) -> None:
        """Raise InconsistentParameters unless the parameter relations hold."""
        spec = self.kernel
        t = spec.t
        if len(self.forests) != 2 * t or len(self.motzkin) != t:
            raise InconsistentParameters(f"type {self.k} needs {2 * t} forests and {t} paths")
        for m in self.motzkin:
            try:
                paths.check_motzkin(m)
            except ValueError as exc:
                raise InconsistentParameters(str(exc)) from None
        g = [m[-1] for m in self.motzkin]
        if self.k == 0 and any(g):
            raise InconsistentParameters("square kernels have gamma = 0")
        if self.k > 0 and (g[0] + g[1], g[1] + g[2]) != spec.gamma_sums:
            raise InconsistentParameters(f"gamma sums {(g[0] + g[1], g[1] + g[2])} differ from type {self.k}")
        want = tau_of(self.k, self.sigma[:t], g)
        if self.tau != want:
            raise InconsistentParameters(f"tau {self.tau} but sigma, gamma and c give {want}")
        for f in self.forests:
            f.validate()

    def to_json_obj(self) -> dict:
        obj = self.parameters()
        obj["forests"] = [fo.encode_word(f) for f in self.forests]
        obj["motzkin"] = [list(m) for m in self.motzkin]
        return obj


def from_json_obj(obj: dict) -> DecomposedMap:
    fs = [fo.decode_word(w, r, t) for w, r, t in zip(obj["forests"], obj["rho"], obj["tau"])]
    return DecomposedMap(int(obj["k"]), fs, [tuple(m) for m in obj["motzkin"]])


# ---------------------------------------------------------------- decompose


def _passes(u: FaceWord) -> tuple[int, list[list[int]]]:
    """t and the core half-edges of each pass of the face, in word order."""
    shape = u.shape
    t = 2 if shape == SQUARE else 3
    core = np.flatnonzero(u.core_half_edge)
    starts = set(u.kernel_half_edges())
    if 0 not in starts:
        raise MissingRoot("the word must start at a kernel half-edge")
    out: list[list[int]] = []
    for p in core.tolist():
        if p in starts:
            out.append([])
        out[-1].append(p)
    if len(out) != 2 * t:
        raise UnknownKernel(f"{len(out)} passes along the core, expected {2 * t}")
    for i in range(t):
        back = [int(u.partner[q]) for q in reversed(out[i])]
        if back != out[i + t]:
            raise UnknownKernel("the face does not read the chains forward then backward")
    return t, out


def decompose(u: FaceWord) -> DecomposedMap:
    """Split a balanced unicellular map rooted at a kernel half-edge."""
    if u.rooted:
        raise MissingRoot("decompose works on unrooted maps (no root stem)")
    try:
        t, passes = _passes(u)
    except NotUnicellular as exc:
        raise UnknownKernel(str(exc)) from None
    L = len(u)
    partner = u.partner
    proper = u.proper[u.vertex]
    core = u.core_half_edge
    forests_out = []
    corner = []
    stems_right: list[list[int]] = []
    for j in range(2 * t):
        start = passes[j - 1][-1] + 1 if j else passes[-1][-1] + 1 - L
        stop = passes[j][-1]
        letters = []
        seen = set()
        chain = set(passes[j])
        c = 0
        before_chain = True
        run = 0
        runs = []
        for x in range(start, stop + 1):
            p = x % L
            if core[p] or (partner[p] < 0 and proper[p]):
                letters.append("0")
                if p in chain:
                    if not before_chain:
                        runs.append(run)
                    before_chain = False
                    run = 0
                elif before_chain:
                    c += 1
                else:
                    run += 1
            elif partner[p] < 0:
                letters.append("0")
            elif int(partner[p]) in seen:
                letters.append("0")
            else:
                seen.add(p)
                letters.append("1")
        word = "".join(letters)
        try:
            f = fo.decode_word(word, word.count("1"), word.count("0") - 3 * word.count("1"))
        except fo.NotInverseDominating as exc:
            raise UnknownKernel(f"part {j + 1} is not a forest: {exc}") from None
        forests_out.append(f)
        corner.append(c)
        stems_right.append(runs)
    if max(corner) > 1:
        raise UnknownKernel("more than one stem in a corner")
    k = type_of_corners(tuple(corner))
    motz = []
    for i in range(t):
        st = [r - 1 for r in stems_right[i]]
        left = stems_right[i + t][::-1]
        if any(not 0 <= r <= 2 for r in stems_right[i]) or any(a + b != 2 for a, b in zip(stems_right[i], left)):
            raise UnknownKernel("inner chain vertices carry two stems")
        motz.append(paths.from_steps(st))
    d = DecomposedMap(k, forests_out, motz)
    try:
        d.check()
    except InconsistentParameters as exc:
        raise UnknownKernel(f"map is not balanced: {exc}") from None
    return d


# ---------------------------------------------------------------- assemble


def assemble(d: DecomposedMap) -> FaceWord:
    d.check()
    t = d.t
    c = d.kernel.c
    # chain half-edge ids: (i, e) for the e-th edge of W_i, forward (+) or backward (-)
    seps: list[list] = []
    for j in range(2 * t):
        i = j % t
        st = paths.steps(d.motzkin[i])
        sig = len(st)
        s = ["s"] * c[j]
        if j < t:
            s.append(("+", i, 0))
            for e in range(1, sig + 1):
                s.extend(["s"] * (1 + st[e - 1]))
                s.append(("+", i, e))
        else:
            s.append(("-", i, sig))
            for e in range(sig, 0, -1):
                s.extend(["s"] * (1 - st[e - 1]))
                s.append(("-", i, e - 1))
        seps.append(s)
    items: list = []
    tree_id = 0
    for j in range(2 * t):
        f = d.forests[j]
        word = fo.encode_word(f)
        kinds = fo.word_tokens(word, f.tau)
        it = iter(seps[j])
        stack = []
        for kind in kinds.tolist():
            if kind == fo.FLOOR:
                items.append(next(it))
            elif kind == fo.STEM:
                items.append("s")
            elif kind == fo.DOWN:
                items.append(("d", tree_id))
                stack.append(tree_id)
                tree_id += 1
            else:
                items.append(("u", stack.pop()))
    root = items.index(("+", 0, 0))
    items = items[root:] + items[:root]
    L = len(items)
    partner = np.full(L, -1, dtype=np.int64)
    where: dict = {}
    for pos, x in enumerate(items):
        if x == "s":
            continue
        key = (x[1], x[2]) if x[0] in "+-" else ("tree", x[1])
        if key in where:
            q = where.pop(key)
            partner[pos], partner[q] = q, pos
        else:
            where[key] = pos
    if where:
        raise InconsistentParameters("unmatched half-edges")
    return FaceWord(partner)


# ---------------------------------------------------------------- shifted labeling


@dataclass
class ShiftedLabeling:
    s_bullet: np.ndarray  # on [0, I]
    s: np.ndarray  # on [0, 2n+1]
    r_p: np.ndarray  # word vertex of each angle of P, [0, I-1]
    r_q: np.ndarray  # word vertex of each angle of Q, [0, 2n+1]
    I: int

    @cached_property
    def rmq(self):
        from .labels import RangeMin

        return RangeMin(self.s)


def _part_angles(u: FaceWord, t: int, passes) -> list[tuple[list[int], list[bool]]]:
    """Per part: the word vertex of each angle of P and whether it follows a core stem."""
    L = len(u)
    partner = u.partner
    proper = u.proper[u.vertex]
    vert = u.vertex
    out = []
    for j in range(2 * t):
        start = passes[j - 1][-1] + 1 if j else passes[-1][-1] + 1 - L
        stop = passes[j][-1]
        verts = []
        after_stem = []
        prev_stem = False
        for x in range(start, stop + 1):
            p = x % L
            if partner[p] < 0 and not proper[p]:
                continue  # tree stems are not in P
            # angle of P before half-edge p
            verts.append(int(vert[p]))
            after_stem.append(prev_stem)
            prev_stem = bool(partner[p] < 0)
        out.append((verts, after_stem))
    return out


def shifted_labeling(d: DecomposedMap, u: FaceWord | None = None) -> ShiftedLabeling:
    """S on the angles of P and Q, read clockwise from alpha_1."""
    if u is None:
        u = assemble(d)
    t, passes = _passes(u)
    spec = d.kernel
    sb = [0]
    for j in range(2 * t):
        f = d.forests[j]
        i = j % t
        m = d.motzkin[i] if j < t else paths.inverse(d.motzkin[i])
        ms = paths.c_shift(paths.extend(m), spec.c[j])
        _, cont, lab = fo.contour_pair(f)
        cbar = np.maximum.accumulate(np.asarray(cont))
        part = np.asarray(lab) + np.asarray(ms)[cbar]
        sb.extend((sb[-1] + part[1:]).tolist())
    s_bullet = np.asarray(sb, dtype=np.int64)
    I = len(s_bullet) - 1
    angles = _part_angles(u, t, passes)
    r_p = np.asarray([v for verts, _ in angles for v in verts], dtype=np.int64)
    drop = np.asarray([a for _, flags in angles for a in flags], dtype=bool)
    if len(r_p) != I:
        raise AssertionError(f"P has {len(r_p)} angles, S has {I}")
    keep = ~drop
    return ShiftedLabeling(s_bullet, s_bullet[:I][keep], r_p, r_p[keep], I)


def shift_bound_check(sl: ShiftedLabeling, m_word: np.ndarray, bound: int = 16) -> list[dict]:
    """|S(i) - (m(r_Q(i)) - m(r_Q(0)))| <= 16 on every angle of Q."""
    mq = m_word[sl.r_q]
    gap = np.abs(sl.s - (mq - mq[0]))
    bad = np.flatnonzero(gap > bound)
    return [{"check": "S<=16", "i": int(i), "gap": int(gap[i])} for i in bad[:20]]


def pseudo_distance_d0(sl: ShiftedLabeling, m_word: np.ndarray, mbar, i: int, j: int) -> int:
    """d°(i, j) = m(r_Q(i)) + m(r_Q(j)) - 2 mbar(r_Q(i), r_Q(j))."""
    u, v = int(sl.r_q[i]), int(sl.r_q[j])
    return int(m_word[u] + m_word[v] - 2 * mbar(u, v))


def d0_bound_check(sl: ShiftedLabeling, m_word: np.ndarray, mbar, bound: int = 64) -> tuple[list[dict], int]:
    """Full scan of |d°(i,j) - (S(i) + S(j) - 2 min S[i..j])| over i <= j."""
    s = sl.s
    N = len(s)
    mq = m_word[sl.r_q]
    worst = 0
    bad = []
    for i in range(N):
        j = np.arange(i, N)
        smin = np.minimum.accumulate(s[i:])
        d0 = mq[i] + mq[j] - 2 * mbar(np.full(len(j), sl.r_q[i]), sl.r_q[j])
        gap = np.abs(d0 - (s[i] + s[j] - 2 * smin))
        worst = max(worst, int(gap.max()))
        for x in np.flatnonzero(gap > bound)[:5]:
            bad.append({"check": "d0<=64", "i": i, "j": int(j[x]), "gap": int(gap[x])})
    return bad, worst
