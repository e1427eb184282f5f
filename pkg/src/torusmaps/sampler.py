"""Uniform sampling of rooted toroidal triangulations through the decomposition.

The weight of a parameter vector is ``(2 + [k = 0]) * prod |F^rho_i_tau_i| *
prod |M^gamma_i_sigma_i|`` and the weights sum to ``3 |T(n)|``.  Two facts
make the law cheap to tabulate:

* tau_1 + ... + tau_2t = 4 S + 2t + sum(c) only depends on S = sum(sigma),
  and forests concatenate, so summing over rho leaves |F^R_{4S+2t+sum c}|;
* summing the Motzkin factors over sigma with sum S and over gamma is the
  coefficient of x^S in A0^t G_k(F), where A0 counts bridges to 0, F counts
  first passages to 1 and G_k collects F^(|g1|+|g2|+|g3|) over the gammas
  allowed by type k.

So a draw picks (k, S) from a table of size 10 x n, then (sigma, gamma) and
the Motzkin paths together by rejection from uniform step sequences, then
the rho_i and the forests together by cutting one uniform forest with
sum(tau) trees.
"""

from __future__ import annotations

import itertools
import math
import time
from bisect import bisect_right
from dataclasses import dataclass, field
from functools import lru_cache

import flint
import numpy as np
from scipy.signal import fftconvolve
from scipy.special import gammaln

from . import _rng
from . import forests as fo
from . import paths
from .closure import Triangulation, canonical_form, complete_closure, is_safe
from .decomp import KERNEL_TABLE, DecomposedMap, assemble, kernel_spec, tau_of
from .unicell import FaceWord, add_root, add_root_at, strip_root

EXACT_LIMIT = 512


class BudgetExceeded(RuntimeError):
    pass


class NumericalMode(RuntimeError):
    pass


def prefactor(k: int) -> int:
    return 3 if k == 0 else 2


def _gamma_exponents(k: int) -> tuple[list[int], int, int]:
    """Exponents |g1|+|g2|+|g3| for g1 in {-1,0,1} and the two tail offsets."""
    a, b = KERNEL_TABLE[k][0]
    d = b - a
    mid = [abs(g) + abs(a - g) + abs(g + d) for g in (-1, 0, 1)]
    # g >= 2 gives 3g + b - 2a, g <= -2 gives -3g + 2a - b
    return mid, 6 + b - 2 * a, 6 + 2 * a - b


def _base_sequences(N: int):
    a0 = [1, 1]
    mz = [1, 1]
    for m in range(2, N):
        a0.append(((2 * m - 1) * a0[-1] + 3 * (m - 1) * a0[-2]) // m)
        mz.append(((2 * m + 1) * mz[-1] + 3 * (m - 1) * mz[-2]) // (m + 2))
    return a0[:N], mz[:N]


@lru_cache(maxsize=8)
def motzkin_weight_series_exact(N: int) -> dict[int, list[int]]:
    """W_k(S) for S < N: weighted count of (sigma, gamma, Motzkin paths) with sum(sigma) = S."""
    flint.ctx.cap = max(flint.ctx.cap, N)
    a0, mz = _base_sequences(N)
    A0 = flint.fmpz_series(a0, prec=N)
    F = flint.fmpz_series([0] + mz[: N - 1], prec=N)
    F3 = F * F * F
    tail = 1 / (1 - F3)
    A03 = A0 * A0 * A0
    out = {0: [int(x) for x in (A0 * A0).coeffs()]}
    for k in KERNEL_TABLE:
        mid, e1, e2 = _gamma_exponents(k)
        g = sum((F ** e for e in mid), flint.fmpz_series([0], prec=N)) + (F ** e1 + F ** e2) * tail
        out[k] = [int(x) for x in (A03 * g).coeffs()]
    for k in out:
        out[k] = (out[k] + [0] * N)[:N]
    return out


def _mul(a, b, N):
    return fftconvolve(a, b)[:N]


def _inv(h, N):
    """Power series inverse of h (h[0] = 1) by Newton iteration."""
    g = np.array([1.0 / h[0]])
    m = 1
    while m < N:
        m = min(2 * m, N)
        e = -_mul(h[:m], g, m)
        e[0] += 2.0
        g = _mul(g, e, m)
    return g[:N]


@lru_cache(maxsize=8)
def motzkin_weight_series_float(N: int) -> dict[int, np.ndarray]:
    """W_k(S) / 3^S in floating point (the scaled series are bounded)."""
    a0 = np.zeros(N)
    mz = np.zeros(N)
    a0[0] = mz[0] = 1.0
    if N > 1:
        a0[1] = 1 / 3
        mz[1] = 1 / 3
    for m in range(2, N):
        a0[m] = ((2 * m - 1) * a0[m - 1] / 3 + 3 * (m - 1) * a0[m - 2] / 9) / m
        mz[m] = ((2 * m + 1) * mz[m - 1] / 3 + 3 * (m - 1) * mz[m - 2] / 9) / (m + 2)
    F = np.concatenate(([0.0], mz[: N - 1] / 3))
    powers = {1: F}

    def power(e):
        if e not in powers:
            h = e // 2
            powers[e] = _mul(power(h), power(e - h), N)
        return powers[e]

    one = np.zeros(N)
    one[0] = 1.0
    powers[0] = one
    tail = _inv(one - power(3), N)
    A02 = _mul(a0, a0, N)
    A03 = _mul(A02, a0, N)
    out = {0: A02}
    for k in KERNEL_TABLE:
        mid, e1, e2 = _gamma_exponents(k)
        g = sum(power(e) for e in mid) + _mul(power(e1) + power(e2), tail, N)
        out[k] = np.maximum(_mul(A03, g, N), 0.0)
    return out


def log_count_forests(rho, tau):
    rho = np.asarray(rho, dtype=float)
    tau = np.asarray(tau, dtype=float)
    return np.log(tau) - np.log(4 * rho + tau) + gammaln(4 * rho + tau + 1) - gammaln(rho + 1) - gammaln(3 * rho + tau + 1)


@dataclass
class ParameterVector:
    k: int
    rho: list[int]
    tau: list[int]
    gamma: list[int]
    sigma: list[int]

    @property
    def t(self) -> int:
        return 2 if self.k == 0 else 3

    @property
    def n(self) -> int:
        return sum(self.rho) + sum(self.sigma[: self.t]) + self.t - 1

    def as_tuple(self) -> tuple:
        return (self.k, tuple(self.rho), tuple(self.tau), tuple(self.gamma), tuple(self.sigma))

    def to_json_obj(self) -> dict:
        return {"k": self.k, "rho": self.rho, "tau": self.tau, "gamma": self.gamma, "sigma": self.sigma}


class ParameterLaw:
    """Table of (k, S) weights for one n."""

    def __init__(self, n: int, mode: str | None = None):
        if n < 1:
            raise ValueError("n >= 1")
        self.n = n
        self.mode = mode or ("exact" if n <= EXACT_LIMIT else "float")
        if self.mode not in ("exact", "float"):
            raise ValueError(f"unknown mode {self.mode}")
        self.cells: list[tuple[int, int]] = []
        if self.mode == "exact":
            self._build_exact()
        else:
            try:
                self._build_float()
            except (FloatingPointError, ValueError) as exc:
                raise NumericalMode(str(exc)) from None

    def _cells(self):
        n = self.n
        for k in range(10):
            t = kernel_spec(k).t
            for S in range(0, n - t + 2):
                R = n - S - (t - 1)
                tau_sum = 4 * S + 2 * t + (2 if k else 0)
                yield k, S, R, tau_sum

    def _build_exact(self):
        W = motzkin_weight_series_exact(self.n + 1)
        weights = []
        for k, S, R, tau_sum in self._cells():
            w = prefactor(k) * fo.count_forests(R, tau_sum) * W[k][S]
            if w:
                self.cells.append((k, S))
                weights.append(w)
        self.weights = weights
        self.total = sum(weights)
        self.cum = list(itertools.accumulate(weights))
        if self.total % 3:
            raise AssertionError("total weight is not a multiple of 3")

    def _build_float(self):
        W = motzkin_weight_series_float(self.n + 1)
        logs = []
        for k, S, R, tau_sum in self._cells():
            w = W[k][S]
            if w > 0:
                self.cells.append((k, S))
                logs.append(math.log(prefactor(k)) + float(log_count_forests(R, tau_sum)) + S * math.log(3) + math.log(w))
        logs = np.asarray(logs)
        top = logs.max()
        p = np.exp(logs - top)
        self.log_total = top + math.log(math.fsum(p))
        self.cum_f = np.cumsum(p) / p.sum()

    @property
    def count(self) -> int:
        """|T_{r,s,b}(n)| (exact mode)."""
        if self.mode != "exact":
            raise NumericalMode("exact counts need exact mode")
        return self.total // 3

    def log_count(self) -> float:
        if self.mode == "exact":
            return math.log(self.total) - math.log(3)
        return self.log_total - math.log(3)

    def draw_cell(self, rng: np.random.Generator) -> tuple[int, int]:
        if self.mode == "exact":
            x = _rng.randbelow(rng, self.total)
            return self.cells[bisect_right(self.cum, x)]
        i = int(np.searchsorted(self.cum_f, rng.random(), side="right"))
        return self.cells[min(i, len(self.cells) - 1)]

    def marginal_k(self) -> dict[int, float]:
        out: dict[int, float] = {}
        if self.mode == "exact":
            for (k, _), w in zip(self.cells, self.weights):
                out[k] = out.get(k, 0) + w
            return {k: v / self.total for k, v in out.items()}
        prev = 0.0
        for (k, _), c in zip(self.cells, self.cum_f):
            out[k] = out.get(k, 0.0) + c - prev
            prev = c
        return out


@lru_cache(maxsize=64)
def parameter_law(n: int, mode: str | None = None) -> ParameterLaw:
    try:
        return ParameterLaw(n, mode)
    except NumericalMode:
        return ParameterLaw(n, "exact")


def _draw_chains(k: int, S: int, rng: np.random.Generator, budget: int = 10_000_000):
    """sigma (length t) and the t Motzkin paths, uniform among those allowed by type k.

    A uniform weak composition of S into t parts and S uniform steps are
    drawn in batches; a draw is kept when the segment sums satisfy the
    gamma constraints of the type, which leaves it uniform among them.
    """
    spec = kernel_spec(k)
    t = spec.t
    target = (0, 0) if k == 0 else spec.gamma_sums
    batch = max(16, 4 * S)
    if S <= 12:
        return _draw_chains_small(t, S, target, k == 0, rng, batch, budget)
    tries = 0
    while tries < budget:
        tries += batch
        steps = rng.integers(-1, 2, size=(batch, S))
        cs = np.concatenate([np.zeros((batch, 1), dtype=np.int64), np.cumsum(steps, axis=1)], axis=1)
        # stars and bars: t - 1 distinct bar positions among S + t - 1
        bars = np.sort(np.argsort(rng.random((batch, S + t - 1)), axis=1)[:, : t - 1], axis=1)
        cuts = bars - np.arange(t - 1)
        bounds = np.concatenate([np.zeros((batch, 1), dtype=np.int64), cuts, np.full((batch, 1), S)], axis=1)
        ends = np.take_along_axis(cs, bounds, axis=1)
        g = np.diff(ends, axis=1)
        if k == 0:
            ok = (g[:, 0] == target[0]) & (g[:, 1] == target[1])
        else:
            ok = (g[:, 0] + g[:, 1] == target[0]) & (g[:, 1] + g[:, 2] == target[1])
        hit = np.flatnonzero(ok)
        if len(hit):
            b = int(hit[0])
            row = cs[b]
            bd = bounds[b].tolist()
            motz = [tuple(int(x) for x in row[bd[i] : bd[i + 1] + 1] - row[bd[i]]) for i in range(t)]
            return [bd[i + 1] - bd[i] for i in range(t)], motz
    raise BudgetExceeded(f"no chain draw for k={k}, S={S}")


def _draw_chains_small(t, S, target, square, rng, batch, budget):
    """Same law as the batched numpy path, looping in Python (cheaper for short chains)."""
    tries = 0
    m = S + t - 1
    while tries < budget:
        tries += batch
        steps = rng.integers(-1, 2, size=(batch, S)).tolist()
        keys = rng.random((batch, m)).tolist()
        for st, key in zip(steps, keys):
            bars = sorted(sorted(range(m), key=key.__getitem__)[: t - 1])
            bd = [0] + [b - i for i, b in enumerate(bars)] + [S]
            g = [sum(st[bd[i] : bd[i + 1]]) for i in range(t)]
            if square:
                ok = g[0] == target[0] and g[1] == target[1]
            else:
                ok = g[0] + g[1] == target[0] and g[1] + g[2] == target[1]
            if ok:
                motz = []
                for i in range(t):
                    path = [0]
                    for x in st[bd[i] : bd[i + 1]]:
                        path.append(path[-1] + x)
                    motz.append(tuple(path))
                return [bd[i + 1] - bd[i] for i in range(t)], motz
    raise BudgetExceeded(f"no chain draw for S={S}")


def _split_forest(word: str, taus: list[int]) -> list[str]:
    kinds = fo.word_tokens(word, sum(taus))
    out = []
    start = 0
    floors = 0
    target = list(itertools.accumulate(taus))
    j = 0
    for i, kind in enumerate(kinds.tolist()):
        if kind == fo.FLOOR:
            floors += 1
            while j < len(target) and floors == target[j]:
                out.append(word[start : i + 1])
                start = i + 1
                j += 1
    return out


def _draw_forests(taus: list[int], R: int, rng: np.random.Generator) -> list[fo.Forest]:
    parts = _split_forest(paths.word_from_walk(paths.sample_first_passage(R, sum(taus), rng)), taus)
    return [fo.decode_word(p, p.count("1"), tau) for p, tau in zip(parts, taus)]


@dataclass(frozen=True)
class Draw:
    """Raw random choices behind one sample: they determine the rooted word."""

    k: int
    motzkin: tuple
    tau: tuple
    forest_word: str  # one forest with sum(tau) trees, cut at the floors
    slot: int

    def parts(self) -> list[str]:
        return _split_forest(self.forest_word, list(self.tau))

    def parameters(self) -> ParameterVector:
        t = len(self.motzkin)
        sigma = [len(m) - 1 for m in self.motzkin]
        gamma = [m[-1] for m in self.motzkin]
        rho = [p.count("1") for p in self.parts()]
        return ParameterVector(self.k, rho, list(self.tau), gamma + [-g for g in gamma], sigma * 2)

    def decomposition(self) -> DecomposedMap:
        fs = [fo.decode_word(p, p.count("1"), tau) for p, tau in zip(self.parts(), self.tau)]
        return DecomposedMap(self.k, fs, list(self.motzkin))


def draw(n: int, rng: np.random.Generator, law: ParameterLaw | None = None) -> Draw:
    law = law or parameter_law(n)
    k, S = law.draw_cell(rng)
    sigma, motz = _draw_chains(k, S, rng)
    gamma = [m[-1] for m in motz]
    taus = tau_of(k, sigma, gamma)
    R = n - S - (kernel_spec(k).t - 1)
    word = paths.word_from_walk(paths.sample_first_passage(R, sum(taus), rng))
    slot = int(rng.integers(1, 5))
    return Draw(k, tuple(motz), tuple(taus), word, slot)


SMALL_N = 12
_word_cache: dict = {}


def rooted_word(d: Draw) -> FaceWord:
    """Assemble, then add the root stem in the drawn slot (memoised for tiny maps)."""
    key = (d.k, d.motzkin, d.tau, d.forest_word, d.slot)
    hit = _word_cache.get(key)
    if hit is not None:
        return hit
    T = add_root(assemble(d.decomposition()), d.slot)
    if len(d.forest_word) <= 4 * SMALL_N + 60:
        if len(_word_cache) > 200_000:
            _word_cache.clear()
        _word_cache[key] = T
    return T


def sample_decomposition(n: int, rng: np.random.Generator, law: ParameterLaw | None = None) -> DecomposedMap:
    return draw(n, rng, law).decomposition()


def sample_parameters(n: int, rng: np.random.Generator, law: ParameterLaw | None = None) -> ParameterVector:
    """Parameter vector with law P_n (components are drawn but never built)."""
    return draw(n, rng, law).parameters()


@dataclass
class SampleRecord:
    seed: int
    index: int
    n: int
    mode: str
    parameters: ParameterVector
    slot: int
    word: FaceWord
    triangulation: Triangulation | None = None
    timing: dict = field(default_factory=dict)

    def to_json_obj(self, include_map: bool = True) -> dict:
        obj = {
            "seed": self.seed,
            "index": self.index,
            "n": self.n,
            "mode": self.mode,
            "parameters": self.parameters.to_json_obj(),
            "slot": self.slot,
            "word": self.word.partner.tolist(),
        }
        if include_map and self.triangulation is not None:
            obj["triangulation"] = self.triangulation.g.to_json_obj()
        return obj


def sample_word(n: int, rng: np.random.Generator, law: ParameterLaw | None = None):
    """A uniform element of T_{r,s,b}(n) as a rooted face word, with its draw."""
    d = draw(n, rng, law)
    return rooted_word(d), d


def sample_triangulation(n: int, rng_or_seed, index: int = 0, mode: str | None = None,
                         law: ParameterLaw | None = None, close: bool = True) -> SampleRecord:
    """Uniform element of G(n).

    With an integer seed the generator is the sub-stream ``(seed, index)``,
    so a record is reproducible from (seed, index, n, mode) alone.
    """
    if isinstance(rng_or_seed, (int, np.integer)):
        seed = int(rng_or_seed)
        rng = _rng.stream(seed, index)
    else:
        seed = -1
        rng = rng_or_seed
    t0 = time.perf_counter()
    law = law or parameter_law(n, mode)
    t1 = time.perf_counter()
    T, d = sample_word(n, rng, law)
    t2 = time.perf_counter()
    tri = complete_closure(T) if close else None
    t3 = time.perf_counter()
    timing = {"law_ms": 1e3 * (t1 - t0), "sample_ms": 1e3 * (t2 - t1), "closure_ms": 1e3 * (t3 - t2)}
    return SampleRecord(seed, index, n, law.mode, d.parameters(), d.slot, T, tri, timing)


# ---------------------------------------------------------------- exact laws and enumeration


def parameter_pmf(n: int) -> dict[tuple, tuple[int, int]]:
    """Every parameter vector with its exact weight; values are (weight, total)."""
    vecs = {}
    for k in range(10):
        spec = kernel_spec(k)
        t = spec.t
        for sigma in itertools.product(range(n + 1), repeat=t):
            S = sum(sigma)
            R = n - S - (t - 1)
            if R < 0:
                continue
            if k == 0:
                gammas = [(0, 0)]
            else:
                a, b = spec.gamma_sums
                gammas = [(g, a - g, b - a + g) for g in range(-sigma[0], sigma[0] + 1)]
            for gamma in gammas:
                if any(abs(g) > s for g, s in zip(gamma, sigma)):
                    continue
                taus = tau_of(k, sigma, gamma)
                mw = math.prod(paths.count_motzkin(s, g) for s, g in zip(sigma, gamma))
                for rho in _compositions(R, 2 * t):
                    w = prefactor(k) * mw * math.prod(fo.count_forests(r, tt) for r, tt in zip(rho, taus))
                    g2 = list(gamma) + [-g for g in gamma]
                    vecs[(k, tuple(rho), tuple(taus), tuple(g2), tuple(sigma) * 2)] = w
    total = sum(vecs.values())
    return {key: (w, total) for key, w in vecs.items()}


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _motzkin_paths(sigma: int, gamma: int):
    for st in itertools.product((-1, 0, 1), repeat=sigma):
        if sum(st) == gamma:
            yield paths.from_steps(st)


def enumerate_decompositions(n: int, budget: int = 5_000_000):
    """Every decomposed map with n vertices (all types, parameters and components)."""
    count = 0
    for key in parameter_pmf(n):
        k, rho, taus, gamma, sigma = key
        t = kernel_spec(k).t
        fsets = [list(fo.enumerate_forests(r, tt)) for r, tt in zip(rho, taus)]
        msets = [list(_motzkin_paths(sigma[i], gamma[i])) for i in range(t)]
        for fs in itertools.product(*fsets):
            for ms in itertools.product(*msets):
                count += 1
                if count > budget:
                    raise BudgetExceeded(f"more than {budget} decompositions")
                yield DecomposedMap(k, list(fs), list(ms))


@dataclass
class Enumeration:
    n: int
    words: list[FaceWord]
    weight: dict  # word -> sum of prefactors over (U, slot) pairs reaching it
    triangulations: list[Triangulation] | None = None


def enumerate_all(n: int, close: bool = True, n_max: int = 4, budget: int = 5_000_000) -> Enumeration:
    """All of T_{r,s,b}(n) from the decomposition side, with closures."""
    if n > n_max:
        raise BudgetExceeded(f"n = {n} is above the enumeration limit {n_max}")
    weight: dict[FaceWord, int] = {}
    for d in enumerate_decompositions(n, budget):
        u = assemble(d)
        w = prefactor(d.k)
        for slot in range(1, 5):
            T = add_root(u, slot)
            weight[T] = weight.get(T, 0) + w
    words = sorted(weight, key=lambda x: x.key())
    tris = [complete_closure(T) for T in words] if close else None
    return Enumeration(n, words, weight, tris)


def closures_distinct(tris: list[Triangulation]) -> bool:
    forms = {canonical_form(t.g, 0) for t in tris}
    return len(forms) == len(tris)


# ---------------------------------------------------------------- brute-force oracle


def _matchings(points: list[int]):
    if not points:
        yield []
        return
    a = points[0]
    for i in range(1, len(points)):
        rest = points[1:i] + points[i + 1 :]
        for m in _matchings(rest):
            yield [(a, points[i])] + m


def _distributions(k: int, slots: int):
    """Ways to put k identical stems into ``slots`` ordered slots."""
    for bars in itertools.combinations(range(k + slots - 1), slots - 1):
        prev = -1
        out = []
        for b in bars:
            out.append(b - prev - 1)
            prev = b
        out.append(k + slots - 1 - prev - 1)
        yield out


def brute_force_words(n: int) -> list[FaceWord]:
    """T_{r,s,b}(n) straight from the definitions.

    Every genus-one chord diagram with n + 1 chords read from the root,
    every placement of the remaining stems obeying the per-vertex stem rule,
    then the safe and balanced filters.
    """
    from .unicell import HEXAGONAL, NotUnicellular

    N = 2 * (n + 1)
    out = []
    for m in _matchings(list(range(N))):
        partner = np.empty(N, dtype=np.int64)
        for a, b in m:
            partner[a], partner[b] = b, a
        chord = FaceWord(partner)
        if chord.n_vertices != n:
            continue
        try:
            shape = chord.shape
        except NotUnicellular:
            continue
        need = np.full(n, 2)
        for v in chord.special:
            need[v] = 1 if shape == HEXAGONAL else 0
        vert = chord.vertex
        # slot 0 is angle 0 after the root stem, slot N is angle 0 before it
        owner = list(vert) + [vert[0]]
        by_vertex: dict[int, list[int]] = {}
        for s, v in enumerate(owner):
            by_vertex.setdefault(int(v), []).append(s)
        choices = [list(_distributions(int(need[v]), len(by_vertex[v]))) for v in range(n)]
        for combo in itertools.product(*choices):
            gaps = [0] * (N + 1)
            for v, dist in enumerate(combo):
                for s, c in zip(by_vertex[v], dist):
                    gaps[s] = c
            letters = [-2]  # root stem
            for j in range(N):
                letters.extend([-2] * gaps[j])
                letters.append(j)
            letters.extend([-2] * gaps[N])
            pos = {x: i for i, x in enumerate(letters) if x >= 0}
            p = np.array([pos[int(partner[x])] if x >= 0 else -1 for x in letters], dtype=np.int64)
            T = FaceWord(p, rooted=True)
            if not T.in_class(n):
                continue
            if not is_safe(T) or not T.is_balanced():
                continue
            out.append(T)
    return sorted(out, key=lambda x: x.key())


def triangulation_counts(n_max: int) -> list[int]:
    """|G(n)| = |T_{r,s,b}(n)| for n = 1..n_max from the exact parameter law."""
    return [parameter_law(n, "exact").count for n in range(1, n_max + 1)]


def unrooted_vertex_map(u: FaceWord, x: int, tri: Triangulation) -> np.ndarray:
    """Vertex ids of u mapped to vertex ids of the closure of add_root_at(u, x)."""
    L = len(u)
    pos = (np.arange(L) - x) % L + 1
    out = np.empty(u.n_vertices, dtype=np.int64)
    out[u.vertex] = tri.g.vertex_of[pos]
    return out
