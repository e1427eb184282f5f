"""Motzkin paths, binary words and {-3, +1} lattice walks.

Motzkin paths are stored as tuples of heights ``(M_0, ..., M_sigma)``
starting at 0.  Binary words are strings over ``"01"``.  Walks with
steps in {-3, +1} are numpy integer arrays of partial sums.
"""

from __future__ import annotations

from functools import lru_cache
from math import comb, factorial
from typing import Sequence

import numpy as np

from ._rng import randbelow


class PreconditionFailed(ValueError):
    pass


class EmptyClass(ValueError):
    pass


# ---------------------------------------------------------------- Motzkin


def check_motzkin(m: Sequence[int]) -> tuple[int, ...]:
    m = tuple(int(x) for x in m)
    if not m or m[0] != 0:
        raise ValueError("a Motzkin path starts at 0")
    for a, b in zip(m, m[1:]):
        if abs(b - a) > 1:
            raise ValueError(f"step {b - a} is not in {{-1, 0, 1}}")
    return m


def steps(m: Sequence[int]) -> list[int]:
    return [b - a for a, b in zip(m, m[1:])]


def from_steps(st: Sequence[int]) -> tuple[int, ...]:
    out = [0]
    for s in st:
        out.append(out[-1] + int(s))
    return tuple(out)


def extend(m: Sequence[int]) -> tuple[int, ...]:
    """Insert M_i+1 after a flat step start, M_i+1, M_i+2 after an up step start.

    The result has length 2*sigma + gamma and the same endpoint.
    """
    out = [m[0]]
    for a, b in zip(m, m[1:]):
        if b == a:
            out.append(a + 1)
        elif b == a + 1:
            out.append(a + 1)
            out.append(a + 2)
        out.append(b)
    return tuple(out)


def unextend(mt: Sequence[int]) -> tuple[int, ...]:
    """Inverse of :func:`extend`: every run of up steps closed by a down step
    is one step of the original path (2 ups: +1, 1 up: 0, none: -1)."""
    out = [0]
    ups = 0
    for s in steps(mt):
        if s == 1:
            ups += 1
            if ups > 2:
                raise ValueError("not an extended Motzkin path")
        elif s == -1:
            out.append(out[-1] + ups - 1)
            ups = 0
        else:
            raise ValueError("extended paths only have steps +1 and -1")
    if ups:
        raise ValueError("extended path must end with a down step")
    return tuple(out)


def inverse(m: Sequence[int]) -> tuple[int, ...]:
    g = m[-1]
    return tuple(x - g for x in reversed(m))


def c_shift(mt: Sequence[int], c: int) -> tuple[int, ...]:
    """Prepend the corner: an edge step down (c=0) or a stem then an edge (c=1).

    Takes a path of length 2*sigma + gamma to one of length
    2*sigma + gamma + c + 1 ending at gamma + c - 1.
    """
    if c == 0:
        return (0,) + tuple(x - 1 for x in mt)
    if c == 1:
        return (0, 1) + tuple(mt)
    raise ValueError("c must be 0 or 1")


def c_unshift(ms: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Recover ``(c, extended path)`` from a c-shifted path."""
    if len(ms) >= 3 and ms[1] == 1:
        return 1, tuple(ms[2:])
    return 0, tuple(x + 1 for x in ms[1:])


def to_ascii(m: Sequence[int]) -> str:
    return "".join("+" if s > 0 else "-" if s < 0 else "0" for s in steps(m))


def from_ascii(s: str) -> tuple[int, ...]:
    table = {"+": 1, "0": 0, "-": -1}
    try:
        return from_steps([table[ch] for ch in s.strip()])
    except KeyError as exc:
        raise ValueError(f"bad Motzkin character {exc}") from None


@lru_cache(maxsize=None)
def count_motzkin(sigma: int, gamma: int) -> int:
    """Number of paths of length sigma with steps in {-1,0,1} ending at gamma."""
    if sigma < 0 or abs(gamma) > sigma:
        return 0
    total = 0
    f = factorial(sigma)
    for u in range(max(gamma, 0), (sigma + gamma) // 2 + 1):
        d = u - gamma
        flat = sigma - u - d
        if d < 0 or flat < 0:
            continue
        total += f // (factorial(u) * factorial(d) * factorial(flat))
    return total


def sample_motzkin_bridge(sigma: int, gamma: int, rng: np.random.Generator) -> tuple[int, ...]:
    """Uniform path of length sigma ending at gamma.

    The number of up steps u is drawn with weight sigma!/(u!(u-gamma)!(sigma-2u+gamma)!),
    then the multiset of steps is shuffled.
    """
    if sigma < 0 or abs(gamma) > sigma:
        raise EmptyClass(f"no Motzkin path with sigma={sigma}, gamma={gamma}")
    us = list(range(max(gamma, 0), (sigma + gamma) // 2 + 1))
    if sigma <= 400:
        f = factorial(sigma)
        w = [f // (factorial(u) * factorial(u - gamma) * factorial(sigma - 2 * u + gamma)) for u in us]
        x = randbelow(rng, sum(w))
        k = 0
        while x >= w[k]:
            x -= w[k]
            k += 1
        u = us[k]
    else:
        from scipy.special import gammaln

        ua = np.array(us, dtype=float)
        lw = -(gammaln(ua + 1) + gammaln(ua - gamma + 1) + gammaln(sigma - 2 * ua + gamma + 1))
        p = np.exp(lw - lw.max())
        u = us[int(rng.choice(len(us), p=p / p.sum()))]
    st = np.zeros(sigma, dtype=np.int64)
    st[:u] = 1
    st[u : 2 * u - gamma] = -1
    rng.shuffle(st)
    return from_steps(st.tolist())


# ---------------------------------------------------------------- words


def is_k_dominating(b: str, k: int) -> bool:
    z = 0
    for ch in b:
        z += 1 if ch == "0" else -k
        if z <= 0:
            return False
    return True


def is_inverse_k_dominating(b: str, k: int) -> bool:
    return is_k_dominating(b[::-1], k)


def cycle_lemma_count(b: str, k: int) -> tuple[int, list[int]]:
    """Rotations ``b[i:] + b[:i]`` that are k-dominating.

    With p zeros and q ones there are exactly p - k*q of them.
    """
    p = b.count("0")
    q = len(b) - p
    if p < k * q:
        raise PreconditionFailed(f"p={p} < k*q={k * q}")
    rots = [i for i in range(len(b)) if is_k_dominating(b[i:] + b[:i], k)]
    return len(rots), rots


def count_forest_words(rho: int, tau: int) -> int:
    """Words of length 4 rho + tau with rho ones whose reversal is 3-dominating."""
    n = 4 * rho + tau
    return tau * comb(n, rho) // n


# ---------------------------------------------------------------- walks


def walk_from_word(b: str) -> np.ndarray:
    st = np.where(np.frombuffer(b.encode(), dtype=np.uint8) == ord("1"), -3, 1)
    return np.concatenate(([0], np.cumsum(st)))


def word_from_walk(w: np.ndarray) -> str:
    d = np.diff(w)
    return "".join(np.where(d < 0, "1", "0"))


def is_first_passage(w: np.ndarray, tau: int) -> bool:
    return bool(w[0] == 0 and w[-1] == tau and (len(w) == 1 or w[:-1].max() < tau))


def sample_first_passage(rho: int, tau: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform walk with rho steps -3 and 3 rho + tau steps +1 that reaches tau
    for the first time at its last step.

    A uniform bridge is rotated at the first hitting time of max - nu with
    nu uniform in {0, ..., tau - 1}.
    """
    if tau < 1 or rho < 0:
        raise ValueError("need rho >= 0 and tau >= 1")
    n = 4 * rho + tau
    st = np.ones(n, dtype=np.int64)
    st[:rho] = -3
    rng.shuffle(st)
    s = np.concatenate(([0], np.cumsum(st)))
    nu = int(rng.integers(tau))
    m = int(np.argmax(s >= s.max() - nu))
    st = np.concatenate((st[m:], st[:m]))
    return np.concatenate(([0], np.cumsum(st)))
