"""Monte Carlo value of the normalising constant Upsilon.

The integrand lives on k in 1..9, rho in the 5-simplex (rho_6 = 1 - sum),
gamma_1 in R and sigma_1..sigma_3 > 0, with sigma_{i+3} = sigma_i,
gamma_2 = -gamma_1, gamma_3 = gamma_1 and

    prod_{i=1..6} sigma_i / (sqrt2 rho_i) * 2 / sqrt(6 pi rho_i)
                  * exp(-sigma_i^2 / (3 rho_i)) * (4/3)^(c_i + 1)
    * prod_{i=1..3} p_{sigma_i}(gamma_i).

p_s is the N(0, s) density: it is the local limit of a sum of uniform
{-1, 0, 1} steps under the (9/8n)^(1/4), 1/sqrt(2n) rescaling.  Every
hexagonal row of the c table sums to 2, so the k-sum is the factor
9 (4/3)^8 in front of one integral.

Importance sampling: rho ~ Dirichlet(a), each sigma_i is a scaled chi(3)
matched to its two Gaussian factors, gamma_1 is the exact Gaussian of its
conditional law.  With a < 1/2 the weights have finite variance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from ..decomp import KERNEL_TABLE


class InsufficientSamples(ValueError):
    pass


@dataclass
class UpsilonEstimate:
    value: float
    stderr: float
    low: float
    high: float
    samples: int
    alpha: float
    min_integrand: float

    def to_json_obj(self) -> dict:
        return dict(self.__dict__)


def k_factor() -> float:
    return sum(math.prod((4 / 3) ** (c + 1) for c in row[1]) for k, row in KERNEL_TABLE.items() if k > 0)


def log_integrand(rho, sigma3, gamma1):
    """log of the k-free integrand, vectorised over rows (rho has 6 columns)."""
    sigma = np.concatenate([sigma3, sigma3], axis=1)
    gam = np.stack([gamma1, -gamma1, gamma1], axis=1)
    out = np.sum(np.log(sigma) - 0.5 * np.log(2) - np.log(rho) + np.log(2) - 0.5 * np.log(6 * np.pi * rho)
                 - sigma**2 / (3 * rho), axis=1)
    out += np.sum(-0.5 * np.log(2 * np.pi * sigma3) - gam**2 / (2 * sigma3), axis=1)
    return out


def estimate_upsilon(samples: int, rng: np.random.Generator, alpha: float = 0.25, level: float = 0.95,
                     batch: int = 200_000) -> UpsilonEstimate:
    if samples < 1000:
        raise InsufficientSamples("need at least 1000 samples")
    from scipy.stats import norm

    a = np.full(6, alpha)
    log_dir = gammaln(6 * alpha) - 6 * gammaln(alpha)
    total = 0.0
    total2 = 0.0
    lowest = math.inf
    done = 0
    while done < samples:
        m = min(batch, samples - done)
        rho = rng.dirichlet(a, size=m)
        rho = np.maximum(rho, 1e-300)
        inv2s2 = 1 / (3 * rho[:, :3]) + 1 / (3 * rho[:, 3:])
        s = np.sqrt(0.5 / inv2s2)
        x = np.sqrt(rng.chisquare(3, size=(m, 3)))
        sigma3 = s * x
        prec = np.sum(1 / sigma3, axis=1)
        gamma1 = rng.standard_normal(m) / np.sqrt(prec)
        lf = log_integrand(rho, sigma3, gamma1)
        lq = log_dir + np.sum((alpha - 1) * np.log(rho), axis=1)
        lq += np.sum(0.5 * np.log(2 / np.pi) + 2 * np.log(sigma3) - sigma3**2 * inv2s2 - 3 * np.log(s), axis=1)
        lq += 0.5 * np.log(prec / (2 * np.pi)) - 0.5 * prec * gamma1**2
        w = np.exp(lf - lq)
        w[~np.isfinite(w)] = 0.0
        lowest = min(lowest, float(np.exp(lf).min()))
        total += float(w.sum())
        total2 += float((w**2).sum())
        done += m
    kf = k_factor()
    mean = total / samples
    var = max(total2 / samples - mean**2, 0.0)
    se = math.sqrt(var / samples)
    z = float(norm.ppf(0.5 + level / 2))
    return UpsilonEstimate(kf * mean, kf * se, kf * (mean - z * se), kf * (mean + z * se), samples, alpha, lowest)


def count_ratio(log_count: float, n: int, upsilon: float) -> float:
    """|G(n)| / (2 Upsilon (256/27)^(n-2))."""
    return math.exp(log_count - math.log(2 * upsilon) - (n - 2) * math.log(256 / 27))
