"""Independent verification engines.

Monte Carlo estimates the mixed Poisson probabilities f(n) = E[X^n e^-X] / n!
straight from draws of the mixing variable. Quadrature integrates the same
expectation against a closed-form density. Neither path touches the
closed-form PMFs or the PGF recursion, so they can be used to check them.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import special

from ._numeric import log_integral_exp
from .errors import DomainError, OracleOverflowError, UnsupportedFamilyError
from .families import AsymLaplace, ExtremeStable, GaussianMix, TwoPoint, sample_mixing

__all__ = [
    "OracleEstimate",
    "SHARD_SIZE",
    "shard_seed",
    "mc_estimate",
    "mc_estimate_many",
    "quad_estimate",
    "term_quad",
    "log_side_integral",
]

SHARD_SIZE = 1 << 16
MIN_SAMPLES = 1000
_LOG_MAX = math.log(np.finfo(np.float64).max)


@dataclass(frozen=True)
class OracleEstimate:
    value: float
    stderr: float
    samples: int
    seed: int
    n: int


def shard_seed(seed, index):
    """Seed for shard ``index``: a SeedSequence keyed by (seed, index)."""
    return np.random.SeedSequence(entropy=seed, spawn_key=(index,))


def _check_seed(seed):
    if isinstance(seed, bool) or int(seed) != seed or not (0 <= seed < 2**64):
        raise DomainError(f"seed must be an integer in [0, 2**64), got {seed!r}")
    return int(seed)


def _contributions(x, n, log_abs):
    """Per-sample x^n e^-x / n!, computed in log space with the sign kept apart."""
    if n == 0:
        log_mag = -x
    else:
        log_mag = n * log_abs - x - math.lgamma(n + 1)
    worst = float(np.max(log_mag))
    if worst > _LOG_MAX:
        i = int(np.argmax(log_mag))
        raise OracleOverflowError(
            f"contribution for n={n} at x={x[i]!r} has log-magnitude {worst:.1f}; "
            "the left tail of the mixing law is too heavy"
        )
    values = np.exp(log_mag)
    if n % 2 == 1:
        values = np.where(x < 0.0, -values, values)
    return values


def _shard_stats(spec, ns, seed, index, size):
    x = sample_mixing(spec, shard_seed(seed, index), size)
    with np.errstate(divide="ignore"):
        log_abs = np.log(np.abs(x))
    out = []
    for n in ns:
        v = _contributions(x, n, log_abs)
        mean = float(np.mean(v))
        m2 = float(np.sum((v - mean) ** 2))
        out.append((size, mean, m2))
    return out


def _merge(a, b):
    na, ma, m2a = a
    nb, mb, m2b = b
    n = na + nb
    delta = mb - ma
    return n, ma + delta * nb / n, m2a + m2b + delta * delta * na * nb / n


def mc_estimate_many(spec, ns, samples, seed, workers=1):
    """Monte Carlo estimates of f(n) for every n in ``ns`` from shared draws.

    The ``samples`` draws are split into shards of :data:`SHARD_SIZE`, each
    seeded by :func:`shard_seed`. Shard statistics are merged in index order,
    so the result does not depend on ``workers``.
    """
    samples = int(samples)
    if samples < MIN_SAMPLES:
        raise DomainError(f"at least {MIN_SAMPLES} samples required, got {samples}")
    seed = _check_seed(seed)
    ns = [int(n) for n in ns]
    if any(n < 0 for n in ns):
        raise DomainError("n must be nonnegative")
    sizes = [SHARD_SIZE] * (samples // SHARD_SIZE)
    if samples % SHARD_SIZE:
        sizes.append(samples % SHARD_SIZE)

    def run(index):
        return _shard_stats(spec, ns, seed, index, sizes[index])

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            shards = list(pool.map(run, range(len(sizes))))
    else:
        shards = [run(i) for i in range(len(sizes))]

    estimates = []
    for k, n in enumerate(ns):
        acc = shards[0][k]
        for shard in shards[1:]:
            acc = _merge(acc, shard[k])
        total, mean, m2 = acc
        stderr = math.sqrt(m2 / (total - 1) / total)
        estimates.append(OracleEstimate(mean, stderr, total, seed, n))
    return estimates


def mc_estimate(spec, n, samples, seed, workers=1):
    return mc_estimate_many(spec, [n], samples, seed, workers)[0]


# -- quadrature --------------------------------------------------------------


def _xlog(n, x):
    if n == 0:
        return 0.0
    return n * math.log(x) if x > 0.0 else -math.inf


def log_side_integral(spec, n, side):
    """log of the sign-restricted integral of |x|^n e^-x against the density.

    ``side="neg"`` gives log(Pr(X<0) E[A^n e^A]) and ``side="pos"`` gives
    log(Pr(X>=0) E[B^n e^-B]).
    """
    if side not in ("neg", "pos"):
        raise DomainError(f"side must be 'neg' or 'pos', got {side!r}")
    n = int(n)
    match spec:
        case AsymLaplace(lambda1=l1, lambda2=l2, p=p):
            if side == "neg":
                if p == 0.0:
                    return -math.inf
                if l1 <= 1.0:
                    return math.inf
                c, w = l1 - 1.0, math.log(p * l1)
            else:
                c, w = l2 + 1.0, math.log((1.0 - p) * l2)
            return log_integral_exp(
                lambda y: w + _xlog(n, y) - c * y,
                0.0,
                math.inf,
                peak=n / c,
                scale=math.sqrt(n + 1.0) / c,
            )
        case GaussianMix(mu=mu, sigma2=s2):
            s = math.sqrt(s2)
            norm = -math.log(s * math.sqrt(2.0 * math.pi))
            # y = |x|; the sign of the exponential weight and the mean flip on the left
            m, e = (-mu, 1.0) if side == "neg" else (mu, -1.0)
            lin = m - s2 if side == "pos" else -(mu - s2)
            peak = 0.5 * (lin + math.sqrt(lin * lin + 4.0 * n * s2))
            return log_integral_exp(
                lambda y: norm + _xlog(n, y) + e * y - (y - m) ** 2 / (2.0 * s2),
                0.0,
                math.inf,
                peak=peak,
                scale=s,
            )
        case TwoPoint():
            raise UnsupportedFamilyError("two-point terms are evaluated exactly at the atoms")
        case ExtremeStable():
            raise UnsupportedFamilyError("no closed-form density for the extreme stable family")
    raise TypeError(f"not a FamilySpec: {spec!r}")


def term_quad(spec, n, side, tol=1e-10):
    """E[A^n e^A] (``side="neg"``) or E[B^n e^-B] (``side="pos"``) by quadrature.

    ``tol`` is accepted for interface symmetry; the integration itself runs at
    near machine relative precision.
    """
    match spec:
        case GaussianMix(mu=mu, sigma2=s2):
            z = mu / math.sqrt(s2)
            log_prob = special.log_ndtr(-z) if side == "neg" else special.log_ndtr(z)
        case AsymLaplace(p=p):
            if side == "neg" and p == 0.0:
                raise DomainError("A is undefined when Pr(X<0) = 0")
            log_prob = math.log(p) if side == "neg" else math.log1p(-p)
        case _:
            return log_side_integral(spec, n, side)  # raises for unsupported families
    return math.exp(log_side_integral(spec, n, side) - float(log_prob))


def quad_estimate(spec, n, tol=1e-10):
    """f(n) = E[X^n e^-X] / n! by adaptive quadrature against the density."""
    if tol <= 0.0:
        raise DomainError("tol must be positive")
    lf = math.lgamma(int(n) + 1)
    neg = math.exp(log_side_integral(spec, n, "neg") - lf)
    pos = math.exp(log_side_integral(spec, n, "pos") - lf)
    return pos - neg if n % 2 == 1 else pos + neg
