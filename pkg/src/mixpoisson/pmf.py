"""Mixed Poisson probabilities.

Two-point and asymmetric Laplace mixing laws have closed-form PMFs. For the
Gaussian (Hermite) and extreme stable families the PGF satisfies
``G'(z) = G(z) r(z)``, which gives the O(n^2) recursion

    p[n+1] = sum(rho[j] * p[n-j] for j in 0..n) / (n+1)

on the scaled sequences ``p[n] = G^(n)(0)/n!`` and ``rho[j] = r^(j)(0)/j!``.
All ``rho[j]`` are nonnegative for valid parameters, so the recursion has no
cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import families as fam
from ._numeric import sec_half_pi
from .errors import (
    DomainError,
    InsufficientMassError,
    InvalidSpecError,
    NegativeProbabilityError,
    UnsupportedFamilyError,
)
from .families import AsymLaplace, ExtremeStable, GaussianMix, TwoPoint
from .validity import check_family

__all__ = [
    "NEG_TOL",
    "DEFAULT_EPSILON",
    "DEFAULT_CAP",
    "RecursionState",
    "PmfTable",
    "pmf_closed",
    "pgf_eval",
    "pgf_log_derivative",
    "rho_coefficients",
    "pgf_coeffs",
    "pmf_table",
    "cdf",
    "quantile",
    "sample_count",
]

NEG_TOL = 1e-12
DEFAULT_EPSILON = 1e-10
DEFAULT_CAP = 100_000
MASS_REACHED = "MassReached"
CAP_REACHED = "CapReached"


def _require_valid(spec):
    report = check_family(spec)
    if not report.ok:
        raise InvalidSpecError(f"{spec!r} is not a valid mixing law: {report.detail}", report)


def _check_index(n):
    if isinstance(n, bool) or int(n) != n or n < 0:
        raise DomainError(f"n must be a nonnegative integer, got {n!r}")
    return int(n)


def pmf_closed(spec, n, check=True):
    """Closed-form f(n) for the two-point and asymmetric Laplace families.

    Each signed component is evaluated in log space and the two are combined
    with a single subtraction.
    """
    n = _check_index(n)
    if check:
        _require_valid(spec)
    lf = math.lgamma(n + 1)
    match spec:
        case TwoPoint(a=a, b=b, p=p):
            pos = math.exp(math.log1p(-p) + n * math.log(b) - b - lf)
            neg = math.exp(math.log(p) + n * math.log(a) + a - lf) if p > 0.0 else 0.0
        case AsymLaplace(lambda1=l1, lambda2=l2, p=p):
            pos = math.exp(math.log1p(-p) + math.log(l2) - (n + 1) * math.log1p(l2))
            if p == 0.0:
                neg = 0.0
            elif l1 <= 1.0:
                neg = math.inf
            else:
                neg = math.exp(math.log(p) + math.log(l1) - (n + 1) * math.log(l1 - 1.0))
        case _:
            raise UnsupportedFamilyError(
                f"no closed-form PMF for {type(spec).__name__}; use pgf_coeffs"
            )
    return pos - neg if n % 2 == 1 else pos + neg


def pgf_eval(spec, z):
    """G(z) = L(1 - z) for z in [0, 1]."""
    z = float(z)
    if not (0.0 <= z <= 1.0):
        raise DomainError(f"z must lie in [0, 1], got {z!r}")
    return fam.laplace(spec, 1.0 - z)


def pgf_log_derivative(spec, z):
    """r(z) = G'(z) / G(z) for z in [0, 1)."""
    z = float(z)
    if not (0.0 <= z < 1.0):
        raise DomainError(f"z must lie in [0, 1), got {z!r}")
    t = 1.0 - z
    match spec:
        case GaussianMix(mu=mu, sigma2=s2):
            return mu - s2 * t
        case ExtremeStable(alpha=alpha, sigma=sigma, delta=delta):
            if spec.unit:
                return delta + sigma * fam.TWO_OVER_PI * (-1.0 - math.log(t))
            return delta + alpha * sec_half_pi(alpha) * sigma**alpha * t ** (alpha - 1.0)
        case TwoPoint(a=a, b=b, p=p):
            num = (1.0 - p) * b * math.exp(-t * b) - p * a * math.exp(t * a)
            return num / fam.laplace(spec, t)
        case AsymLaplace(lambda1=l1, lambda2=l2, p=p):
            num = (1.0 - p) * l2 / (l2 + t) ** 2 - p * l1 / (l1 - t) ** 2
            return num / fam.laplace(spec, t)
    raise TypeError(f"not a FamilySpec: {spec!r}")


def rho_coefficients(spec, count):
    """First ``count`` Taylor coefficients of r(z) at 0."""
    rho = np.zeros(count)
    if count == 0:
        return rho
    match spec:
        case GaussianMix(mu=mu, sigma2=s2):
            rho[0] = mu - s2
            if count > 1:
                rho[1] = s2
        case ExtremeStable(alpha=alpha, sigma=sigma, delta=delta):
            if spec.unit:
                c = sigma * fam.TWO_OVER_PI
                rho[0] = delta - c
                rho[1:] = c / np.arange(1, count)
            else:
                s = sec_half_pi(alpha) * sigma**alpha
                rho[0] = delta + alpha * s
                if count > 1:
                    k = np.arange(1, count - 1)
                    steps = np.concatenate(([alpha * (1.0 - alpha) * s], (k + 1 - alpha) / (k + 1)))
                    rho[1:] = np.cumprod(steps)
        case _:
            raise UnsupportedFamilyError(
                f"no PGF recursion for {type(spec).__name__}; use pmf_closed"
            )
    return rho


@dataclass(frozen=True)
class RecursionState:
    rho: np.ndarray
    p: np.ndarray


class _Recursion:
    """Incremental evaluation of the scaled PGF-coefficient recursion."""

    def __init__(self, spec, p0):
        self.spec = spec
        self.cap = 0
        self.rho_rev = np.zeros(0)
        self.p = np.zeros(0)
        self.size = 0
        self._grow(1024)
        self.p[0] = p0
        self.size = 1

    def _grow(self, cap):
        rho = rho_coefficients(self.spec, cap)
        self.rho_rev = rho[::-1].copy()
        p = np.zeros(cap)
        p[: self.size] = self.p[: self.size]
        self.p, self.cap = p, cap

    def step(self):
        """Compute and return the next coefficient."""
        n = self.size - 1
        if self.size == self.cap:
            self._grow(2 * self.cap)
        cap = self.cap
        value = float(np.dot(self.rho_rev[cap - 1 - n:], self.p[: n + 1])) / (n + 1)
        self.p[self.size] = value
        self.size += 1
        return value

    def result(self):
        p = self.p[: self.size].copy()
        return RecursionState(rho_coefficients(self.spec, self.size), p)


def pgf_coeffs(spec, n_max, check=True):
    """PGF coefficients p[0..n_max] by the scaled recursion."""
    n_max = _check_index(n_max)
    if not isinstance(spec, (GaussianMix, ExtremeStable)):
        raise UnsupportedFamilyError(
            f"no PGF recursion for {type(spec).__name__}; use pmf_closed"
        )
    if check:
        _require_valid(spec)
    rec = _Recursion(spec, pgf_eval(spec, 0.0))
    for _ in range(n_max):
        rec.step()
    return rec.result()


@dataclass(frozen=True)
class PmfTable:
    """Probabilities f(0..N) of a mixed Poisson law, truncated.

    ``accumulated`` is the compensated sum of ``probs`` and equals
    ``cumulative[-1]``; ``tail_gap`` is ``1 - accumulated``.
    """

    probs: np.ndarray
    cumulative: np.ndarray
    accumulated: float
    tail_gap: float
    family: object
    truncation: str
    epsilon: float
    n_cap: int

    @property
    def n_max(self):
        return len(self.probs) - 1


def _check_negative(n, value):
    if value < -NEG_TOL:
        raise NegativeProbabilityError(n, value)


def pmf_table(spec, epsilon=DEFAULT_EPSILON, n_cap=DEFAULT_CAP, check=True):
    """Tabulate f(n) until the mass reaches 1 - epsilon or n reaches n_cap."""
    if not (0.0 < epsilon < 1.0):
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    n_cap = int(n_cap)
    if n_cap < 1:
        raise DomainError(f"n_cap must be >= 1, got {n_cap!r}")
    if check:
        _require_valid(spec)

    target = 1.0 - epsilon
    s = c = 0.0
    probs = []
    cumulative = []

    if isinstance(spec, (TwoPoint, AsymLaplace)):
        def next_prob(n):
            return pmf_closed(spec, n, check=False)
    else:
        rec = _Recursion(spec, pgf_eval(spec, 0.0))

        def next_prob(n):
            return rec.p[0] if n == 0 else rec.step()

    reason = CAP_REACHED
    for n in range(n_cap + 1):
        v = next_prob(n)
        _check_negative(n, v)
        probs.append(v)
        t = s + v
        c += (s - t) + v if abs(s) >= abs(v) else (v - t) + s
        s = t
        cumulative.append(s + c)
        if s + c >= target:
            reason = MASS_REACHED
            break

    probs = np.array(probs)
    cumulative = np.array(cumulative)
    probs.flags.writeable = False
    cumulative.flags.writeable = False
    acc = float(cumulative[-1])
    return PmfTable(probs, cumulative, acc, 1.0 - acc, spec, reason, epsilon, n_cap)


def cdf(table, n):
    """Pr(Y <= n); a lower bound equal to ``accumulated`` beyond the table."""
    if n < 0:
        return 0.0
    if n > table.n_max:
        return table.accumulated
    return float(table.cumulative[int(n)])


def _covering(table, u_max):
    """Return a table whose mass covers ``u_max``, extending when possible."""
    if u_max <= table.accumulated:
        return table
    if table.truncation == MASS_REACHED and u_max < 1.0:
        wider = pmf_table(table.family, epsilon=min(table.epsilon, 0.5 * (1.0 - u_max)),
                          n_cap=table.n_cap, check=False)
        if u_max <= wider.accumulated:
            return wider
    raise InsufficientMassError(
        f"u = {u_max!r} exceeds the tabulated mass {table.accumulated!r} "
        f"({table.truncation} at n = {table.n_max})"
    )


def quantile(table, u):
    """Least n with cdf(n) >= u."""
    u = float(u)
    if not (0.0 < u < 1.0):
        raise DomainError(f"u must lie in (0, 1), got {u!r}")
    table = _covering(table, u)
    return int(np.searchsorted(table.cumulative, u, side="left"))


def sample_count(table, seed, count):
    """Draw counts by inversion of the tabulated CDF."""
    count = int(count)
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count!r}")
    u = np.random.default_rng(seed).random(count)
    table = _covering(table, float(u.max()))
    idx = np.searchsorted(table.cumulative, u, side="left")
    return np.minimum(idx, table.n_max).astype(np.int64)
