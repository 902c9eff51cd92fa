"""Real-valued mixing distributions for mixed Poisson models.

Four families are supported. Each is an immutable dataclass; the union of
them is :data:`FamilySpec`.

``TwoPoint``
    Atom at ``-a`` with probability ``p`` and atom at ``b`` otherwise.
``AsymLaplace``
    With probability ``p`` the value is ``-Exp(lambda1)``, otherwise
    ``Exp(lambda2)``.
``GaussianMix``
    Normal with mean ``mu`` and variance ``sigma2``.
``ExtremeStable``
    Stable law with skewness fixed at 1, in the parameterization whose
    characteristic function carries the ``tan(pi*alpha/2)`` factor (Nolan's
    "1-parameterization"). Its bilateral Laplace transform is finite on
    ``t >= 0``.

The negative and nonnegative parts of a mixing law ``X`` are
``A = [-X | X < 0]`` and ``B = [X | X >= 0]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy import special

from ._numeric import is_unit_alpha, sec_half_pi
from .errors import DomainError, UnsupportedFamilyError

__all__ = [
    "TwoPoint",
    "AsymLaplace",
    "GaussianMix",
    "ExtremeStable",
    "FamilySpec",
    "Part",
    "Split",
    "TailDescriptor",
    "NOT_SUBWEIBULL",
    "laplace",
    "split",
    "term_neg",
    "term_pos",
    "log_term_neg",
    "log_term_pos",
    "sample_mixing",
    "estimate_p_neg",
    "tail_descriptor",
    "odds",
    "stable_location_bound",
]

TWO_OVER_PI = 2.0 / math.pi

# q_right value meaning "not q-subweibull for any q > 0"
NOT_SUBWEIBULL = 0.0


def _check_probability(p):
    if not (0.0 <= p < 1.0):
        raise DomainError(f"p must lie in [0, 1), got {p!r}")


def _check_positive(name, value):
    if not (value > 0.0 and math.isfinite(value)):
        raise DomainError(f"{name} must be a positive finite number, got {value!r}")


@dataclass(frozen=True)
class TwoPoint:
    a: float
    b: float
    p: float

    def __post_init__(self):
        _check_positive("a", self.a)
        _check_positive("b", self.b)
        _check_probability(self.p)


@dataclass(frozen=True)
class AsymLaplace:
    lambda1: float
    lambda2: float
    p: float

    def __post_init__(self):
        _check_positive("lambda1", self.lambda1)
        _check_positive("lambda2", self.lambda2)
        _check_probability(self.p)


@dataclass(frozen=True)
class GaussianMix:
    mu: float
    sigma2: float

    def __post_init__(self):
        if not math.isfinite(self.mu):
            raise DomainError(f"mu must be finite, got {self.mu!r}")
        _check_positive("sigma2", self.sigma2)

    @property
    def sigma(self):
        return math.sqrt(self.sigma2)


@dataclass(frozen=True)
class ExtremeStable:
    alpha: float
    sigma: float
    delta: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.alpha <= 2.0):
            raise DomainError(f"alpha must lie in (0, 2], got {self.alpha!r}")
        if not math.isfinite(self.delta):
            raise DomainError(f"delta must be finite, got {self.delta!r}")
        if self.unit:
            if not (self.sigma >= 0.0 and math.isfinite(self.sigma)):
                raise DomainError(f"sigma must be >= 0 when alpha = 1, got {self.sigma!r}")
        else:
            _check_positive("sigma", self.sigma)

    @property
    def unit(self):
        """True when alpha is treated as exactly 1."""
        return is_unit_alpha(self.alpha)

    @property
    def beta(self):
        return 1.0


FamilySpec = Union[TwoPoint, AsymLaplace, GaussianMix, ExtremeStable]


def odds(spec):
    """Odds p/(1-p) of the negative component, or None if not closed-form."""
    if isinstance(spec, (TwoPoint, AsymLaplace)):
        return spec.p / (1.0 - spec.p)
    return None


def stable_location_bound(alpha, sigma):
    """Smallest location for which the extreme stable law is admissible."""
    if is_unit_alpha(alpha):
        return sigma * TWO_OVER_PI
    return -alpha * sec_half_pi(alpha) * sigma**alpha


# -- Laplace transform -------------------------------------------------------


def laplace(spec, t):
    """Bilateral Laplace transform E[exp(-t X)] for ``t >= 0``."""
    t = float(t)
    if not t >= 0.0:
        raise DomainError(f"t must be >= 0, got {t!r}")
    if t == 0.0:
        return 1.0
    match spec:
        case TwoPoint(a=a, b=b, p=p):
            return (1.0 - p) * math.exp(-t * b) + p * math.exp(t * a)
        case AsymLaplace(lambda1=l1, lambda2=l2, p=p):
            if t >= l1:
                raise DomainError(f"t must be < lambda1 = {l1!r}, got {t!r}")
            return (1.0 - p) * l2 / (l2 + t) + p * l1 / (l1 - t)
        case GaussianMix(mu=mu, sigma2=s2):
            return math.exp(-t * mu + 0.5 * t * t * s2)
        case ExtremeStable():
            return math.exp(_stable_log_laplace(spec, t))
    raise TypeError(f"not a FamilySpec: {spec!r}")


def _stable_log_laplace(spec, t):
    if t == 0.0:
        return 0.0
    if spec.unit:
        return -t * spec.delta + spec.sigma * TWO_OVER_PI * t * math.log(t)
    return -t * spec.delta - sec_half_pi(spec.alpha) * spec.sigma**spec.alpha * t**spec.alpha


# -- sign decomposition ------------------------------------------------------


@dataclass(frozen=True)
class Part:
    """Description of a nonnegative random variable.

    ``kind`` is one of ``"atom"``, ``"exponential"``, ``"truncated-normal"``,
    ``"none"`` (the part has zero probability) or ``"unknown"``.
    """

    kind: str
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Split:
    """``X`` written as a mixture of ``-A`` (weight ``p_neg``) and ``B``.

    ``p_neg`` is None when it has no closed form; use :func:`estimate_p_neg`.
    """

    p_neg: float | None
    neg: Part
    pos: Part


def split(spec):
    match spec:
        case TwoPoint(a=a, b=b, p=p):
            return Split(p, Part("atom", {"at": a}), Part("atom", {"at": b}))
        case AsymLaplace(lambda1=l1, lambda2=l2, p=p):
            return Split(p, Part("exponential", {"rate": l1}), Part("exponential", {"rate": l2}))
        case GaussianMix(mu=mu, sigma2=s2):
            s = math.sqrt(s2)
            return Split(
                float(special.ndtr(-mu / s)),
                Part("truncated-normal", {"mu": -mu, "sigma": s, "lower": 0.0}),
                Part("truncated-normal", {"mu": mu, "sigma": s, "lower": 0.0}),
            )
        case ExtremeStable():
            if spec.alpha < 1.0 and not spec.unit and spec.delta >= 0.0:
                # support is [delta, inf)
                return Split(0.0, Part("none"), Part("unknown"))
            return Split(None, Part("unknown"), Part("unknown"))
    raise TypeError(f"not a FamilySpec: {spec!r}")


# -- closed-form terms E[A^n e^A] and E[B^n e^-B] ----------------------------


def log_term_neg(spec, n):
    """log E[A^n exp(A)] in closed form."""
    n = _check_order(n)
    match spec:
        case TwoPoint(a=a):
            return n * math.log(a) + a
        case AsymLaplace(lambda1=l1):
            if l1 <= 1.0:
                raise DomainError(f"E[A^n e^A] is infinite for lambda1 = {l1!r} <= 1")
            return math.log(l1) + math.lgamma(n + 1) - (n + 1) * math.log(l1 - 1.0)
    raise UnsupportedFamilyError(
        f"no closed form for {type(spec).__name__}; use mixpoisson.oracle.term_quad"
    )


def log_term_pos(spec, n):
    """log E[B^n exp(-B)] in closed form."""
    n = _check_order(n)
    match spec:
        case TwoPoint(b=b):
            return n * math.log(b) - b
        case AsymLaplace(lambda2=l2):
            return math.log(l2) + math.lgamma(n + 1) - (n + 1) * math.log(l2 + 1.0)
    raise UnsupportedFamilyError(
        f"no closed form for {type(spec).__name__}; use mixpoisson.oracle.term_quad"
    )


def term_neg(spec, n):
    return math.exp(log_term_neg(spec, n))


def term_pos(spec, n):
    return math.exp(log_term_pos(spec, n))


def _check_order(n):
    if isinstance(n, bool) or int(n) != n or n < 0:
        raise DomainError(f"n must be a nonnegative integer, got {n!r}")
    return int(n)


# -- sampling ----------------------------------------------------------------


def sample_mixing(spec, seed, count):
    """Draw ``count`` values of the mixing variable.

    ``seed`` is an integer or a :class:`numpy.random.SeedSequence`; the output
    is a deterministic function of ``(spec, seed, count)``.
    """
    count = int(count)
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count!r}")
    rng = np.random.default_rng(seed)
    match spec:
        case TwoPoint(a=a, b=b, p=p):
            u = rng.random(count)
            return np.where(u < p, -a, b)
        case AsymLaplace(lambda1=l1, lambda2=l2, p=p):
            u = rng.random(count)
            e = rng.standard_exponential(count)
            return np.where(u < p, -e / l1, e / l2)
        case GaussianMix(mu=mu, sigma2=s2):
            return mu + math.sqrt(s2) * rng.standard_normal(count)
        case ExtremeStable():
            return _sample_stable(spec, rng, count)
    raise TypeError(f"not a FamilySpec: {spec!r}")


def _sample_stable(spec, rng, count):
    # Chambers-Mallows-Stuck with beta = 1, in the tan(pi*alpha/2) parameterization
    v = rng.uniform(-0.5 * math.pi, 0.5 * math.pi, count)
    w = rng.standard_exponential(count)
    alpha, sigma, delta = spec.alpha, spec.sigma, spec.delta
    if spec.unit:
        half_pi_v = 0.5 * math.pi + v
        x = TWO_OVER_PI * (
            half_pi_v * np.tan(v) - np.log(0.5 * math.pi * w * np.cos(v) / half_pi_v)
        )
        shift = TWO_OVER_PI * sigma * math.log(sigma) if sigma > 0.0 else 0.0
        return sigma * x + shift + delta
    zeta = math.tan(0.5 * math.pi * alpha)
    b = math.atan(zeta) / alpha
    s = (1.0 + zeta * zeta) ** (0.5 / alpha)
    avb = alpha * (v + b)
    x = (
        s
        * np.sin(avb)
        / np.cos(v) ** (1.0 / alpha)
        * (np.cos(v - avb) / w) ** ((1.0 - alpha) / alpha)
    )
    return sigma * x + delta


def estimate_p_neg(spec, seed, count):
    """Monte Carlo estimate of Pr(X < 0) with its standard error."""
    x = sample_mixing(spec, seed, count)
    frac = float(np.mean(x < 0.0))
    return frac, math.sqrt(frac * (1.0 - frac) / count)


# -- tail metadata -----------------------------------------------------------


@dataclass(frozen=True)
class TailDescriptor:
    """Tail classes of the negative part ``A`` and nonnegative part ``B``.

    ``q_left`` and ``q_right`` are subweibull indices (``math.inf`` for
    bounded parts). ``q_right == NOT_SUBWEIBULL`` marks a right tail that is
    not q-subweibull for any q > 0. ``p_neg``/``p_pos`` of None mean the
    probability is positive but has no closed form.
    """

    q_left: float
    q_left_strict: bool
    q_right: float
    q_right_strict: bool
    e_a_finite: bool
    e2a_finite: bool
    p_neg: float | None
    p_pos: float | None

    def __post_init__(self):
        if self.p_neg == 0.0 and self.q_left != math.inf:
            raise ValueError("q_left must be inf when p_neg = 0")
        if self.q_left <= 0.0:
            raise ValueError("q_left must be positive")
        if self.q_right < 0.0:
            raise ValueError("q_right must be nonnegative")


def tail_descriptor(spec):
    inf = math.inf
    match spec:
        case TwoPoint(p=p):
            return TailDescriptor(inf, True, inf, True, True, True, p, 1.0 - p)
        case AsymLaplace(lambda1=l1, p=p):
            q_left = inf if p == 0.0 else 1.0
            return TailDescriptor(q_left, p == 0.0, 1.0, False, l1 > 1.0, l1 > 2.0, p, 1.0 - p)
        case GaussianMix(mu=mu, sigma2=s2):
            p_neg = float(special.ndtr(-mu / math.sqrt(s2)))
            return TailDescriptor(2.0, True, 2.0, True, True, True, p_neg, 1.0 - p_neg)
        case ExtremeStable(alpha=alpha, delta=delta):
            if alpha == 2.0:
                return TailDescriptor(2.0, True, 2.0, True, True, True, None, None)
            if spec.unit:
                # left tail decays double-exponentially
                return TailDescriptor(inf, True, NOT_SUBWEIBULL, False, True, True, None, None)
            if alpha < 1.0:
                p_neg = 0.0 if delta >= 0.0 else None
                return TailDescriptor(inf, True, NOT_SUBWEIBULL, False, True, True, p_neg, None)
            # density of A decays like exp(-c x^q); not strict at q itself
            q = alpha / (alpha - 1.0)
            return TailDescriptor(q, False, NOT_SUBWEIBULL, False, True, True, None, None)
    raise TypeError(f"not a FamilySpec: {spec!r}")
