"""Existence checks for mixed Poisson families with real-valued mixing laws.

Three levels of checking are available:

* :func:`check_family` applies the exact family-specific conditions and
  returns ``Valid`` or ``Invalid``.
* :func:`check_sufficient_numeric` checks the generic odd-moment inequality
  ``Pr(X<0) E[A^n e^A] <= Pr(X>=0) E[B^n e^-B]`` for odd ``n`` up to a
  horizon, plus finiteness of ``E[exp(2A)]``. Passing yields
  ``VerifiedUpTo(N)``, never ``Valid``.
* :func:`check_necessary` screens a :class:`TailDescriptor` against the
  necessary tail conditions.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from enum import Enum

from . import families as fam
from .families import AsymLaplace, ExtremeStable, GaussianMix, TwoPoint
from .errors import DomainError, UnsupportedFamilyError
from .oracle import log_side_integral

__all__ = [
    "Verdict",
    "Witness",
    "ValidityReport",
    "NecessityReport",
    "check_family",
    "check_sufficient_numeric",
    "check_necessary",
    "DEFAULT_TOL",
]

DEFAULT_TOL = 1e-12


class Verdict(str, Enum):
    VALID = "Valid"
    INVALID = "Invalid"
    VERIFIED_UP_TO = "VerifiedUpTo"


@dataclass(frozen=True)
class Witness:
    """A violated condition.

    ``n`` is the first odd index whose inequality fails (or the index whose
    probability is infinite), or None when a moment condition fails
    outright. ``value`` is the candidate probability f(n) at that index.
    """

    n: int | None
    value: float
    constraint: str


@dataclass(frozen=True)
class ValidityReport:
    verdict: Verdict
    rule: str
    witness: Witness | None = None
    phi: float | None = None
    horizon: int | None = None
    monotone_trend: bool | None = None
    detail: str = ""

    def __post_init__(self):
        if self.verdict is Verdict.INVALID and self.witness is None:
            raise ValueError("an Invalid report needs a witness")
        if self.verdict is Verdict.VERIFIED_UP_TO and self.horizon is None:
            raise ValueError("a VerifiedUpTo report needs a horizon")

    @property
    def ok(self):
        return self.verdict is not Verdict.INVALID

    def to_dict(self):
        d = asdict(self)
        d["verdict"] = self.verdict.value
        return d


@dataclass(frozen=True)
class NecessityReport:
    cond1: str
    cond2: str
    cond3: str
    overall: str

    def to_dict(self):
        return asdict(self)


# -- family rules ------------------------------------------------------------


def _first_odd_above(x):
    """Smallest odd integer strictly greater than ``x`` (and at least 1)."""
    n = max(1, math.floor(x) + 1)
    return n if n % 2 == 1 else n + 1


def _raw_pmf(spec, n):
    from .pmf import pmf_closed

    return pmf_closed(spec, n, check=False)


def _valid(rule, phi=None, detail=""):
    return ValidityReport(Verdict.VALID, rule, phi=phi, detail=detail)


def _invalid(rule, n, value, constraint, phi=None, detail=""):
    return ValidityReport(Verdict.INVALID, rule, Witness(n, value, constraint), phi=phi, detail=detail)


def check_family(spec, tol=DEFAULT_TOL):
    """Decide existence of the mixed Poisson law with the family's exact rule.

    Equality on every boundary counts as valid; ``tol`` is the absolute slack
    allowed on each inequality residual.
    """
    match spec:
        case TwoPoint():
            return _check_two_point(spec, tol)
        case AsymLaplace():
            return _check_asym_laplace(spec, tol)
        case GaussianMix(mu=mu, sigma2=s2):
            if mu - s2 >= -tol:
                return _valid("hermite", detail="mu >= sigma2")
            a1, a2 = mu - s2, 0.5 * s2
            return _invalid("hermite", 1, a1 * math.exp(-a1 - a2), "mu >= sigma2",
                            detail=f"mu - sigma2 = {mu - s2!r} < 0")
        case ExtremeStable(alpha=alpha, sigma=sigma, delta=delta):
            if alpha < 1.0 and not spec.unit and delta >= 0.0:
                return _valid("nonnegative-support", phi=0.0)
            bound = fam.stable_location_bound(alpha, sigma)
            if delta - bound >= -tol:
                return _valid("stable-location", detail=f"delta >= {bound!r}")
            p0 = fam.laplace(spec, 1.0)
            return _invalid("stable-location", 1, (delta - bound) * p0, "delta >= location bound",
                            detail=f"delta = {delta!r} < {bound!r}")
    raise TypeError(f"not a FamilySpec: {spec!r}")


def _check_two_point(spec, tol):
    a, b, p = spec.a, spec.b, spec.p
    if p == 0.0:
        return _valid("nonnegative-support", phi=0.0)
    phi = p / (1.0 - p)
    h1 = (b / a) * math.exp(-a - b)
    if h1 - phi < -tol:
        return _invalid("two-point", 1, _raw_pmf(spec, 1), "(b/a) exp(-a-b) >= phi", phi,
                        detail=f"(b/a) exp(-a-b) = {h1!r} < phi")
    if b - a >= -tol:
        return _valid("two-point", phi, detail="b >= a and (b/a) exp(-a-b) >= phi")
    # b < a: (b/a)^n exp(-a-b) decreases to 0 and eventually drops below phi
    log_ratio = math.log(b / a)
    n = _first_odd_above((math.log(phi) + a + b) / log_ratio)
    while n > 1 and (n - 2) * log_ratio - a - b < math.log(phi):
        n -= 2
    while n * log_ratio - a - b >= math.log(phi):
        n += 2
    return _invalid("two-point", n, _raw_pmf(spec, n), "b >= a", phi,
                    detail=f"b < a makes the odd-n inequality fail first at n={n}")


def _check_asym_laplace(spec, tol):
    l1, l2, p = spec.lambda1, spec.lambda2, spec.p
    if p == 0.0:
        return _valid("nonnegative-support", phi=0.0)
    phi = p / (1.0 - p)
    if l1 <= 1.0:
        return _invalid("asym-laplace", 0, math.inf, "E[exp(A)] < inf", phi,
                        detail="lambda1 <= 1 makes Pr(Y=0) infinite")
    ratio = (l1 - 1.0) / (l2 + 1.0)
    bound = (l2 / l1) * ratio * ratio
    if bound - phi < -tol:
        return _invalid("asym-laplace", 1, _raw_pmf(spec, 1),
                        "phi <= (l2/l1)((l1-1)/(l2+1))^2", phi,
                        detail=f"phi = {phi!r} > {bound!r}")
    if l1 - (l2 + 2.0) >= -tol:
        return _valid("asym-laplace", phi, detail="lambda1 >= lambda2 + 2 and odds bound holds")
    # ratio < 1: (l2/l1) ratio^(n+1) decreases to 0
    log_r = math.log(ratio)
    target = math.log(phi * l1 / l2)
    n = _first_odd_above(target / log_r - 1.0)
    while n > 1 and (n - 1) * log_r < target:
        n -= 2
    while (n + 1) * log_r >= target:
        n += 2
    return _invalid("asym-laplace", n, _raw_pmf(spec, n), "lambda1 >= lambda2 + 2", phi,
                    detail=f"lambda1 < lambda2 + 2 makes the odd-n inequality fail first at n={n}")


# -- generic sufficient check ------------------------------------------------


def _log_sides(spec, n):
    """(log Pr(X<0) E[A^n e^A], log Pr(X>=0) E[B^n e^-B])."""
    match spec:
        case TwoPoint(p=p) | AsymLaplace(p=p):
            return (math.log(p) + fam.log_term_neg(spec, n),
                    math.log1p(-p) + fam.log_term_pos(spec, n))
        case GaussianMix():
            return log_side_integral(spec, n, "neg"), log_side_integral(spec, n, "pos")
    raise UnsupportedFamilyError(
        f"no term evaluation available for {type(spec).__name__}"
    )


def check_sufficient_numeric(spec, odd_max=99, tol=DEFAULT_TOL):
    """Check the odd-moment sufficient condition for n = 1, 3, ..., odd_max.

    A pass gives ``VerifiedUpTo(odd_max)``. The report's ``monotone_trend``
    records whether the ratio of positive to negative sides was
    nondecreasing over the checked range; it is never promoted to a proof.
    ``tol`` is a relative slack on each comparison.
    """
    odd_max = int(odd_max)
    if odd_max < 1 or odd_max % 2 == 0:
        raise DomainError(f"odd_max must be an odd integer >= 1, got {odd_max!r}")
    rule = "sufficient-numeric"
    desc = fam.tail_descriptor(spec)
    phi = fam.odds(spec)
    if desc.p_neg == 0.0:
        return ValidityReport(Verdict.VERIFIED_UP_TO, rule, phi=phi, horizon=odd_max,
                              monotone_trend=True, detail="no negative mass")
    if isinstance(spec, AsymLaplace) and spec.lambda1 <= 1.0:
        return _invalid(rule, 0, math.inf, "E[exp(A)] < inf", phi)

    log_ratios = []
    for n in range(1, odd_max + 1, 2):
        lneg, lpos = _log_sides(spec, n)
        if lneg - lpos > math.log1p(tol):
            lf = math.lgamma(n + 1)
            value = math.exp(lpos - lf) - math.exp(lneg - lf)
            return _invalid(rule, n, value, "odd-moment inequality", phi,
                            detail=f"negative side exceeds positive side at n={n}")
        log_ratios.append(lpos - lneg)

    if not desc.e2a_finite:
        return _invalid(rule, None, math.inf, "E[exp(2A)] < inf", phi,
                        detail="sufficient condition unmet; existence is not established")
    monotone = all(b >= a - 1e-12 * max(1.0, abs(a)) for a, b in zip(log_ratios, log_ratios[1:]))
    return ValidityReport(Verdict.VERIFIED_UP_TO, rule, phi=phi, horizon=odd_max,
                          monotone_trend=monotone)


# -- necessary conditions ----------------------------------------------------


def check_necessary(desc):
    """Screen tail metadata against the necessary existence conditions."""
    has_neg = desc.p_neg is None or desc.p_neg > 0.0
    has_pos = desc.p_pos is None or desc.p_pos > 0.0

    cond1 = "pass" if (not has_neg or has_pos) else "fail"
    cond2 = "pass" if (not has_neg or (desc.q_left >= 1.0 and desc.e_a_finite)) else "fail"
    if not has_neg or desc.q_right <= 1.0:
        # B is not q-subweibull for any q > 1; the q = 1 case is covered by cond2
        cond3 = "vacuous"
    elif desc.q_left > desc.q_right:
        cond3 = "pass"
    elif desc.q_left == desc.q_right:
        cond3 = "pass" if (desc.q_left_strict or not desc.q_right_strict) else "fail"
    else:
        cond3 = "fail"
    overall = "fail" if "fail" in (cond1, cond2, cond3) else "pass"
    return NecessityReport(cond1, cond2, cond3, overall)
