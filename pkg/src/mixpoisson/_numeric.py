"""Small numerical helpers shared across modules."""

import math

import numpy as np
from scipy import integrate

__all__ = ["sec_half_pi", "is_unit_alpha", "log_integral_exp"]

# alpha values this close to 1 use the dedicated alpha = 1 formulas
ALPHA_SNAP = 1e-9


def is_unit_alpha(alpha):
    return abs(alpha - 1.0) <= ALPHA_SNAP


def sec_half_pi(alpha):
    """Return sec(pi * alpha / 2); the pole at alpha = 1 is rejected."""
    if is_unit_alpha(alpha):
        raise ValueError("sec(pi*alpha/2) has a pole at alpha = 1")
    return 1.0 / math.cos(0.5 * math.pi * alpha)


def _walk_out(g, start, step, level, limit):
    """Step away from ``start`` until ``g`` drops below ``level``."""
    x = start
    while g(x) > level:
        step *= 2.0
        x = start + step
        if abs(step) > limit:
            break
    return x


def log_integral_exp(g, lo, hi, peak, scale, cutoff=60.0, epsrel=1e-13):
    """Return log of the integral of exp(g(x)) over [lo, hi].

    ``g`` must be unimodal with its maximum at ``peak``; ``scale`` is a rough
    width used to start the search for the truncation points. The integrand
    is rescaled by exp(g(peak)) and truncated where it falls below
    exp(-cutoff) times its peak value.
    """
    peak = min(max(peak, lo), hi)
    gmax = g(peak)
    if not math.isfinite(gmax):
        return gmax
    level = gmax - cutoff
    scale = max(scale, 1e-8)
    left = lo if math.isfinite(lo) and g(lo) > level else None
    right = hi if math.isfinite(hi) and g(hi) > level else None
    if left is None:
        left = max(lo, _walk_out(g, peak, -scale, level, 1e12))
    if right is None:
        right = min(hi, _walk_out(g, peak, scale, level, 1e12))

    def f(x):
        return math.exp(g(x) - gmax)

    total = 0.0
    for a, b in ((left, peak), (peak, right)):
        if b > a:
            val, _ = integrate.quad(f, a, b, epsabs=0.0, epsrel=epsrel, limit=500)
            total += val
    if total <= 0.0:
        return -math.inf
    return gmax + math.log(total)
