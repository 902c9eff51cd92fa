"""Acceptance criteria, one test per criterion.

Each test times itself, checks its stated runtime budget, and records a
PASS/FAIL line that is printed immediately and again in the terminal summary.
"""

import contextlib
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES, FIG1, FIG2, HERMITE, STABLE_HERMITE, stable_at_bound
from mixpoisson.errors import NegativeProbabilityError
from mixpoisson.families import AsymLaplace, ExtremeStable, GaussianMix, TwoPoint
from mixpoisson.oracle import mc_estimate_many, quad_estimate
from mixpoisson.pmf import (
    CAP_REACHED,
    MASS_REACHED,
    NEG_TOL,
    pgf_coeffs,
    pgf_eval,
    pgf_log_derivative,
    pmf_closed,
    pmf_table,
)
from mixpoisson.validity import Verdict, check_family


@contextlib.contextmanager
def criterion(number, title, budget):
    start = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        within = elapsed < budget
        status = "PASS" if ok and within else "FAIL"
        line = f"[{status}] criterion {number}: {title} ({elapsed:.2f}s, budget {budget:g}s)"
        ACCEPTANCE_LINES.append(line)
        print(line)
    assert within, f"criterion {number} took {elapsed:.2f}s, budget {budget}s"


def test_criterion_1_figure_parameter_validity():
    with criterion(1, "figure-parameter validity and boundary flips", 1.0):
        assert check_family(FIG1).verdict is Verdict.VALID
        assert check_family(FIG2).verdict is Verdict.VALID
        # boundaries: p* = phi*/(1+phi*) with phi* = exp(-4) and (0.3/2.3)(1.3/1.3)^2
        for spec, p_star in ((FIG1, 0.017986209962091558), (FIG2, 0.11538461538461539)):
            for bump in (1e-6, 1e-3, 0.01):
                cls = type(spec)
                fields = {k: getattr(spec, k) for k in spec.__dataclass_fields__}
                fields["p"] = p_star + bump
                report = check_family(cls(**fields))
                assert report.verdict is Verdict.INVALID
                assert report.witness.n == 1
            fields["p"] = p_star
            assert check_family(cls(**fields)).ok


def test_criterion_2_figure_one_multimodality():
    with criterion(2, "figure 1 multimodality f(0) > f(1) < f(2)", 1.0):
        f = [pmf_closed(FIG1, n) for n in range(3)]
        direct = [
            0.991 * math.exp(-2) + 0.009 * math.exp(2),
            0.991 * 2 * math.exp(-2) - 0.009 * 2 * math.exp(2),
            0.991 * 2 * math.exp(-2) + 0.009 * 2 * math.exp(2),
        ]
        for got, want, frozen in zip(f, direct, (0.2006188, 0.1352315, 0.4012375)):
            assert abs(got - want) <= 1e-12
            assert abs(got - frozen) <= 5e-8
        assert f[0] > f[1] < f[2]


def test_criterion_3_hermite_equals_stable_alpha_two():
    with criterion(3, "Hermite equals extreme stable at alpha = 2", 1.0):
        a = pgf_coeffs(STABLE_HERMITE, 50).p
        b = pgf_coeffs(HERMITE, 50).p
        assert np.all(np.abs(a - b) <= 1e-12 * np.abs(b))
        sigma = math.sqrt(0.5)
        for k in range(50):
            delta = 1.0 + (k - 25) / 25  # includes the boundary delta = 1 = sigma_H^2
            stable_ok = check_family(ExtremeStable(2.0, sigma, delta)).ok
            hermite_ok = check_family(GaussianMix(delta, 2 * sigma**2)).ok
            assert stable_ok == hermite_ok == (delta >= 1.0)


NORMALIZATION_SPECS = [
    (FIG1, False),
    (FIG2, False),
    (HERMITE, False),
    (STABLE_HERMITE, False),
    (stable_at_bound(0.5), True),
    (stable_at_bound(1.0), True),
    (stable_at_bound(1.5), True),
]


def test_criterion_4_normalization():
    with criterion(4, "normalization or reported tail gap", 30.0):
        for spec, power_law in NORMALIZATION_SPECS:
            t = pmf_table(spec)
            if power_law:
                assert t.truncation == CAP_REACHED, spec
                assert t.tail_gap > 0, spec
            else:
                assert t.truncation == MASS_REACHED, spec
                assert abs(1 - t.accumulated) <= 1e-10, spec


ORACLE_SPECS = [FIG1, FIG2, HERMITE, stable_at_bound(0.5, margin=0.5),
                ExtremeStable(0.5, 1.0, 0.0), stable_at_bound(1.0), stable_at_bound(1.5)]


def _exact(spec, n_max):
    if isinstance(spec, (TwoPoint, AsymLaplace)):
        return [pmf_closed(spec, n) for n in range(n_max + 1)]
    return pgf_coeffs(spec, n_max).p


@pytest.mark.slow
def test_criterion_5_oracle_agreement():
    with criterion(5, "Monte Carlo and quadrature agreement", 300.0):
        ns = list(range(11))
        failures = []
        for spec in ORACLE_SPECS:
            exact = _exact(spec, 10)
            hits = np.zeros(len(ns), dtype=int)
            for seed in range(20):
                for est in mc_estimate_many(spec, ns, 10**6, seed, workers=4):
                    hits[est.n] += abs(est.value - exact[est.n]) <= 4 * est.stderr
            print(f"    {spec!r}: seeds within 4 stderr by n = {hits.tolist()}")
            if np.any(hits < 19):
                failures.append((spec, [n for n in ns if hits[n] < 19]))
        for n in range(21):
            assert abs(quad_estimate(FIG2, n) - pmf_closed(FIG2, n)) <= 1e-8
        assert not failures, failures


PGF_SPECS = [FIG1, FIG2, HERMITE, STABLE_HERMITE, ExtremeStable(0.5, 1.0, 0.0),
             stable_at_bound(0.5), stable_at_bound(1.0), stable_at_bound(1.3),
             stable_at_bound(1.5), stable_at_bound(2.0), TwoPoint(1.0, 3.0, 0.001),
             AsymLaplace(4.0, 1.0, 0.05), GaussianMix(1.0, 1.0)]


def test_criterion_6_pgf_identities():
    with criterion(6, "PGF series and derivative identities", 10.0):
        for spec in PGF_SPECS:
            t = pmf_table(spec, n_cap=5000)
            powers = np.arange(t.n_max + 1)
            for z in np.linspace(0.0, 0.9, 10):
                series = math.fsum(t.probs * z**powers)
                assert abs(series - pgf_eval(spec, z)) <= max(t.tail_gap, 0.0) + 1e-9, (spec, z)
        z, h = 0.5, 1e-6
        for alpha in (0.5, 1.0, 1.3, 2.0):
            spec = stable_at_bound(alpha)
            fd = (pgf_eval(spec, z + h) - pgf_eval(spec, z - h)) / (2 * h)
            exact = pgf_eval(spec, z) * pgf_log_derivative(spec, z)
            assert abs(fd - exact) <= 1e-6 * abs(exact), alpha


def _invalid_specs(rng, count):
    """Two-point and asymmetric Laplace specs violating a rule by at least 10%."""
    specs = []
    while len(specs) < count:
        kind, mode = rng.integers(2), rng.integers(2)
        if kind == 0:
            a = rng.uniform(0.2, 4.0)
            if mode == 0:  # odds above the n = 1 bound
                b = rng.uniform(a, a + 4.0)
                phi = (b / a) * math.exp(-a - b) * rng.uniform(1.1, 5.0)
            else:  # b < a
                b = a * rng.uniform(0.2, 0.9)
                phi = (b / a) * math.exp(-a - b) * rng.uniform(0.05, 0.9)
            p = phi / (1 + phi)
            if 0 < p < 1:
                specs.append(TwoPoint(a, b, p))
        else:
            l2 = rng.uniform(0.1, 3.0)
            if mode == 0:
                l1 = rng.uniform(l2 + 2.0, l2 + 6.0)
                scale = rng.uniform(1.1, 5.0)
            else:  # lambda1 short of lambda2 + 2 by at least 10%
                l1 = rng.uniform(1.05, 0.9 * (l2 + 2.0))
                scale = rng.uniform(0.05, 0.9)
            phi = (l2 / l1) * ((l1 - 1) / (l2 + 1)) ** 2 * scale
            p = phi / (1 + phi)
            if 0 < p < 1:
                specs.append(AsymLaplace(l1, l2, p))
    return specs


def test_criterion_7_invalid_spec_detection():
    with criterion(7, "no silent negative probabilities for invalid specs", 10.0):
        rng = np.random.default_rng(7)
        raised = 0
        for spec in _invalid_specs(rng, 100):
            report = check_family(spec)
            assert report.verdict is Verdict.INVALID, spec
            try:
                t = pmf_table(spec, n_cap=2000, check=False)
            except NegativeProbabilityError:
                raised += 1
            else:
                assert np.all(t.probs >= -NEG_TOL), spec
        print(f"    negativity error raised for {raised}/100 unchecked tables")


CLI_RUNS = [
    ["validate", "--family", "two-point", "--a", "2", "--b", "2", "--p", "0.0181"],
    ["pmf", "--family", "asym-laplace", "--lambda1", "2.3", "--lambda2", "0.3", "--p", "0.058",
     "--nmax", "30", "--format", "csv"],
    ["pmf", "--family", "extreme-stable", "--alpha", "1.5", "--sigma", "1", "--delta", "3",
     "--ncap", "3000", "--format", "json"],
    ["pgf", "--family", "extreme-stable", "--alpha", "2", "--sigma", "0.7071067811865476",
     "--delta", "2", "--z", "0"],
    ["sample", "--family", "gaussian", "--mu", "2", "--sigma2", "1", "--count", "1000",
     "--seed", "42"],
    ["oracle", "--family", "extreme-stable", "--alpha", "1.5", "--sigma", "1", "--delta", "3",
     "--n", "5", "--samples", "1000000", "--seed", "7", "--workers", "4"],
]


def test_criterion_8_cli_determinism(tmp_path):
    with criterion(8, "byte-identical CLI output over 5 runs", 60.0):
        for argv in CLI_RUNS:
            outputs = set()
            for _ in range(5):
                proc = subprocess.run([sys.executable, "-m", "mixpoisson", *argv],
                                      capture_output=True, check=False)
                assert proc.returncode in (0, 1), proc.stderr
                outputs.add((proc.returncode, proc.stdout))
            assert len(outputs) == 1, argv
        figures = set()
        for k in range(5):
            out = tmp_path / str(k)
            subprocess.run([sys.executable, "-m", "mixpoisson", "figure", "--which", "2",
                            "--out", str(out)], check=True, capture_output=True)
            figures.add(tuple(p.read_bytes() for p in sorted(out.iterdir())))
        assert len(figures) == 1
