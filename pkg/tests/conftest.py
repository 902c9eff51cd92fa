import math

import pytest

from mixpoisson.families import AsymLaplace, ExtremeStable, GaussianMix, TwoPoint

# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES = []

FIG1 = TwoPoint(a=2.0, b=2.0, p=0.009)
FIG2 = AsymLaplace(lambda1=2.3, lambda2=0.3, p=0.058)
HERMITE = GaussianMix(mu=2.0, sigma2=1.0)
STABLE_HERMITE = ExtremeStable(alpha=2.0, sigma=math.sqrt(0.5), delta=2.0)
POSITIVE_STABLE = ExtremeStable(alpha=0.5, sigma=1.0, delta=0.0)


def stable_at_bound(alpha, sigma=1.0, margin=0.5):
    """Extreme stable law with location ``margin`` above the admissible bound."""
    from mixpoisson.families import stable_location_bound

    return ExtremeStable(alpha, sigma, stable_location_bound(alpha, sigma) + margin)


@pytest.fixture
def fig1():
    return FIG1


@pytest.fixture
def fig2():
    return FIG2


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
