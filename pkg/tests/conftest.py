from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest

from caputo_smooth.lattice import Alpha, regularity_order

ACCEPTANCE_ALPHAS = [Alpha(1, 3), Alpha(2, 5), Alpha(1, 2), Alpha(3, 5)]


def poly_text(coeffs: np.ndarray, c0: float) -> str:
    """``sum a_ij x^i (y - c0)^j`` as expression text (zero terms omitted)."""
    parts = []
    for (i, j), a in np.ndenumerate(coeffs):
        if a == 0.0:
            continue
        factors = [repr(float(a))]
        if i:
            factors.append(f"x^{i}")
        if j:
            factors.append(f"(y - {c0!r})^{j}")
        parts.append("*".join(factors))
    return " + ".join(parts) if parts else "0"


def random_polynomial_problem(rng: np.random.Generator):
    """Random ``(f_text, alpha, n, c0, holds_hint)`` from the acceptance family.

    Degree <= 3 in each variable, coefficients in [-2, 2].  In half of the
    draws the pure-x coefficients below m are zeroed so the smoothness
    condition holds; in a quarter only some of them are.
    """
    alpha = ACCEPTANCE_ALPHAS[rng.integers(len(ACCEPTANCE_ALPHAS))]
    n_min = math.floor(1 / float(alpha)) + 1
    n = int(rng.integers(n_min, 7))
    m = regularity_order(alpha, n)
    c0 = float(np.round(rng.uniform(-1.0, 1.0), 3))
    coeffs = np.round(rng.uniform(-2.0, 2.0, size=(4, 4)), 3)
    coeffs[rng.random((4, 4)) < 0.3] = 0.0
    draw = rng.random()
    if draw < 0.5:
        coeffs[: min(m, 4), 0] = 0.0
    elif draw < 0.75:
        coeffs[0, 0] = 0.0
    return poly_text(coeffs, c0), alpha, n, c0


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240601)


def brute_force_gammas(alpha: Alpha, n: int) -> tuple[int, list[Fraction]]:
    """Independent enumeration over ``i, j <= 4n/alpha``."""
    p, q = alpha.p, alpha.q
    m = max(k for k in range(0, n + 1) if k * q < n * p)
    bound = 4 * n * q // p + 1
    # work with numerators over the common denominator q
    scaled = {i * q + j * p for i in range(bound + 1) for j in range(bound + 1)}
    return m, [Fraction(v, q) for v in sorted(scaled) if 0 < v < m * q]


# acceptance reporting: one PASS/FAIL line per ``criterion`` marker
_CRITERIA: dict[int, tuple[str, bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, text): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or (report.when != "call" and report.passed):
        return
    number, text = marker.args
    previous = _CRITERIA.get(number, (text, True))[1]
    _CRITERIA[number] = (text, previous and report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        text, passed = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {text}")
