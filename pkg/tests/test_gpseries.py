import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from caputo_smooth.errors import MathDomainError
from caputo_smooth.exprkit import DerivTable, derivative_table, parse
from caputo_smooth.gpseries import (
    GenSeries,
    SingularWeight,
    beta_fn,
    expand_Q,
    frac_integrate,
    gamma_fn,
    integrate,
    mul_weight,
)
from caputo_smooth.lattice import Alpha, Exponent

HALF = Alpha(1, 2)
SQRT_PI = math.sqrt(math.pi)


def series(alpha, *items, cutoff=None):
    return GenSeries.build(alpha, items, cutoff)


def as_dict(s):
    return {e.value: c for e, c in s}


class TestSpecialFunctions:
    def test_gamma_values(self):
        assert gamma_fn(1.0) == 1.0
        assert gamma_fn(0.5) == pytest.approx(SQRT_PI, rel=1e-15)
        assert gamma_fn(2.5) == pytest.approx(1.5 * 0.5 * SQRT_PI, rel=1e-15)

    def test_beta_values(self):
        assert beta_fn(1.0, 1.0) == pytest.approx(1.0, rel=1e-15)
        assert beta_fn(0.5, 1.5) == pytest.approx(math.pi / 2, rel=1e-14)
        assert beta_fn(0.5, 2.0) == pytest.approx(4 / 3, rel=1e-14)

    @pytest.mark.parametrize("bad", [0.0, -1.0, float("nan")])
    def test_domain(self, bad):
        with pytest.raises(MathDomainError):
            gamma_fn(bad)
        with pytest.raises(MathDomainError):
            beta_fn(1.0, bad)

    @given(a=st.floats(1e-3, 10), b=st.floats(1e-3, 10))
    def test_beta_gamma_identity(self, a, b):
        lhs = beta_fn(a, b) * gamma_fn(a + b)
        rhs = gamma_fn(a) * gamma_fn(b)
        assert lhs == pytest.approx(rhs, rel=1e-12)


class TestSeriesOps:
    def test_integrate(self):
        assert as_dict(integrate(series(HALF, (F(1, 2), 1.0)))) == {F(3, 2): 2 / 3}
        assert as_dict(integrate(series(HALF, (0, 1.0)))) == {F(1): 1.0}
        assert len(integrate(series(HALF))) == 0

    def test_integrate_rejects_non_integrable(self):
        with pytest.raises(MathDomainError):
            integrate(series(HALF, (-1, 1.0)))

    def test_mul_weight(self):
        w = SingularWeight.from_pairs([(F(1, 2), 1.0)])
        assert as_dict(mul_weight(series(HALF, (0, 1.0)), w)) == {F(-1, 2): 0.5}
        w = SingularWeight.from_pairs([(F(1, 2), 3.0)])
        assert as_dict(mul_weight(series(HALF, (F(1, 2), 2.0)), w)) == {F(0): 3.0}
        assert len(mul_weight(series(HALF), w)) == 0

    def test_frac_integrate(self):
        out = as_dict(frac_integrate(series(HALF, (0, 1.0)), HALF))
        assert out.keys() == {F(1, 2)}
        assert out[F(1, 2)] == pytest.approx(1.128379167095513, rel=1e-15)
        out = as_dict(frac_integrate(series(HALF, (F(1, 2), 1.0)), HALF))
        assert out[F(1)] == pytest.approx(0.886226925452758, rel=1e-15)
        assert len(frac_integrate(series(HALF), HALF)) == 0

    def test_cutoff_drops_and_records(self):
        s = integrate(series(HALF, (F(1, 2), 1.0), (0, 1.0), cutoff=F(1)))
        assert as_dict(s) == {F(1): 1.0}
        assert s.truncated

    def test_structural_zero_pruning(self):
        s = series(HALF, (1, 1.0)) - series(HALF, (1, 1.0))
        assert len(s) == 0
        tiny = series(HALF, (1, 1e-300))
        assert len(tiny) == 1

    def test_records(self):
        records = series(HALF, (F(3, 2), 2.0)).to_records()
        assert records == [{"i": 1, "j": 1, "exponent_value": 1.5, "coefficient": 2.0}]

    @settings(deadline=None)
    @given(
        alpha=st.sampled_from([Alpha(1, 3), Alpha(2, 5), Alpha(1, 2), Alpha(5, 7)]),
        terms=st.dictionaries(
            st.tuples(st.integers(0, 4), st.integers(0, 4)), st.floats(-5, 5), max_size=6
        ),
    )
    def test_frac_integrate_shifts_by_alpha(self, alpha, terms):
        s = series(alpha, *((Exponent.lattice(i, j, alpha), c) for (i, j), c in terms.items()))
        out = frac_integrate(s, alpha)
        assert sorted(out.exponents()) == sorted(e + alpha.value for e, c in s if c != 0.0)

    @settings(deadline=None)
    @given(
        alpha=st.sampled_from([Alpha(1, 3), Alpha(2, 5), Alpha(1, 2)]),
        terms=st.dictionaries(
            st.tuples(st.integers(0, 4), st.integers(0, 4)).filter(lambda ij: ij != (0, 0)),
            st.floats(-5, 5).filter(lambda c: c != 0.0),
            max_size=6,
        ),
    )
    def test_integrate_inverts_differentiation(self, alpha, terms):
        s = series(alpha, *((Exponent.lattice(i, j, alpha), c) for (i, j), c in terms.items()))
        back = integrate(s.differentiate())
        assert back.exponents() == s.exponents()
        for e, c in s:
            assert back.coefficient(e) == pytest.approx(c, rel=1e-14)

    def test_evaluation(self):
        s = series(HALF, (0, 1.0), (F(1, 2), 2.0))
        assert s(0.25) == pytest.approx(2.0)
        np.testing.assert_allclose(s(np.array([0.0, 4.0])), [1.0, 5.0])


def random_table(rng, n, c0=0.3):
    entries = {(p, s - p): rng.uniform(-2, 2) for s in range(n + 1) for p in range(s + 1)}
    return DerivTable.from_entries(n, c0, entries)


class TestExpandQ:
    def test_constant_f(self):
        table = derivative_table(parse("1"), 5, 0.0)
        pairs = [(F(1, 2), 0.7), (F(1), -0.2), (F(3, 2), 0.1)]
        Q = expand_Q(table, pairs, HALF, 5, Exponent(2))
        assert Q.exponents() == [Exponent(F(1, 2))]
        assert Q.coefficient(F(1, 2)) == pytest.approx(1 / math.gamma(1.5), rel=1e-15)

    def test_linear_f_matches_mittag_leffler_coefficients(self):
        table = derivative_table(parse("y"), 5, 1.0)
        Q = expand_Q(table, [(F(1, 2), 1 / math.gamma(1.5))], HALF, 5, Exponent(1))
        assert as_dict(Q).keys() == {F(1, 2), F(1)}
        assert Q.coefficient(F(1, 2)) == pytest.approx(1 / math.gamma(1.5), rel=1e-15)
        assert Q.coefficient(F(1)) == pytest.approx(1 / math.gamma(2.0), rel=1e-14)

    def test_zero_table(self):
        table = DerivTable.from_entries(4, 0.0, {})
        assert len(expand_Q(table, [(F(1, 2), 1.0)], HALF, 4, Exponent(3))) == 0

    def test_by_hand_second_level(self):
        """s = 2 words with one letter 2 sum to c * t^(1+gamma) before the
        fractional integral (the ordered integrals are t^(1+g)/(1+g) and
        g t^(1+g)/(1+g))."""
        table = DerivTable.from_entries(2, 0.0, {(1, 1): 1.0})
        c = 0.9
        Q = expand_Q(table, [(F(1, 2), c)], HALF, 3)
        expected = c * math.gamma(2.5) / math.gamma(3.0)
        assert as_dict(Q) == pytest.approx({F(2): expected}, rel=1e-14)

    @settings(max_examples=30, deadline=None)
    @given(
        seed=st.integers(0, 2**31),
        alpha=st.sampled_from([Alpha(1, 3), Alpha(2, 5), Alpha(1, 2), Alpha(3, 5)]),
        n=st.integers(1, 6),
    )
    def test_dp_matches_enumeration(self, seed, alpha, n):
        rng = np.random.default_rng(seed)
        table = random_table(rng, n)
        pairs = [(Exponent.lattice(i, j, alpha), rng.uniform(-1, 1)) for i, j in [(0, 1), (0, 2), (1, 1)]]
        cutoff = Exponent(3)
        dp = expand_Q(table, pairs, alpha, n, cutoff)
        ref = expand_Q(table, pairs, alpha, n, cutoff, method="enumerate")
        for e in set(dp.exponents()) | set(ref.exponents()):
            assert dp.coefficient(e) == pytest.approx(ref.coefficient(e), abs=1e-12)
