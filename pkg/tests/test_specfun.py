import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from lpwidths import specfun
from lpwidths.errors import DomainError, RangeError, UnsupportedBoundaryError


@pytest.mark.parametrize(
    "s, expected",
    [(1.0, 0.0), (2.0, 0.0), (0.5, 0.5723649429247001), (10.0, math.log(362880.0))],
)
def test_log_gamma_known_values(s, expected):
    assert specfun.log_gamma(s) == pytest.approx(expected, abs=1e-13)


def test_log_gamma_matches_scipy_over_wide_range():
    for s in np.concatenate([np.geomspace(1e-6, 1e6, 400), [1e-3, 0.01, 0.1, 9.99, 10.0, 10.01]]):
        ref = special.gammaln(s)
        assert abs(specfun.log_gamma(float(s)) - ref) <= 1e-12 * max(1.0, abs(ref))


def test_log_gamma_lemma17_anchor():
    # (Gamma(1/100)/100)^100 is close to exp(-Euler) and approaches it from above
    a100 = math.exp(100 * (specfun.log_gamma(0.01) - math.log(100)))
    assert a100 == pytest.approx(math.exp(-specfun.EULER_GAMMA), abs=1e-2)
    assert a100 > math.exp(-specfun.EULER_GAMMA)


@given(st.floats(min_value=1e-4, max_value=1e4))
def test_log_gamma_recurrence(s):
    lhs = specfun.log_gamma(s + 1.0)
    rhs = specfun.log_gamma(s) + math.log(s)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))


@pytest.mark.parametrize("bad", [0.0, -1.0, math.inf, math.nan])
def test_log_gamma_domain(bad):
    with pytest.raises(DomainError):
        specfun.log_gamma(bad)
    with pytest.raises(DomainError):
        specfun.digamma(bad)


@pytest.mark.parametrize(
    "s, expected",
    [(1.0, -0.5772156649015329), (2.0, 0.42278433509846713), (0.5, -1.9635100260214235)],
)
def test_digamma_known_values(s, expected):
    assert specfun.digamma(s) == pytest.approx(expected, abs=1e-13)


def test_digamma_matches_scipy():
    for s in np.geomspace(1e-4, 1e5, 200):
        ref = special.digamma(s)
        assert abs(specfun.digamma(float(s)) - ref) <= 1e-12 * max(1.0, abs(ref))


def test_inc_gamma_known_values():
    assert specfun.reg_lower_inc_gamma(1.0, math.log(2.0)) == pytest.approx(0.5, abs=1e-15)
    assert specfun.reg_lower_inc_gamma(3.7, 0.0) == 0.0
    assert specfun.reg_lower_inc_gamma(0.5, 0.5) == pytest.approx(0.6826894921370859, abs=1e-14)
    assert specfun.reg_upper_inc_gamma(2.0, math.inf) == 0.0


def test_inc_gamma_against_quadrature():
    # direct integration of the density as an oracle independent of the series/fraction
    for a, x in [(0.5, 0.5), (2.0, 1.5), (0.01, 0.3), (7.0, 9.0), (1.0 / 1000, 1e-5)]:
        num = integrate.quad(lambda s: s ** (a - 1) * math.exp(-s), 0, x, epsabs=0, epsrel=1e-12, limit=200)[0]
        assert specfun.reg_lower_inc_gamma(a, x) == pytest.approx(num / math.gamma(a), rel=1e-9)


def test_inc_gamma_matches_scipy_both_tails():
    rng = np.random.default_rng(4)
    for _ in range(300):
        a = float(np.exp(rng.uniform(-7, 4)))
        x = float(np.exp(rng.uniform(-10, 5)))
        p, q = specfun.reg_lower_inc_gamma(a, x), specfun.reg_upper_inc_gamma(a, x)
        assert p == pytest.approx(special.gammainc(a, x), rel=1e-11, abs=1e-300)
        assert q == pytest.approx(special.gammaincc(a, x), rel=1e-9, abs=1e-300)


@given(
    st.floats(min_value=1e-3, max_value=50.0),
    st.floats(min_value=0.0, max_value=80.0),
    st.floats(min_value=0.0, max_value=80.0),
)
def test_inc_gamma_monotone(a, x1, x2):
    lo, hi = sorted((x1, x2))
    assert specfun.reg_lower_inc_gamma(a, lo) <= specfun.reg_lower_inc_gamma(a, hi)


def test_inc_gamma_at_log_handles_subnormal_arguments():
    # P(a, x) ~ x^a / Gamma(a+1) for tiny x
    a, log_x = 1e-3, -1000.0 * math.log(10.0)
    expected = math.exp(a * log_x - specfun.log_gamma(a + 1.0))
    assert specfun.reg_lower_inc_gamma_at_log(a, log_x) == pytest.approx(expected, rel=1e-12)


def test_inc_gamma_domain():
    with pytest.raises(DomainError):
        specfun.reg_lower_inc_gamma(0.0, 1.0)
    with pytest.raises(DomainError):
        specfun.reg_lower_inc_gamma(1.0, -1.0)


def test_inverse_n1_is_exponential_quantile():
    prof = specfun.IncGammaProfile(1)
    assert specfun.inv_y_to_omega(prof, 0.5) == pytest.approx(math.log(2.0), rel=1e-13)
    for y in (1e-9, 0.1, 0.9, 0.999999):
        assert specfun.inv_y_to_omega(prof, y) == pytest.approx(-math.log1p(-y), rel=1e-12)


@pytest.mark.parametrize("n", [1, 2, 100, 1000])
def test_inverse_at_zero(n):
    assert specfun.inv_y_to_omega(specfun.IncGammaProfile(n), 0.0) == 0.0


def test_inverse_round_trip_n100_float_path():
    prof = specfun.IncGammaProfile(100)
    w = specfun.inv_y_to_omega(prof, 0.5)
    assert w > 0
    assert specfun.reg_lower_inc_gamma(0.01, w) == pytest.approx(0.5, abs=1e-11)


@pytest.mark.parametrize("n", [1, 2, 5, 10, 100, 1000])
def test_inverse_round_trip_grid(n):
    prof = specfun.IncGammaProfile(n)
    for y in np.linspace(0.0, 1.0 - 1e-6, 201):
        u = specfun.inv_y_to_log_omega(prof, float(y))
        assert abs(specfun.reg_lower_inc_gamma_at_log(1.0 / n, u) - y) <= 1e-10


def test_inverse_agrees_with_scipy_where_representable():
    for n in (1, 2, 5, 10, 100):
        prof = specfun.IncGammaProfile(n)
        for y in (0.3, 0.5, 0.9, 0.99):
            ref = special.gammaincinv(1.0 / n, y)
            if ref > 1e-290:
                assert specfun.inv_y_to_omega(prof, y) == pytest.approx(ref, rel=1e-8)


def test_inverse_with_precise_upper_tail():
    # y rounds to 1 but the complement is known exactly
    prof = specfun.IncGammaProfile(10)
    z = 1e-30
    u = specfun.inv_y_to_log_omega(prof, 1.0, upper_tail=z)
    assert specfun.reg_upper_inc_gamma(0.1, math.exp(u)) == pytest.approx(z, rel=1e-10)


def test_inverse_errors():
    prof = specfun.IncGammaProfile(5)
    with pytest.raises(RangeError):
        specfun.inv_y_to_omega(prof, 1.0)
    with pytest.raises(DomainError):
        specfun.inv_y_to_omega(prof, 1.5)
    with pytest.raises(DomainError):
        specfun.inv_y_to_omega(prof, -0.1)
    with pytest.raises(DomainError):
        specfun.IncGammaProfile(0)


def test_tail_bound_examples():
    b = specfun.tail_bound(specfun.TailBoundCase(0.0, 1.0))
    assert b == pytest.approx(math.exp(-1.0), rel=1e-14)

    b = specfun.tail_bound(specfun.TailBoundCase(-1.0, 2.0))
    assert b == pytest.approx(0.5 * math.exp(-2.0), rel=1e-14)
    assert special.exp1(2.0) == pytest.approx(0.04890051070806112, rel=1e-12)
    assert special.exp1(2.0) <= b

    b = specfun.tail_bound(specfun.TailBoundCase(1.0, 2.0))
    assert b == pytest.approx(4.0 * math.exp(-2.0), rel=1e-14)
    assert 3.0 * math.exp(-2.0) <= b


def test_tail_bound_sound_on_random_cases():
    rng = np.random.default_rng(17)
    for _ in range(200):
        alpha = rng.uniform(-4.0, 4.0)
        delta = max(1.0, 2.0 * abs(alpha)) + rng.exponential(3.0) + 1e-6
        # closed form: Gamma(alpha+1, delta) for alpha > -1, else quadrature
        truth = integrate.quad(lambda u: u**alpha * math.exp(-u), delta, np.inf, epsabs=0, epsrel=1e-13)[0]
        assert truth <= specfun.tail_bound(specfun.TailBoundCase(alpha, delta)) + 1e-12


def test_tail_bound_large_alpha_case():
    # alpha > delta is outside the random grid above
    for alpha, delta in [(3.0, 1.5), (10.0, 2.0)]:
        truth = special.gammaincc(alpha + 1, delta) * special.gamma(alpha + 1)
        assert truth <= specfun.tail_bound(specfun.TailBoundCase(alpha, delta))


def test_tail_bound_boundary_and_domain():
    with pytest.raises(UnsupportedBoundaryError):
        specfun.tail_bound(specfun.TailBoundCase(2.0, 2.0))
    with pytest.raises(DomainError):
        specfun.TailBoundCase(1.0, 0.0)
    assert specfun.tail_bound(specfun.TailBoundCase(0.0, 3.0)) > 0


@settings(max_examples=50)
@given(st.integers(1, 5000), st.floats(min_value=1e-9, max_value=1 - 1e-9))
def test_inverse_round_trip_property(n, y):
    prof = specfun.IncGammaProfile(n)
    u = specfun.inv_y_to_log_omega(prof, y)
    assert abs(specfun.reg_lower_inc_gamma_at_log(prof.shape, u) - y) <= 1e-10
