"""Special functions against mpmath at 50 digits and closed forms."""
import math

import mpmath as mp
import pytest
from hypothesis import assume, given, strategies as st

from twostage.errors import NonPositiveArgument
from twostage.numerics import (
    ConversionInputs,
    mills_ratio,
    normal_approx_cdf,
    normal_approx_hazard_lower,
    normal_approx_hazard_upper,
    normal_approx_pmf,
    poisson_cdf,
    poisson_pmf,
    poisson_sf,
    reneging_tail_integral,
    std_normal_cdf,
    std_normal_hazard,
    std_normal_pdf,
)

mp.mp.dps = 50


def mp_hazard(x):
    x = mp.mpf(x)
    return mp.npdf(x) / (mp.erfc(x / mp.sqrt(2)) / 2)


def rel(a, b):
    return abs(a - b) / abs(b)


def test_pdf_examples():
    assert std_normal_pdf(0.0) == pytest.approx(0.3989422804014327, rel=1e-15)
    assert std_normal_pdf(1.0) == pytest.approx(0.24197072451914337, rel=1e-14)


@given(st.floats(-30, 30))
def test_pdf_symmetric_and_accurate(x):
    assert std_normal_pdf(x) == std_normal_pdf(-x)
    assert rel(std_normal_pdf(x), float(mp.npdf(x))) <= 1e-14


def test_cdf_examples():
    assert std_normal_cdf(0.0) == 0.5
    assert std_normal_cdf(math.inf) == 1.0
    assert std_normal_cdf(-math.inf) == 0.0
    assert std_normal_cdf(1.5) == pytest.approx(0.9331927987311419, rel=1e-13)


@given(st.floats(-8, 8))
def test_cdf_relative_accuracy_core(x):
    assert rel(std_normal_cdf(x), float(mp.ncdf(x))) <= 1e-13


@given(st.floats(-37, -8))
def test_cdf_relative_accuracy_lower_tail(x):
    assert rel(std_normal_cdf(x), float(mp.ncdf(x))) <= 1e-10


# frozen from mpmath, 50 digits
HAZARD = {
    0.0: 0.7978845608028654,
    3.0: 3.2830986549304365069,
    8.5: 8.6145953201651728741,
    10.0: 10.098093233962511963,
    40.0: 40.024968847207263723,
    -5.0: 1.4867199409049057124e-6,
    -30.0: 1.473646134878547519e-196,
}


@pytest.mark.parametrize("x, expected", sorted(HAZARD.items()))
def test_hazard_frozen_values(x, expected):
    tol = 1e-12 if abs(x) <= 8 else 1e-10
    assert rel(std_normal_hazard(x), expected) <= tol


@given(st.floats(-8, 8))
def test_hazard_core_accuracy(x):
    assert rel(std_normal_hazard(x), float(mp_hazard(x))) <= 1e-12


@given(st.floats(8, 1e4))
def test_hazard_continued_fraction_region(x):
    # naive phi/(1-Phi) is 0/0 beyond ~38; the continued fraction is not
    assert rel(std_normal_hazard(x), float(mp_hazard(x))) <= 1e-10


def test_hazard_asymptote():
    assert std_normal_hazard(40.0) == pytest.approx(40 + 1 / 40, rel=2e-5)
    assert std_normal_hazard(1e8) == pytest.approx(1e8, rel=1e-15)


@given(st.floats(-8, 8))
def test_hazard_identities(x):
    h = std_normal_hazard(x)
    assert rel(h * float(1 - mp.ncdf(x)), std_normal_pdf(x)) <= 1e-12
    assert rel(std_normal_hazard(-x), std_normal_pdf(x) / std_normal_cdf(x)) <= 1e-12
    assert rel(mills_ratio(x) * h, 1.0) <= 1e-14


def test_poisson_closed_forms():
    for R in (0.3, 1.0, 17.5, 900.0):
        assert poisson_pmf(0, R) == pytest.approx(math.exp(-R), rel=1e-13)
    assert poisson_cdf(2, 1.0) == pytest.approx(2.5 * math.exp(-1), rel=1e-15)


def test_poisson_cdf_at_mean():
    # mpmath direct summation gives 0.52656219852999847...
    assert poisson_cdf(100, 100.0) == pytest.approx(0.5265621985299984704, rel=1e-12)


@pytest.mark.parametrize("k, R", [(0, 700.0), (999_000, 1e6), (1_001_500, 1e6), (5, 0.01), (250, 40.0)])
def test_poisson_against_mpmath(k, R):
    exact_pmf = mp.exp(k * mp.log(R) - R - mp.loggamma(k + 1))
    assert rel(poisson_pmf(k, R), float(exact_pmf)) <= 1e-12
    upper = mp.gammainc(k + 1, 0, R, regularized=True)
    assert rel(poisson_sf(k, R), float(upper)) <= 1e-12
    lower = mp.gammainc(k + 1, R, mp.inf, regularized=True)
    assert rel(poisson_cdf(k, R), float(lower)) <= 1e-12


def test_poisson_pmf_sums_reproduce_cdf():
    R = 850.0
    running = 0.0
    prev = 0.0
    for k in range(2001):
        running += poisson_pmf(k, R)
        c = poisson_cdf(k, R)
        assert c >= prev
        prev = c
        if c > 1e-200:
            assert rel(running, c) <= 1e-12


def test_conversion_inputs():
    ci = ConversionInputs(30.0, 25.0)
    assert ci.square_root_coef == 1.0
    assert ci.continuity_correction == 0.1
    assert ci.square_root_coef * math.sqrt(ci.resource) + ci.resource == pytest.approx(30.0)
    with pytest.raises(NonPositiveArgument):
        ConversionInputs(1.0, 0.0)


def test_normal_approx_small_r_error():
    approx = normal_approx_cdf(2, 1.0)
    assert approx == pytest.approx(0.9331927987311419, rel=1e-13)
    assert approx - poisson_cdf(2, 1.0) == pytest.approx(0.013494195802536130, rel=1e-10)


def test_normal_approx_median_shift():
    for R in (4.0, 50.0, 1e4):
        assert normal_approx_cdf(R, R) > 0.5


def test_normal_approx_at_hundred():
    assert normal_approx_cdf(100, 100.0) == pytest.approx(0.51993880583837246, rel=1e-13)
    assert poisson_cdf(100, 100.0) - normal_approx_cdf(100, 100.0) == pytest.approx(0.0066234, abs=1e-6)


def test_normal_approx_companions():
    s, R = 30.0, 25.0
    z = 1.1
    assert normal_approx_pmf(s, R) == pytest.approx(std_normal_pdf(z) / 5, rel=1e-14)
    assert normal_approx_hazard_upper(s, R) == pytest.approx(std_normal_hazard(z) / 5, rel=1e-14)
    assert normal_approx_hazard_lower(s, R) == pytest.approx(std_normal_hazard(-z) / 5, rel=1e-14)


# c = +-1 sit near zeros of the leading (1 - z^2) skewness term, where the
# error is accidentally tiny and not monotone in R
@pytest.mark.parametrize("c", [-2.0, -0.5, 0.0, 0.5, 1.5, 2.0])
def test_normal_approx_error_shrinks_with_r(c):
    errors = []
    for R in (1e2, 1e3, 1e4):
        s = round(R + c * math.sqrt(R))
        errors.append(abs(normal_approx_cdf(s, R) - poisson_cdf(s, R)))
    assert errors[0] > errors[1] > errors[2]


# -- infinite-stage integral ----------------------------------------------------

def truncated_product_sum(nu, theta, lam, n=10_000):
    """Brute force: sum_{k<=n} prod_{j<=k} lam/(nu + j theta)."""
    total = term = 1.0
    for j in range(1, n + 1):
        term *= lam / (nu + j * theta)
        total += term
        if term == 0.0:
            break
    return total


def test_tail_integral_closed_form_at_unit_shape():
    for lam in (0.5, 3.0, 40.0):
        R = lam / 2.0
        assert reneging_tail_integral(2.0, 2.0, lam) == pytest.approx(math.expm1(R) / R, rel=1e-12)


def test_tail_integral_empty_queue_limit():
    assert reneging_tail_integral(30.0, 2.0, 1e-9) == pytest.approx(1.0, abs=1e-10)
    assert reneging_tail_integral(3.0, 2.0, 1e-12) == pytest.approx(1.0, abs=1e-12)


def test_tail_integral_matches_truncated_sum():
    assert rel(reneging_tail_integral(30.0, 2.0, 50.0), truncated_product_sum(30.0, 2.0, 50.0)) <= 1e-9


def test_tail_integral_against_quadrature():
    nu, theta, lam = 0.7, 2.0, 9.0   # shape < 1: singular integrand at t = 1
    a, R = nu / theta, lam / theta
    f = lambda t: mp.exp(R * t) * (1 - t) ** (a - 1)
    expected = a * mp.quad(f, [0, 0.5, 1])
    assert rel(reneging_tail_integral(nu, theta, lam), float(expected)) <= 1e-10


@given(st.floats(0.5, 200.0), st.floats(0.1, 20.0), st.floats(0.5, 100.0))
def test_tail_integral_is_limit_of_product_sums(nu, theta, lam):
    assume(lam / theta < 600)   # beyond this 1/pi itself leaves double range
    assert rel(reneging_tail_integral(nu, theta, lam), truncated_product_sum(nu, theta, lam)) <= 1e-8


@pytest.mark.parametrize("args", [(0.0, 1.0, 1.0), (1.0, -1.0, 1.0), (1.0, 1.0, 0.0)])
def test_tail_integral_rejects_non_positive(args):
    with pytest.raises(NonPositiveArgument):
        reneging_tail_integral(*args)


def test_tail_integral_overflow_is_inf():
    assert reneging_tail_integral(0.5, 0.1, 100.0) == math.inf
