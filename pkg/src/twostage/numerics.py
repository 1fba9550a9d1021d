"""Standard normal and Poisson special functions used by the approximation.

Everything here works on scalars.  Tail quantities are combined in log space
and exponentiated last so that resource requirements up to ``1e6`` neither
overflow nor underflow.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import special

from .errors import NonPositiveArgument

SQRT_2PI = math.sqrt(2.0 * math.pi)
LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
_SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)
_MILLS_SWITCH = 8.0


@dataclass(frozen=True)
class ConversionInputs:
    """Staffing level ``s`` and resource requirement ``R`` mapped onto the
    square-root coefficient ``c = (s - R)/sqrt(R)`` and continuity
    correction ``delta = 0.5/sqrt(R)``."""

    staffing: float
    resource: float

    def __post_init__(self):
        if not self.resource > 0:
            raise NonPositiveArgument(f"resource requirement must be positive, got {self.resource!r}")

    @property
    def square_root_coef(self) -> float:
        return (self.staffing - self.resource) / math.sqrt(self.resource)

    @property
    def continuity_correction(self) -> float:
        return 0.5 / math.sqrt(self.resource)

    @property
    def z(self) -> float:
        """Corrected argument ``c + delta`` of the normal functions."""
        return self.square_root_coef + self.continuity_correction


# -- standard normal ---------------------------------------------------------

def _split_square(x: float) -> tuple:
    # x*x = hi*hi + (x-hi)*(x+hi) with hi*hi exact; keeps exp(-x^2/2) at full
    # relative precision for large |x|
    hi = math.floor(x * 65536.0) / 65536.0
    lo = x - hi
    return hi * hi, lo * (x + hi)


def std_normal_pdf(x: float) -> float:
    x = abs(x)
    if x < 5.0 or not math.isfinite(x):
        return math.exp(-0.5 * x * x) / SQRT_2PI
    big, small = _split_square(x)
    return math.exp(-0.5 * big) * math.exp(-0.5 * small) / SQRT_2PI


def log_std_normal_pdf(x: float) -> float:
    return -0.5 * x * x - LOG_SQRT_2PI


def std_normal_cdf(x: float) -> float:
    # ndtr switches to erfc in the lower tail, so relative accuracy holds there
    return float(special.ndtr(x))


def _mills_ratio_cf(x: float, tol: float = 1e-16, max_terms: int = 500) -> float:
    """Mills ratio ``(1 - Phi(x))/phi(x)`` for large positive ``x`` via the
    continued fraction ``1/(x + 1/(x + 2/(x + 3/(x + ...))))``, modified Lentz."""
    tiny = 1e-300
    f = x
    C = x
    D = 0.0
    for k in range(1, max_terms):
        D = x + k * D
        D = 1.0 / (D if D != 0.0 else tiny)
        C = x + k / C
        if C == 0.0:
            C = tiny
        delta = C * D
        f *= delta
        if abs(delta - 1.0) < tol:
            break
    return 1.0 / f


def mills_ratio(x: float) -> float:
    """``(1 - Phi(x))/phi(x)``, i.e. ``1/h(x)``; ``0`` at ``+inf``."""
    if x == math.inf:
        return 0.0
    if x > _MILLS_SWITCH:
        return _mills_ratio_cf(x)
    if x >= 0.0:
        return float(special.erfcx(x / math.sqrt(2.0))) / _SQRT_2_OVER_PI
    log_m = math.log(float(special.ndtr(-x))) - log_std_normal_pdf(x)
    return math.exp(log_m) if log_m < 709.0 else math.inf


def std_normal_hazard(x: float) -> float:
    """Hazard ``h(x) = phi(x)/(1 - Phi(x))`` without cancellation in either tail."""
    if x == math.inf:
        return math.inf
    if x == -math.inf:
        return 0.0
    if x > _MILLS_SWITCH:
        return 1.0 / _mills_ratio_cf(x)
    if x >= 0.0:
        return _SQRT_2_OVER_PI / float(special.erfcx(x / math.sqrt(2.0)))
    return std_normal_pdf(x) / float(special.ndtr(-x))


# -- Poisson -----------------------------------------------------------------

def _check_poisson(k, R):
    if not R > 0:
        raise NonPositiveArgument(f"Poisson mean must be positive, got {R!r}")
    if k < 0:
        raise NonPositiveArgument(f"Poisson argument must be non-negative, got {k!r}")


_STIRLING = (1.0 / 12, 1.0 / 360, 1.0 / 1260, 1.0 / 1680, 1.0 / 1188)


def _stirling_error(n: int) -> float:
    """``log(n!) - log(sqrt(2 pi n) (n/e)^n)``."""
    if n <= 15:
        return math.lgamma(n + 1.0) - (n + 0.5) * math.log(n) + n - LOG_SQRT_2PI
    nn = float(n) * n
    s0, s1, s2, s3, s4 = _STIRLING
    return (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / n


def _deviance(x: float, m: float) -> float:
    """``x log(x/m) + m - x`` without cancellation when ``x`` is near ``m``."""
    if abs(x - m) < 0.1 * (x + m):
        v = (x - m) / (x + m)
        s = (x - m) * v
        ej = 2.0 * x * v
        v2 = v * v
        j = 1
        while True:
            ej *= v2
            s_next = s + ej / (2 * j + 1)
            if s_next == s:
                return s
            s = s_next
            j += 1
    return x * math.log(x / m) + m - x


def log_poisson_pmf(k: int, R: float) -> float:
    """Saddle-point form (Loader 2000): the large terms of ``k log R - R - log k!``
    cancel analytically, so the result keeps relative accuracy for ``R`` up to 1e6."""
    _check_poisson(k, R)
    if k == 0:
        return -R
    return -_stirling_error(k) - _deviance(float(k), R) - 0.5 * math.log(2.0 * math.pi * k)


def poisson_pmf(k: int, R: float) -> float:
    return math.exp(log_poisson_pmf(k, R))


def poisson_cdf(k: int, R: float) -> float:
    """``P(X <= k)`` for ``X ~ Poisson(R)``, as the regularized upper gamma ``Q(k+1, R)``."""
    _check_poisson(k, R)
    return float(special.gammaincc(k + 1.0, R))


def poisson_sf(k: int, R: float) -> float:
    """``P(X > k)``, computed directly so the upper tail keeps relative accuracy."""
    _check_poisson(k, R)
    return float(special.gammainc(k + 1.0, R))


# -- Poisson-normal conversion ------------------------------------------------

def normal_approx_cdf(s: float, R: float) -> float:
    return std_normal_cdf(ConversionInputs(s, R).z)


def normal_approx_pmf(s: float, R: float) -> float:
    return std_normal_pdf(ConversionInputs(s, R).z) / math.sqrt(R)


def normal_approx_hazard_upper(s: float, R: float) -> float:
    """Approximates ``f_P(s;R)/(1 - F_P(s;R))``."""
    return std_normal_hazard(ConversionInputs(s, R).z) / math.sqrt(R)


def normal_approx_hazard_lower(s: float, R: float) -> float:
    """Approximates ``f_P(s;R)/F_P(s;R)``."""
    return std_normal_hazard(-ConversionInputs(s, R).z) / math.sqrt(R)


# -- infinite-capacity reneging stage -------------------------------------------

def _tail_series(a: float, R: float) -> float:
    # sum_k prod_{j<=k} R/(a+j); only reached when the gamma route underflows (R << a)
    total, term, j = 1.0, 1.0, 0
    while True:
        j += 1
        term *= R / (a + j)
        total += term
        if term < 1e-17 * total:
            return total


def reneging_tail_integral(nu: float, theta: float, lam: float) -> float:
    """``(nu/theta) * int_0^1 exp(lam t/theta) (1-t)^(nu/theta - 1) dt``.

    This is ``1/pi`` at the head of an unbounded reneging stage whose bottom
    state drains at ``nu``.  Evaluated as ``Gamma(a+1) P(a,R) e^R R^-a`` with
    ``a = nu/theta``, ``R = lam/theta`` and ``P`` the regularized lower
    incomplete gamma, all in logs.
    """
    for name, v in (("nu", nu), ("theta", theta), ("lambda", lam)):
        if not (v > 0 and math.isfinite(v)):
            raise NonPositiveArgument(f"{name} must be positive and finite, got {v!r}")
    a = nu / theta
    R = lam / theta
    P = float(special.gammainc(a, R))
    if P < 1e-280:
        return _tail_series(a, R)
    log_value = math.lgamma(a + 1.0) + math.log(P) + R - a * math.log(R)
    return math.exp(log_value) if log_value < 709.0 else math.inf
