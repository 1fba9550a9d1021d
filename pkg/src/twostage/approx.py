"""Normal-representation approximation of the reneging queue.

Each subchain is mapped onto a Poisson variable (staffing level, resource
requirement) and then onto the standard normal with a continuity correction.
The staffing levels are never rounded on this path.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from scipy import special

from .errors import NotHeavyTraffic, QueueModelError
from .measures import Measures, SubchainSummary
from .model import INF, ModelParams, ThreeStageParams, is_infinite
from .numerics import log_std_normal_pdf, mills_ratio, std_normal_hazard


@dataclass(frozen=True)
class NormalParams:
    """Poisson/normal parameters of subchains 0, 1, 2 (and 3 when present).

    Stage ``i`` drains at ``s*mu + sum_{j<i} n_j*theta_j`` at its head, so its
    staffing level is that rate over ``theta_i`` and its resource requirement
    is ``lam/theta_i``.  ``c*plus`` is ``inf`` for an unbounded stage.
    """

    R: float
    c: float
    delta: float
    s1: float
    s1plus: float
    R1: float
    c1: float
    c1plus: float
    delta1: float
    s2: float
    s2plus: float
    R2: float
    c2: float
    c2plus: float
    delta2: float
    s3: Optional[float] = None
    s3plus: Optional[float] = None
    R3: Optional[float] = None
    c3: Optional[float] = None
    c3plus: Optional[float] = None
    delta3: Optional[float] = None


def _stage_params(lam: float, head_rate: float, theta: float, n) -> tuple:
    R = lam / theta
    root = math.sqrt(R)
    staffing = head_rate / theta
    staffing_plus = staffing + n
    c = (staffing - R) / root
    c_plus = INF if is_infinite(n) else (staffing_plus - R) / root
    return staffing, staffing_plus, R, c, c_plus, 0.5 / root


def normal_params(params: ModelParams) -> NormalParams:
    lam, mu, s = params.lam, params.mu, params.s
    R = lam / mu
    fields = {"R": R, "c": (s - R) / math.sqrt(R), "delta": 0.5 / math.sqrt(R)}
    head_rate = s * mu
    for i, (n, theta) in enumerate(params.stages(), start=1):
        values = _stage_params(lam, head_rate, theta, n)
        for name, v in zip(("s{}", "s{}plus", "R{}", "c{}", "c{}plus", "delta{}"), values):
            fields[name.format(i)] = v
        if not is_infinite(n):
            head_rate += n * theta
    return NormalParams(**fields)


def tail_ratio(c: float, c_plus: float, delta: float) -> float:
    """``phi(c_plus + delta)/phi(c + delta)``, evaluated through its logarithm."""
    if c_plus == INF:
        return 0.0
    log_r = log_std_normal_pdf(c_plus + delta) - log_std_normal_pdf(c + delta)
    return math.exp(log_r) if log_r < 709.0 else INF


def stage_h(R: float, c: float, c_plus: float, delta: float, r: float) -> float:
    """``sqrt(R) * (1/h(c+delta) - r/h(c_plus+delta))`` for one waiting stage.

    Equals ``sqrt(R) (Phi(b) - Phi(a))/phi(a)`` with ``a = c+delta``,
    ``b = c_plus+delta``.  For ``a < 0`` both reciprocal hazards are close to
    ``1/phi`` and the direct difference loses every digit, so there the
    normal mass between ``a`` and ``b`` is formed from log-CDF values and
    divided by ``phi(a)`` in log space.
    """
    if c_plus == c:
        return 0.0
    a = c + delta
    root = math.sqrt(R)
    if c_plus == INF:
        return root * mills_ratio(a)
    b = c_plus + delta
    if a >= 0.0:
        return root * (mills_ratio(a) - r * mills_ratio(b))
    log_upper = float(special.log_ndtr(b))
    log_mass = log_upper + math.log1p(-math.exp(float(special.log_ndtr(a)) - log_upper))
    log_h = math.log(root) + log_mass - log_std_normal_pdf(a)
    return math.exp(log_h) if log_h < 709.0 else INF


def approx_subchain_summary(params: ModelParams) -> SubchainSummary:
    """Normal-representation estimates of the subchain quantities."""
    npar = normal_params(params)
    # sqrt(R)/h(-c-delta), written through the Mills ratio so that it saturates
    # to inf (and pi_s to 0) instead of dividing by an underflowed hazard
    h0 = math.sqrt(npar.R) * mills_ratio(-npar.c - npar.delta)
    hs, rs = [], []
    for i, n in enumerate(params.capacities, start=1):
        R, c, c_plus, d = (getattr(npar, f"R{i}"), getattr(npar, f"c{i}"),
                           getattr(npar, f"c{i}plus"), getattr(npar, f"delta{i}"))
        if n == 0:
            hs.append(0.0)
            rs.append(1.0)
            continue
        r = tail_ratio(c, c_plus, d)
        hs.append(stage_h(R, c, c_plus, d, r))
        rs.append(r)
    extra = {"h3": hs[2], "r3": rs[2]} if len(hs) > 2 else {}
    return SubchainSummary(h0, hs[0], hs[1], rs[0], rs[1], params.p, "approx", **extra)


def approx_measures(params: ModelParams) -> Measures:
    """Approximate ``pi_s``, ``P_Q``, ``P_A``, ``L`` in closed form."""
    if isinstance(params, ThreeStageParams):
        return approx_measures_three_stage(params)
    sm = approx_subchain_summary(params)
    p, lam = sm.p, params.lam
    R1, R2 = lam / params.theta1, lam / params.theta2
    n1 = params.n1
    queue = sm.h1 + sm.r1 * sm.h2
    pi_s = 1.0 / (sm.inv_pi_s0 + queue)
    length = R1 * (p * sm.h1 + 1.0 - sm.r1)
    if sm.r1 != 0.0:
        length += sm.r1 * R2 * ((p + n1 / R2 - n1 / R1) * sm.h2 + 1.0 - sm.r2)
    return Measures(
        pi_s=pi_s,
        p_q=pi_s * (1.0 + queue),
        p_a=pi_s * (p * queue + 1.0),
        l=pi_s * length,
        route="approx",
        pi_blocking=pi_s * sm.r1 * sm.r2 if params.is_finite else 0.0,
    )


def approx_measures_three_stage(params: ThreeStageParams) -> Measures:
    sm = approx_subchain_summary(params)
    p, lam = sm.p, params.lam
    R1, R2, R3 = (lam / t for t in params.thetas)
    n1, n2 = params.n1, params.n2
    w2 = sm.r1
    w3 = sm.r1 * sm.r2
    queue = sm.h1 + w2 * sm.h2 + w3 * sm.h3
    pi_s = 1.0 / (sm.inv_pi_s0 + queue)
    length = R1 * (p * sm.h1 + 1.0 - sm.r1)
    if w2 != 0.0:
        length += w2 * R2 * ((p + n1 / R2 - n1 / R1) * sm.h2 + 1.0 - sm.r2)
    if w3 != 0.0:
        length += w3 * R3 * ((p + (n1 + n2) / R3 - n1 / R1 - n2 / R2) * sm.h3 + 1.0 - sm.r3)
    return Measures(
        pi_s=pi_s,
        p_q=pi_s * (1.0 + queue),
        p_a=pi_s * (p * queue + 1.0),
        l=pi_s * length,
        route="approx",
        pi_blocking=pi_s * w3 * sm.r3 if params.is_finite else 0.0,
    )


def garnett_asymptotic_pq(c: float, mu: float, theta: float) -> float:
    """Large-system Erlang A queueing probability for square-root coefficient ``c``."""
    k = math.sqrt(mu / theta)
    if c == INF:
        return 0.0
    return 1.0 / (1.0 + std_normal_hazard(c * k) * mills_ratio(-c) / k)


@dataclass(frozen=True)
class RuleResult:
    """Outcome of the first-stage sizing rule ``c1plus >= z``."""

    n1: float
    theta1: float
    bound: float      # unrounded solution for the free parameter
    c1plus: float


def _c1plus(lam, mu, s, n1, theta1) -> float:
    return (s * mu + n1 * theta1 - lam) / math.sqrt(lam * theta1)


def capacity_rule(lam: float, mu: float, s: int, z: float,
                  theta1: Optional[float] = None, n1: Optional[int] = None) -> RuleResult:
    """Smallest first-stage capacity (given ``theta1``) or reneging rate (given
    ``n1``) that makes the first stage reach ``z`` standard deviations above
    the mean queue.

    Exactly one of ``theta1`` and ``n1`` is given.  Only meaningful when the
    servers alone are overloaded (``lam > s*mu``).
    """
    if (theta1 is None) == (n1 is None):
        raise QueueModelError("give exactly one of theta1 and n1")
    if not z > 0:
        raise QueueModelError(f"threshold z must be positive, got {z!r}")
    overload = lam - s * mu
    if overload <= 0:
        raise NotHeavyTraffic(f"lam={lam} does not exceed s*mu={s * mu}; rule does not apply")
    if theta1 is not None:
        bound = (z * math.sqrt(lam * theta1) + overload) / theta1
        n = max(math.ceil(bound), 0)
        # guard against a ceil pushed one step too far by rounding
        if n > 0 and _c1plus(lam, mu, s, n - 1, theta1) >= z:
            n -= 1
        return RuleResult(n, theta1, bound, _c1plus(lam, mu, s, n, theta1))
    if n1 <= 0:
        raise QueueModelError("with n1 = 0 no reneging rate satisfies the rule")
    zl = z * math.sqrt(lam)
    x = (zl + math.sqrt(zl * zl + 4.0 * n1 * overload)) / (2.0 * n1)
    theta = x * x
    while _c1plus(lam, mu, s, n1, theta) < z:
        theta = math.nextafter(theta, INF)
    return RuleResult(n1, theta, theta, _c1plus(lam, mu, s, n1, theta))
