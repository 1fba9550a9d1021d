"""Exact performance measures assembled from the decomposed subchains."""
from __future__ import annotations

import math

from .errors import ThetaMismatch
from .measures import Measures, SubchainSummary
from .model import ModelParams, is_infinite
from .numerics import reneging_tail_integral

_RESCALE_AT = 1e280


def inverse_erlang_b(lam: float, mu: float, s: int) -> float:
    """``sum_{k<=s} R^k/k! / (R^s/s!)`` with ``R = lam/mu``, i.e. one over the
    Erlang B blocking probability, by the recursion ``I_k = 1 + (k/R) I_{k-1}``."""
    R = lam / mu
    inv = 1.0
    for k in range(1, s + 1):
        inv = 1.0 + inv * (k / R)
    return inv


def stage_sums(lam: float, base_rate: float, theta: float, n: int) -> tuple:
    """Product-form sums over one finite reneging stage.

    Returns ``(log S, log T)`` where ``S = sum_{k=0}^{n} prod_{j<=k} lam/(base_rate + j*theta)``
    and ``T`` is the last product (``k = n``).  Running values are rescaled when
    they pass ``1e280`` so long stages cannot overflow.
    """
    log_scale = 0.0
    term = 1.0
    total = 1.0
    for j in range(1, n + 1):
        term *= lam / (base_rate + j * theta)
        total += term
        if total > _RESCALE_AT:
            log_scale += math.log(total)
            term /= total
            total = 1.0
    log_term = math.log(term) + log_scale if term > 0.0 else -math.inf
    return math.log(total) + log_scale, log_term


def _stage(lam: float, base_rate: float, theta: float, n) -> tuple:
    """``(1/pi_head - 1, pi_tail/pi_head)`` of a stage whose head drains at ``base_rate``."""
    if n == 0:
        return 0.0, 1.0
    if is_infinite(n):
        return reneging_tail_integral(base_rate, theta, lam) - 1.0, 0.0
    log_sum, log_last = stage_sums(lam, base_rate, theta, n)
    return math.expm1(log_sum), math.exp(log_last)


def exact_subchain_summary(params: ModelParams) -> SubchainSummary:
    lam, mu, s = params.lam, params.mu, params.s
    inv0 = inverse_erlang_b(lam, mu, s)
    rate = s * mu
    hs, rs = [], []
    for n, theta in params.stages():
        h, r = _stage(lam, rate, theta, n)
        hs.append(h)
        rs.append(r)
        if not is_infinite(n):
            rate += n * theta
    extra = {}
    if len(hs) > 2:
        extra = {"h3": hs[2], "r3": rs[2]}
    return SubchainSummary(inv0, hs[0], hs[1], rs[0], rs[1], params.p, "exact", **extra)


def exact_measures(params: ModelParams) -> Measures:
    """Exact ``pi_s``, ``P_Q``, ``P_A`` and ``L`` for any valid two-stage queue."""
    sm = exact_subchain_summary(params)
    return measures_from_summary(params, sm, route="exact")


def measures_from_summary(params: ModelParams, sm: SubchainSummary, route: str) -> Measures:
    """Combine subchain quantities into the four measures.

    Works for both the exact and the normal-representation summaries, and for
    any number of stages: stage ``i`` enters with weight ``r_1 ... r_{i-1}``.
    """
    lam, p = params.lam, sm.p
    hs = [sm.h1, sm.h2] + ([sm.h3] if sm.h3 is not None else [])
    rs = [sm.r1, sm.r2] + ([sm.r3] if sm.r3 is not None else [])
    caps, thetas = params.capacities, params.thetas

    queue_part = 0.0   # sum_i w_i h_i
    length = 0.0       # L / pi_s
    weight = 1.0       # r_1 ... r_{i-1}
    waiting_before = 0.0
    drain_shift = 0.0  # sum_{j<i} n_j (theta_i - theta_j) / lam
    for i, (h, r, n, theta) in enumerate(zip(hs, rs, caps, thetas)):
        if weight == 0.0:
            break
        if i > 0:
            drain_shift = sum(caps[j] * (theta - thetas[j]) for j in range(i)) / lam
        queue_part += weight * h
        length += weight * (lam / theta) * ((p + drain_shift) * h + 1.0 - r)
        weight *= r
    inv_pi_s = sm.inv_pi_s0 + queue_part
    pi_s = 1.0 / inv_pi_s
    blocking = pi_s * weight if params.is_finite else 0.0
    return Measures(
        pi_s=pi_s,
        p_q=pi_s * (1.0 + queue_part),
        p_a=pi_s * (p * queue_part + 1.0),
        l=pi_s * length,
        route=route,
        pi_blocking=blocking,
    )


def corollary_pa_from_pq(params: ModelParams, p_q: float, pi_s: float) -> float:
    """Abandonment probability from the queueing probability: ``p (P_Q - pi_s) + pi_s``."""
    return params.p * (p_q - pi_s) + pi_s


def corollary_l_from_pq(params: ModelParams, p_q: float, pi_s: float, pi_block: float) -> float:
    """Mean queue length from ``P_Q`` when both stages renege at the same rate."""
    if params.theta1 != params.theta2:
        raise ThetaMismatch(f"theta1={params.theta1} differs from theta2={params.theta2}")
    return params.lam / params.theta1 * (params.p * (p_q - pi_s) + pi_s - pi_block)
