"""Independent ground truth for the closed-form routes.

Two oracles: a stationary solve of the full (finite) birth-death chain, and a
customer-level discrete-event simulation.  Neither uses the subchain
decomposition.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats
from scipy.special import logsumexp

from .errors import (
    CapacityNotFinite,
    InvalidHorizon,
    OracleMismatch,
    TooLarge,
    ZeroReplications,
)
from .measures import Measures
from .model import ModelParams, departure_rate, reneging_rate

MAX_STATES = 10_000_000
DENSE_CHECK_MAX = 5_000
RNG_ALGORITHM = "numpy Philox4x64-10, key from SeedSequence(entropy=[seed, replication])"


@dataclass(frozen=True)
class StationaryDistribution:
    probs: np.ndarray
    params: ModelParams
    log_probs: np.ndarray = None   # natural logs; exact where probs underflow

    @property
    def states(self) -> int:
        return len(self.probs)


def _rates(params: ModelParams):
    top = int(params.max_state)
    k = np.arange(top + 1)
    birth = np.where(k < top, params.lam, 0.0)
    death = np.array([departure_rate(params, int(j)) for j in k])
    return birth, death


def _dense_solve(birth: np.ndarray, death: np.ndarray) -> np.ndarray:
    n = len(birth)
    Q = np.zeros((n, n))
    idx = np.arange(n - 1)
    Q[idx, idx + 1] = birth[:-1]
    Q[idx + 1, idx] = death[1:]
    Q[np.arange(n), np.arange(n)] = -Q.sum(axis=1)
    A = Q.T.copy()
    A[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    return np.linalg.solve(A, b)


def solve_stationary(params: ModelParams, check: bool = True) -> StationaryDistribution:
    """Stationary law of the full chain ``0..s+n1+n2``.

    Solved by the log-space birth-death recursion; for chains up to
    ``DENSE_CHECK_MAX`` states the result is also checked against a dense
    solve of the global balance equations.
    """
    if not params.is_finite:
        raise CapacityNotFinite("the stationary solve needs finite capacities")
    n_states = params.max_state + 1
    if n_states > MAX_STATES:
        raise TooLarge(f"{n_states} states exceeds the cap of {MAX_STATES}")
    birth, death = _rates(params)
    log_ratio = np.log(birth[:-1]) - np.log(death[1:])
    log_pi = np.concatenate(([0.0], np.cumsum(log_ratio)))
    log_pi = log_pi - logsumexp(log_pi)
    probs = np.exp(log_pi)
    if check and n_states <= DENSE_CHECK_MAX:
        dense = _dense_solve(birth, death)
        gap = float(np.max(np.abs(dense - probs)))
        if gap > 1e-9:
            raise OracleMismatch(f"recursion and dense solve differ by {gap:.3e}")
    return StationaryDistribution(probs, params, log_pi)


def measures_from_distribution(dist: StationaryDistribution) -> Measures:
    """Read ``pi_s``, ``P_Q``, ``P_A``, ``L`` directly off a stationary law."""
    params, probs = dist.params, dist.probs
    s = params.s
    k = np.arange(len(probs))
    queue = np.clip(k - s, 0, None)
    reneging = np.array([reneging_rate(params, int(j)) for j in k])
    abandon = float(reneging @ probs) + params.lam * float(probs[-1])
    return Measures(
        pi_s=float(probs[s]) if s < len(probs) else 0.0,
        p_q=float(probs[s:].sum()),
        p_a=abandon / params.lam,
        l=float(queue @ probs),
        route="oracle-linear",
        pi_blocking=float(probs[-1]),
    )


def linear_measures(params: ModelParams) -> Measures:
    return measures_from_distribution(solve_stationary(params))


# -- simulation ----------------------------------------------------------------

@dataclass(frozen=True)
class ReplicationStats:
    """Raw tallies of one replication over the observation window."""

    arrivals: int
    found_busy: int
    reneged: int
    blocked: int
    time_queue: float        # integral of number waiting
    time_busy: float         # integral of busy servers
    time_at_s: float         # time with exactly s present
    time_stage: tuple        # integral of occupancy per waiting stage
    window: float
    events: int

    def measures(self) -> tuple:
        """``(pi_s, P_Q, P_A, L)`` for this replication."""
        arrivals = max(self.arrivals, 1)
        return (self.time_at_s / self.window, self.found_busy / arrivals,
                (self.reneged + self.blocked) / arrivals, self.time_queue / self.window)


@dataclass(frozen=True)
class SimEstimate:
    measures: Measures
    half_widths: dict        # keys pi_s, p_q, p_a, l
    events: int
    seed: int
    replications: tuple      # ReplicationStats, in replication order

    @property
    def mean_busy(self) -> float:
        return float(np.mean([r.time_busy / r.window for r in self.replications]))

    @property
    def mean_stage_occupancy(self) -> tuple:
        per = np.array([[t / r.window for t in r.time_stage] for r in self.replications])
        return tuple(per.mean(axis=0))

    @property
    def reneging_rate(self) -> float:
        return float(np.mean([r.reneged / r.window for r in self.replications]))


def replication_rng(seed: int, replication: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, replication])))


def _run_replication(params: ModelParams, warmup: float, horizon: float,
                     seed: int, index: int) -> ReplicationStats:
    rng = replication_rng(seed, index)
    lam, mu, s = params.lam, params.mu, params.s
    caps = params.capacities
    thetas = params.thetas
    room = sum(caps)
    n_stages = len(caps)

    queue = []          # arrival times of waiting customers, head first
    busy = 0
    t = 0.0
    arrivals = found_busy = reneged = blocked = events = 0
    t_queue = t_busy = t_at_s = 0.0
    t_stage = [0.0] * n_stages

    batch = 8192
    uniforms = []
    pos = batch

    while True:
        if pos + 3 > len(uniforms):
            uniforms = rng.random(batch).tolist()
            pos = 0
        waiting = len(queue)
        occupancy = []
        rest = waiting
        for n in caps:
            m = rest if rest < n else n
            occupancy.append(m)
            rest -= m
        renege_rates = [m * th for m, th in zip(occupancy, thetas)]
        total = lam + busy * mu + sum(renege_rates)
        dt = -math.log(1.0 - uniforms[pos]) / total
        u_event = uniforms[pos + 1] * total
        u_pick = uniforms[pos + 2]
        pos += 3

        t_next = t + dt
        lo = t if t > warmup else warmup
        hi = t_next if t_next < horizon else horizon
        if hi > lo:
            span = hi - lo
            t_queue += waiting * span
            t_busy += busy * span
            if busy == s and waiting == 0:
                t_at_s += span
            for i in range(n_stages):
                t_stage[i] += occupancy[i] * span
        if t_next >= horizon:
            break
        t = t_next
        counting = t >= warmup
        events += 1

        if u_event < lam:
            if counting:
                arrivals += 1
            if busy < s:
                busy += 1
            else:
                if counting:
                    found_busy += 1
                if waiting < room:
                    queue.append(t)
                elif counting:
                    blocked += 1
            continue
        u_event -= lam
        if u_event < busy * mu:
            if queue:
                queue.pop(0)
            else:
                busy -= 1
            continue
        u_event -= busy * mu
        if not waiting:     # round-off overshoot with nobody to renege
            continue
        offset = 0
        for i in range(n_stages):
            if occupancy[i] and (u_event < renege_rates[i] or offset + occupancy[i] == waiting):
                j = offset + min(int(u_pick * occupancy[i]), occupancy[i] - 1)
                del queue[j]
                if counting:
                    reneged += 1
                break
            u_event -= renege_rates[i]
            offset += occupancy[i]

    return ReplicationStats(arrivals, found_busy, reneged, blocked, t_queue, t_busy,
                            t_at_s, tuple(t_stage), horizon - warmup, events)


def default_threads() -> int:
    return int(os.environ.get("TWOSTAGE_THREADS", "1"))


def simulate(params: ModelParams, warmup: float = 100.0, horizon: float = 1100.0,
             seed: int = 0, replications: int = 30, threads: int | None = None,
             min_events: int = 0) -> SimEstimate:
    """Estimate the four measures by independent replications with 95% CIs.

    Waiting customers at positions ``1..n1`` renege at ``theta1`` and those
    further back at ``theta2``; because patience is exponential, switching a
    customer's rate as it crosses the stage boundary is exact.
    """
    if not (0.0 <= warmup < horizon) or not math.isfinite(horizon):
        raise InvalidHorizon(f"need 0 <= warmup < horizon < inf, got {warmup}, {horizon}")
    if replications < 2:
        raise ZeroReplications(f"need at least 2 replications, got {replications}")
    threads = default_threads() if threads is None else threads
    args = [(params, warmup, horizon, seed, i) for i in range(replications)]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            reps = list(pool.map(_run_replication, *zip(*args)))
    else:
        reps = [_run_replication(*a) for a in args]

    table = np.array([r.measures() for r in reps])
    means = table.mean(axis=0)
    sem = table.std(axis=0, ddof=1) / math.sqrt(replications)
    half = stats.t.ppf(0.975, replications - 1) * sem
    names = ("pi_s", "p_q", "p_a", "l")
    events = sum(r.events for r in reps)
    if events < min_events:
        raise InvalidHorizon(f"only {events} events processed, fewer than {min_events}")
    return SimEstimate(
        measures=Measures(*map(float, means), route="oracle-sim"),
        half_widths=dict(zip(names, map(float, half))),
        events=events,
        seed=seed,
        replications=tuple(reps),
    )
