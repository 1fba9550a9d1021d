"""Parameters and birth-death transition rates of the multi-stage reneging queue.

Customers arrive at rate ``lam`` and are served FIFO by ``s`` servers at rate
``mu`` each.  Waiting positions ``1..n1`` renege at rate ``theta1`` per
customer, positions ``n1+1..n1+n2`` at ``theta2``.  An arrival that finds
``s + n1 + n2`` customers present is blocked.  Capacities are non-negative
integers or ``math.inf``.

Rates carry no units; any consistent time unit works.
"""
from __future__ import annotations

import math
import numbers
from dataclasses import dataclass, replace
from typing import Iterator, Union

from .errors import (
    CapacityNotFinite,
    InfiniteFirstStageWithSecond,
    InvalidCapacity,
    NonPositiveRate,
)

Capacity = Union[int, float]  # float only ever holds math.inf

INF = math.inf


class InvalidServerCount(InvalidCapacity):
    pass


def _check_rate(name: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise NonPositiveRate(f"{name} must be a real number, got {value!r}")
    value = float(value)
    if not (value > 0.0 and math.isfinite(value)):
        raise NonPositiveRate(f"{name} must be positive and finite, got {value!r}")
    return value


def _check_capacity(name: str, value) -> Capacity:
    if isinstance(value, bool):
        raise InvalidCapacity(f"{name} must be an integer or inf, got {value!r}")
    if isinstance(value, numbers.Integral):
        if value < 0:
            raise InvalidCapacity(f"{name} must be non-negative, got {value!r}")
        return int(value)
    if isinstance(value, numbers.Real) and value == INF:
        return INF
    raise InvalidCapacity(f"{name} must be a non-negative integer or inf, got {value!r}")


def is_infinite(n: Capacity) -> bool:
    return n == INF


@dataclass(frozen=True)
class ModelParams:
    """Validated two-stage reneging queue.  Immutable; build with :func:`validate`
    or the constructor (both validate)."""

    lam: float
    mu: float
    s: int
    n1: Capacity
    n2: Capacity
    theta1: float
    theta2: float

    def __post_init__(self):
        set_ = object.__setattr__
        for name in ("lam", "mu", "theta1", "theta2"):
            set_(self, name, _check_rate(name, getattr(self, name)))
        if isinstance(self.s, bool) or not isinstance(self.s, numbers.Integral) or self.s < 1:
            raise InvalidServerCount(f"s must be an integer >= 1, got {self.s!r}")
        set_(self, "s", int(self.s))
        for name in ("n1", "n2"):
            set_(self, name, _check_capacity(name, getattr(self, name)))
        self._check_stage_order()

    def _check_stage_order(self):
        caps = self.capacities
        for i, n in enumerate(caps[:-1]):
            if is_infinite(n) and any(m != 0 for m in caps[i + 1:]):
                raise InfiniteFirstStageWithSecond(
                    f"stage {i + 1} has infinite capacity but a later stage has positive capacity"
                )

    @property
    def capacities(self) -> tuple:
        return (self.n1, self.n2)

    @property
    def thetas(self) -> tuple:
        return (self.theta1, self.theta2)

    @property
    def is_finite(self) -> bool:
        return not any(is_infinite(n) for n in self.capacities)

    @property
    def max_state(self) -> Capacity:
        """Largest reachable state ``s + n1 + n2`` (``inf`` when unbounded)."""
        return self.s + sum(self.capacities)

    @property
    def offered_load(self) -> float:
        return self.lam / self.mu

    @property
    def p(self) -> float:
        """Abandonment fraction when all servers are always busy: ``1 - s*mu/lam``."""
        return 1.0 - self.s * self.mu / self.lam

    def stages(self) -> Iterator[tuple]:
        """Yield ``(capacity, theta)`` for each waiting stage in order."""
        return zip(self.capacities, self.thetas)

    def with_(self, **changes) -> "ModelParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class ThreeStageParams(ModelParams):
    """Two-stage parameters plus a third waiting stage of ``n3`` places at ``theta3``."""

    n3: Capacity = 0
    theta3: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "theta3", _check_rate("theta3", self.theta3))
        object.__setattr__(self, "n3", _check_capacity("n3", self.n3))
        super().__post_init__()

    @property
    def capacities(self) -> tuple:
        return (self.n1, self.n2, self.n3)

    @property
    def thetas(self) -> tuple:
        return (self.theta1, self.theta2, self.theta3)

    def two_stage(self) -> ModelParams:
        return ModelParams(self.lam, self.mu, self.s, self.n1, self.n2, self.theta1, self.theta2)


@dataclass(frozen=True)
class StateRates:
    arrival: float
    departure: float


def validate(lam, mu, s, n1, n2, theta1, theta2) -> ModelParams:
    """Validate the seven primitives; raises a :class:`QueueModelError` subclass."""
    return ModelParams(lam, mu, s, n1, n2, theta1, theta2)


def departure_rate(params: ModelParams, k: int) -> float:
    """Total departure rate (service plus reneging) in state ``k``."""
    s = params.s
    if k <= 0:
        return 0.0
    if k <= s:
        return k * params.mu
    rate = s * params.mu
    waiting = k - s
    for n, theta in params.stages():
        if waiting <= n:
            return rate + waiting * theta
        rate += n * theta
        waiting -= n
    return 0.0


def rates_at(params: ModelParams, k: int) -> StateRates:
    """Arrival and departure rate in state ``k`` of the full chain."""
    if not params.is_finite:
        raise CapacityNotFinite("state enumeration needs finite capacities")
    if isinstance(k, bool) or not isinstance(k, numbers.Integral) or k < 0:
        raise InvalidCapacity(f"state index must be a non-negative integer, got {k!r}")
    top = params.max_state
    arrival = params.lam if k < top else 0.0
    return StateRates(arrival, departure_rate(params, k))


def reneging_rate(params: ModelParams, k: int) -> float:
    """Departure rate in state ``k`` that is due to reneging, not service."""
    return departure_rate(params, k) - min(k, params.s) * params.mu if k <= params.max_state else 0.0
