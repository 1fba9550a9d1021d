"""Result containers shared by the exact, approximate and oracle routes."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

ROUTES = ("exact", "approx", "oracle-linear", "oracle-sim")


@dataclass(frozen=True)
class SubchainSummary:
    """Per-subchain reciprocal probabilities that feed the measure formulas.

    ``inv_pi_s0`` is ``1/pi_s`` of the loss subchain, ``h1`` and ``h2`` are
    ``1/pi - 1`` at the head of each waiting stage, ``r1`` and ``r2`` the
    tail-to-head probability ratios inside each stage, and ``p = 1 - s*mu/lam``.
    With ``route == "approx"`` the fields hold the normal-representation
    estimates instead.  ``h3``/``r3`` are only set for three-stage systems.
    """

    inv_pi_s0: float
    h1: float
    h2: float
    r1: float
    r2: float
    p: float
    route: str
    h3: Optional[float] = None
    r3: Optional[float] = None

    def contributions(self) -> dict:
        """Additive contribution of each subchain to ``1/pi_s``."""
        out = {"0": self.inv_pi_s0, "1": self.h1, "2": self.r1 * self.h2}
        if self.h3 is not None:
            out["3"] = self.r1 * self.r2 * self.h3
        return out

    def dominant(self) -> str:
        """Subchain with the largest contribution, as a label ``"0"``, ``"1"``..."""
        contrib = self.contributions()
        return max(contrib, key=contrib.get)


@dataclass(frozen=True)
class Measures:
    pi_s: float
    p_q: float
    p_a: float
    l: float
    route: str
    pi_blocking: Optional[float] = None

    def as_tuple(self) -> tuple:
        return (self.pi_s, self.p_q, self.p_a, self.l)
