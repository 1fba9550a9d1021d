"""Exact and approximate performance measures for a multi-server queue whose
waiting customers renege at a rate that depends on their queue stage."""

from .approx import (
    NormalParams,
    RuleResult,
    approx_measures,
    approx_measures_three_stage,
    approx_subchain_summary,
    capacity_rule,
    garnett_asymptotic_pq,
    normal_params,
)
from .errors import *  # noqa: F401,F403
from .exact import (
    corollary_l_from_pq,
    corollary_pa_from_pq,
    exact_measures,
    exact_subchain_summary,
)
from .measures import Measures, SubchainSummary
from .model import INF, ModelParams, StateRates, ThreeStageParams, rates_at, validate
from .oracle import (
    SimEstimate,
    StationaryDistribution,
    linear_measures,
    measures_from_distribution,
    simulate,
    solve_stationary,
)

__version__ = "0.1.0"
