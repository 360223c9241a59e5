"""Robust distortion risk premiums for heavy-tailed losses.

Tail-index estimation (Hill and t-Hill), Reiss-Thomas threshold choice,
extrapolated proportional-hazards premiums with asymptotic confidence
intervals, Pareto-type loss models and a Monte Carlo study engine.
"""
__version__ = "0.1.0"

from .errors import EstimationError, HeavinessConditionViolated, ParameterDomainViolated
from .models import Lomax, ParetoMixture, StrictPareto, sample_model, true_premium
from .premium import (
    DualPower,
    Identity,
    PremiumEstimate,
    ProportionalHazards,
    confidence_interval,
    empirical_premium,
    premium_general,
    premium_ph_hill,
    premium_ph_thill,
    sigma_squared,
)
from .tail_estimation import (
    LossSample,
    TailIndexEstimate,
    estimate_gamma,
    hill_estimator,
    sort_sample,
    t_hill_estimator,
    weissman_quantile,
)
from .threshold import ThresholdSelection, reiss_thomas_select
from .montecarlo import SimulationStudy, run_study
