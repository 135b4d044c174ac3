"""Monte Carlo laboratory for half-plane self-avoiding walks and the exact
radial SLE(8/3) statistics they are conjectured to reproduce."""

__version__ = "0.1.0"

from .constants import SAW_EXPONENTS, Exponents
from .walks import (
    enumerate_half_plane_saws,
    format_walk,
    occupancy_index,
    parse_walk,
    validate_walk,
)
from .pivot import ChainConfig, ChainState, RunReport, initial_walk, pivot_step, run_chain
from .conformal import (
    SleCdfFactors,
    angular_density_reference,
    endpoint_map,
    exact_cdf,
    factors_R,
    factors_S,
    factors_X,
    factors_Y,
)
from .observables import TransformedStats, stats_bruteforce, stats_fast, weight
from .estimators import Finalized, WalkAccumulator, default_grids, finalize, merge
from .fitting import FitResult, fit_angular_slope, fit_b_bbar, wls

__all__ = [
    "SAW_EXPONENTS",
    "Exponents",
    "enumerate_half_plane_saws",
    "format_walk",
    "occupancy_index",
    "parse_walk",
    "validate_walk",
    "ChainConfig",
    "ChainState",
    "RunReport",
    "initial_walk",
    "pivot_step",
    "run_chain",
    "SleCdfFactors",
    "angular_density_reference",
    "endpoint_map",
    "exact_cdf",
    "factors_R",
    "factors_S",
    "factors_X",
    "factors_Y",
    "TransformedStats",
    "stats_bruteforce",
    "stats_fast",
    "weight",
    "Finalized",
    "WalkAccumulator",
    "default_grids",
    "finalize",
    "merge",
    "FitResult",
    "fit_angular_slope",
    "fit_b_bbar",
    "wls",
]
