"""Exact tournament game solutions and reinforcement urn experiments.

The library solves the symmetric zero-sum game of a tournament exactly
(optimal lottery, Bipartisan set, Top-Cycle), provides the comparison
Markov chain's closed forms and stationary distribution, simulates
seeded reinforcement urn processes with per-snapshot diagnostics, and
integrates the deterministic mean-field flow. The `maxlot` command
wires these into reproducible experiments.
"""

__version__ = "0.1.0"

from .chain import ChainState, chain_step, iterate, p2, p3, stationary
from .config import ConfigError, ExperimentConfig, resolve_tournament
from .diagnostics import (DiagnosticsContext, EpsilonBound, drift_three,
                          drift_two, epsilon, epsilon_bound,
                          harmonic_number, harmonic_sandwich, ld, ld_exact,
                          mu, variance_step)
from .flow import (FlowDivergenceError, FlowState, integrate, log_sum,
                   vector_field)
from .game import (DEFAULT_EXACT_SOLVE_LIMIT, ExactSolveLimitError,
                   OptimalStrategy, OptimalityReport, bipartisan_set,
                   mixed_payoff, optimal_strategy, payoff, payoff_against,
                   verify_optimal)
from .lottery import Lottery
from .rng import RawStream
from .tournament import (Tournament, TournamentFormatError,
                         condorcet_winner, cyclone, dumps, load, loads,
                         random_tournament, restrict, save, top_cycle)
from .urn import (ReinforcementRule, Trajectory, Urn, draw,
                  geometric_schedule, run, run_ensemble, step)

__all__ = [
    "ChainState", "ConfigError", "DEFAULT_EXACT_SOLVE_LIMIT",
    "DiagnosticsContext", "EpsilonBound", "ExactSolveLimitError",
    "ExperimentConfig", "FlowDivergenceError", "FlowState", "Lottery",
    "OptimalStrategy", "OptimalityReport", "RawStream",
    "ReinforcementRule", "Tournament", "TournamentFormatError",
    "Trajectory", "Urn", "bipartisan_set", "chain_step",
    "condorcet_winner", "cyclone", "draw", "drift_three", "drift_two",
    "dumps", "epsilon", "epsilon_bound", "geometric_schedule",
    "harmonic_number", "harmonic_sandwich", "integrate", "iterate", "ld",
    "ld_exact", "load", "loads", "log_sum", "mixed_payoff", "mu",
    "optimal_strategy", "p2", "p3", "payoff", "payoff_against",
    "random_tournament", "resolve_tournament", "restrict", "run",
    "run_ensemble", "save", "stationary", "step", "top_cycle",
    "variance_step", "vector_field", "verify_optimal", "__version__",
]
