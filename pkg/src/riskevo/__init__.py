"""Evolutionary dynamics of disaster-risk strategies in finite populations.

The engine computes expected-utility payoffs for three ways of handling
disaster risk (informal risk-sharing pool, index insurance, no
insurance), turns them into state-dependent fitness, builds the exact
imitation/mutation Markov chain over strategy configurations, and
derives stationary adoption rates, selection-gradient fields, insurer
profit, and premium optima. A Monte Carlo simulator of the identical
process serves as an independent statistical check.
"""

__version__ = "0.1.0"

from .params import ModelParams, ParameterError, Strategy, STRATEGY_ORDER, validate
from .payoffs import (OutcomePartition, PayoffTables, UtilityDomainError,
                      build_payoff_tables, index_group_utility, index_payoff,
                      index_payoff_quadrinomial, loner_payoff,
                      outcome_probability, pool_group_utility, pool_payoff,
                      utility)
from .fitness import FitnessTable, build_fitness_table, fitness_at, group_weight
from .markov import (PopulationState, SolverError, StateSpace,
                     StationaryResult, TransitionModel, adoption_rates,
                     build_kernel, fermi, gradient_field, index_to_state,
                     insurer_profit, simplex_size, solve_stationary,
                     state_index, stationary, transition_prob,
                     transition_probs)
from .montecarlo import SimConfig, SimResult, UniformStream, simulate, step_once
from .sweeps import (PremiumCurve, SweepRow, SweepSpec, argmax_strategy,
                     optimal_premium, restrict_strategies, sweep_grid)

__all__ = [
    "ModelParams", "ParameterError", "Strategy", "STRATEGY_ORDER", "validate",
    "OutcomePartition", "PayoffTables", "UtilityDomainError",
    "build_payoff_tables", "index_group_utility", "index_payoff",
    "index_payoff_quadrinomial", "loner_payoff", "outcome_probability",
    "pool_group_utility", "pool_payoff", "utility",
    "FitnessTable", "build_fitness_table", "fitness_at", "group_weight",
    "PopulationState", "SolverError", "StateSpace", "StationaryResult",
    "TransitionModel", "adoption_rates", "build_kernel", "fermi",
    "gradient_field", "index_to_state", "insurer_profit", "simplex_size",
    "solve_stationary", "state_index", "stationary", "transition_prob",
    "transition_probs",
    "SimConfig", "SimResult", "UniformStream", "simulate", "step_once",
    "PremiumCurve", "SweepRow", "SweepSpec", "argmax_strategy",
    "optimal_premium", "restrict_strategies", "sweep_grid",
    "__version__",
]
