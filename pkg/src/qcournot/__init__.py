"""Asymmetric Cournot duopoly with heterogeneous evaluation schemes and its
coherent-state (beam-splitter) simulation."""

from .classical_game import (
    ClassicalQuantities,
    CountDistribution,
    classical_payoffs,
    classical_payoffs_mandel_form,
    firm2_advantage,
    general_nash,
    mandel_q,
    poisson_case_equilibrium,
)
from .quantum_payoff import (
    GamePoint,
    LossChannel,
    StrategyPair,
    apply_loss,
    compensate_loss,
    mix_amplitudes,
    mode_intensities,
    photon_count_pmf,
    quantum_payoffs_closed,
    quantum_payoffs_mc,
    quantum_payoffs_series,
)
from .equilibrium_solver import (
    Branch,
    EquilibriumResult,
    Firm,
    best_response,
    closed_form_nash,
    nash_payoffs,
    numeric_nash,
    transition_gamma,
)
from .analysis import (
    AsymmetryMeasures,
    GridSpec,
    Region,
    SweepTable,
    asymmetry_measures,
    boundary_values,
    classify_region,
    payoff_sum_diff,
    scaled_diff,
    sweep,
)

__version__ = "0.1.0"
