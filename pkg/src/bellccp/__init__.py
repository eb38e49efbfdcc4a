"""Bell functionals with modular-sum events, their communication games, and
classical / entangled / prepare-transmit-measure values."""

from .functional import (
    Behavior,
    BellFunctional,
    CorrelatorTable,
    Scenario,
    Term,
    Violation,
    correlators,
    deterministic_behavior,
    evaluate_bell,
    evaluate_bell_correlator,
    inverse_correlators,
    uniform_behavior,
    validate,
)
from .fourier import OmegaFunction, convex_weights, dft_power, linear_detect
from .ccp import CcpGame, build_game, entangled_value, entangled_value_general, f_eval, linear_messaging_table
from .classical import (
    DeterministicBellStrategy,
    GuessStrategy,
    MessagingStrategy,
    bell_bound,
    bob_best_response,
    ccp_bound_free_decoding,
    ccp_bound_general,
    ccp_value_linear,
    messaging_payoff_additive,
)
from .quantum import (
    DensityMatrix,
    MeasurementSet,
    Povm,
    SeesawResult,
    born_behavior,
    check_uniform_marginals,
    measurement_best_response,
    seesaw_bell,
)
from .ptm import (
    PreparationSet,
    PtmSeesawResult,
    preparation_best_response,
    ptm_from_bell,
    ptm_value,
    seesaw_ptm,
)
from . import catalog, errors, fileio

__all__ = [
    "Behavior",
    "BellFunctional",
    "CcpGame",
    "CorrelatorTable",
    "DensityMatrix",
    "DeterministicBellStrategy",
    "GuessStrategy",
    "MeasurementSet",
    "MessagingStrategy",
    "OmegaFunction",
    "Povm",
    "PreparationSet",
    "PtmSeesawResult",
    "Scenario",
    "SeesawResult",
    "Term",
    "Violation",
    "bell_bound",
    "bob_best_response",
    "born_behavior",
    "build_game",
    "catalog",
    "ccp_bound_free_decoding",
    "ccp_bound_general",
    "ccp_value_linear",
    "check_uniform_marginals",
    "convex_weights",
    "correlators",
    "deterministic_behavior",
    "dft_power",
    "entangled_value",
    "entangled_value_general",
    "errors",
    "evaluate_bell",
    "evaluate_bell_correlator",
    "f_eval",
    "fileio",
    "inverse_correlators",
    "linear_detect",
    "linear_messaging_table",
    "measurement_best_response",
    "messaging_payoff_additive",
    "preparation_best_response",
    "ptm_from_bell",
    "ptm_value",
    "seesaw_bell",
    "seesaw_ptm",
    "uniform_behavior",
    "validate",
]
