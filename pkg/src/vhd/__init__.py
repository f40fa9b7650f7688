"""Nine-compartment vector-host model with a larvivorous fish predator.

Humans (S_h, E_h, I_h, R_h), immature mosquitoes (m_q), adult mosquitoes
(S_v, E_v, I_v) and predator fish (G).
"""

from .equilibria import (
    ConvergenceError,
    EquilibriumPoint,
    NonExistenceError,
    all_equilibria,
    boundary_equilibrium,
    solve_endemic,
)
from .integrate import IntegrationError, Trajectory, integrate
from .model import (
    DerivedRates,
    ReproductionNumber,
    forces_of_infection,
    invariant_bounds,
    r0,
    r0_components,
    rhs,
    threshold_o,
    threshold_o0,
)
from .params import (
    BASELINE,
    COMPARTMENTS,
    ModelParams,
    ParameterError,
    StateVector,
    default_params,
)
from .scenario import (
    ConfigError,
    ScenarioConfig,
    load_config,
    preset,
    read_csv,
    report_formulas,
    run,
)
from .sensitivity import SensitivityTable, sensitivity
from .stability import StabilityReport, classify, jacobian, ngm_r0, routh_hurwitz_e2

__version__ = "0.1.0"

__all__ = [
    "BASELINE",
    "COMPARTMENTS",
    "ConfigError",
    "ConvergenceError",
    "DerivedRates",
    "EquilibriumPoint",
    "IntegrationError",
    "ModelParams",
    "NonExistenceError",
    "ParameterError",
    "ReproductionNumber",
    "ScenarioConfig",
    "SensitivityTable",
    "StabilityReport",
    "StateVector",
    "Trajectory",
    "all_equilibria",
    "boundary_equilibrium",
    "classify",
    "default_params",
    "forces_of_infection",
    "integrate",
    "invariant_bounds",
    "jacobian",
    "load_config",
    "ngm_r0",
    "preset",
    "r0",
    "r0_components",
    "read_csv",
    "report_formulas",
    "rhs",
    "routh_hurwitz_e2",
    "run",
    "sensitivity",
    "solve_endemic",
    "threshold_o",
    "threshold_o0",
]
