"""Nonautonomous evolution systems, product formulas, averaging, and
periodic orbits of damped wave sections.

Layers, bottom up:

    linop      matrix/vector validation, exponentials, resolvents
    semigroup  contraction semigroups and product-formula limits
    evolsys    frozen-coefficient evolution systems R(t, s)
    mild       variation-of-constants solver and period-map fixed points
    degree     Brouwer degree (regular-value method) + winding oracle
    averaging  averaged pairs, branching sweeps, degree equality
    wave       damped wave Galerkin sections, eta metrics, energy law
    exprlang   arithmetic expressions for config-supplied coefficients
    catalog    shipped example models
    cli        experiment runner (the `evolver` entry point)
"""

from .errors import (
    ConfigError,
    ConvergenceError,
    DegenerateFixedPointError,
    DegenerateZeroError,
    EvolverError,
    InadmissibleRegionError,
    InvalidInputError,
    InvalidMetricError,
    OracleFailureError,
    PreconditionError,
    ResourceLimitError,
    SingularResolventError,
)
from .linop import as_matrix, as_vector, mat_exp, operator_norm, resolvent
from .semigroup import (
    ChernoffScheme,
    ChernoffSequence,
    ContractionSemigroup,
    ConvergenceTable,
    chernoff_defect,
    chernoff_power_limit,
    chernoff_sum_limit,
    dissipativity_rate,
    exponential_scheme,
    metric_cholesky,
    metric_norm,
    metric_operator_norm,
    resolvent_scheme,
)
from .evolsys import (
    EvolutionSystem,
    GeneratorFamily,
    build_evolution,
    cocycle_defect,
    contraction_check,
    evolution_apply,
    family_continuity_gap,
    scale_family,
    shift_family,
    validate_family,
)
from .mild import (
    FixedPointResult,
    NonlinearField,
    Trajectory,
    fixed_point,
    mild_solve,
    sigma_apply,
    translate,
)
from .degree import (
    DegreeReport,
    Region,
    brouwer_degree,
    deg_hat,
    winding_number_2d,
)
from .averaging import (
    AveragedField,
    AveragingDegreeReport,
    AveragingRow,
    BranchingReport,
    BranchingRow,
    average_field,
    average_generator,
    averaged_pair,
    averaging_degree_check,
    branching_experiment,
    monodromy,
    mu_rescale,
    unit_eigenvalue_gap,
)
from .wave import (
    EnergyReport,
    EtaMetric,
    EtaSelection,
    NondegeneracyReport,
    NondegeneracyRow,
    WaveModel,
    WavePeriodicResult,
    build_wave_model,
    energy_residual,
    eta_inner,
    eta_metric_matrix,
    eta_norm,
    find_periodic_wave,
    linear_nondegeneracy,
    nonlinear_field,
    project_nonlinearity,
    select_eta,
    spectral_invariance_gap,
)
from .exprlang import ExprError, eval_expr, format_expr, free_vars, parse_expr
from .catalog import CatalogModel, get_model, list_models, model_from_config

__version__ = "0.1.0"

__all__ = [
    "AveragedField",
    "AveragingDegreeReport",
    "AveragingRow",
    "BranchingReport",
    "BranchingRow",
    "CatalogModel",
    "ChernoffScheme",
    "ChernoffSequence",
    "ConfigError",
    "ContractionSemigroup",
    "ConvergenceError",
    "ConvergenceTable",
    "DegenerateFixedPointError",
    "DegenerateZeroError",
    "DegreeReport",
    "EnergyReport",
    "EtaMetric",
    "EtaSelection",
    "EvolutionSystem",
    "EvolverError",
    "ExprError",
    "FixedPointResult",
    "GeneratorFamily",
    "InadmissibleRegionError",
    "InvalidInputError",
    "InvalidMetricError",
    "NondegeneracyReport",
    "NondegeneracyRow",
    "NonlinearField",
    "OracleFailureError",
    "PreconditionError",
    "Region",
    "ResourceLimitError",
    "SingularResolventError",
    "Trajectory",
    "WaveModel",
    "WavePeriodicResult",
    "as_matrix",
    "as_vector",
    "average_field",
    "average_generator",
    "averaged_pair",
    "averaging_degree_check",
    "branching_experiment",
    "brouwer_degree",
    "build_evolution",
    "build_wave_model",
    "chernoff_defect",
    "chernoff_power_limit",
    "chernoff_sum_limit",
    "cocycle_defect",
    "contraction_check",
    "deg_hat",
    "dissipativity_rate",
    "energy_residual",
    "eta_inner",
    "eta_metric_matrix",
    "eta_norm",
    "eval_expr",
    "evolution_apply",
    "exponential_scheme",
    "family_continuity_gap",
    "find_periodic_wave",
    "fixed_point",
    "format_expr",
    "free_vars",
    "get_model",
    "linear_nondegeneracy",
    "list_models",
    "mat_exp",
    "metric_cholesky",
    "metric_norm",
    "metric_operator_norm",
    "mild_solve",
    "model_from_config",
    "monodromy",
    "mu_rescale",
    "nonlinear_field",
    "operator_norm",
    "parse_expr",
    "project_nonlinearity",
    "resolvent",
    "resolvent_scheme",
    "scale_family",
    "select_eta",
    "shift_family",
    "sigma_apply",
    "spectral_invariance_gap",
    "translate",
    "unit_eigenvalue_gap",
    "validate_family",
    "winding_number_2d",
]
