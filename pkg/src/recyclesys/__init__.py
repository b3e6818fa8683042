"""Energy system optimization with endogenous recycling of industrial materials.

The package couples a cost-minimizing single-node energy and industry model
with a dynamic material flow forecast of secondary raw materials. Recycling
routes compete with primary routes inside the linear program, so recycling
rates are an outcome of the optimization rather than an input.

Main entry points
-----------------
load_dataset
    Read a dataset directory (or ``builtin:desk`` / ``builtin:sm_b``).
YearProblem, build_year_lp, solve
    Build and solve the linear program of a single year.
run_pathway
    Myopic path over five-year steps with capacity vintages.
ScenarioSpec, run_scenario, compare, sweep
    Scenario runs, comparison metrics and price sweeps.
"""

from .dataset import Dataset, builtin_datasets, load_dataset, resolve_dataset_path
from .errors import (
    ComparisonError,
    ConfigurationError,
    DomainError,
    PathwayError,
    RecyclesysError,
    SolverError,
    SolverStateError,
    UnknownNameError,
)
from .formulation import (
    BOUNDED_BY_AVAILABILITY,
    FIXED_AT_RATE,
    FORBIDDEN,
    RecyclingPolicy,
    YearProblem,
    YearSummary,
    add_piecewise_invest_cost,
    add_recycling_policy,
    build_year_lp,
    summarize,
)
from .mfa import (
    GrowthSeries,
    InflowLedger,
    ScrapAvailability,
    StockProfile,
    available_secondary,
    backfill_prepath,
    retention_fraction,
    scrap_outflow,
)
from .pathway import (
    CapacityVintage,
    CapSchedule,
    PathwayConfig,
    PathwayResult,
    interpolate_caps,
    retire_and_bound,
    run_pathway,
    solve_reference,
    write_pathway,
)
from .program import Constraint, LinearProgram, Variable
from .scenario import (
    ScenarioResult,
    ScenarioSpec,
    SweepSpec,
    abatement_metrics,
    compare,
    load_result,
    report,
    run_scenario,
    sweep,
    write_result,
)
from .simplex import LpSolution, LpStatus, dual_objective, dual_of, solve
from .system import (
    Commodity,
    DemandSet,
    SystemGraph,
    Technology,
    annualized_cost,
    direct_emissions,
    validate_system,
)
from .tsa import Profile, TypicalPeriodSet, aggregate, expand

__version__ = "0.1.0"
