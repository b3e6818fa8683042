"""Scenarios, comparison metrics and parameter sweeps.

A scenario is a recycling policy and a cap schedule applied to a dataset.
Running it solves the myopic pathway and condenses the steps into per-year
tables and two cumulative figures:

``cumulative_cost``
    Each step's annual system cost times the number of years the step
    stands for (five for inner steps, one for the final year).
``cumulative_co2_saved``
    Emissions avoided against a trajectory that stays at the first step's
    emissions for the whole horizon, weighted the same way.

The cost of transformation is the cumulative cost minus the cost of the
same frozen first-step system over the horizon. Average abatement cost is
that difference per tonne saved; the marginal abatement cost of a year is
the shadow price of its cap row.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Mapping, Sequence

from .dataset import Dataset, load_dataset
from .errors import ComparisonError, ConfigurationError, DomainError, PathwayError, SolverError
from .formulation import DEFAULT_SEGMENTS, RecyclingPolicy, YearSummary
from .pathway import (
    DEFAULT_CORRIDOR_SHARE,
    DEFAULT_STEPS,
    CapSchedule,
    PathwayConfig,
    PathwayResult,
    run_pathway,
    solve_reference,
    write_pathway,
)
from .system import DEFAULT_DISCOUNT_RATE, ENERGY, SystemGraph
from .tsa import TypicalPeriodSet, aggregate

log = logging.getLogger(__name__)

DEFAULT_TYPICAL_PERIODS = 2
DEFAULT_PERIOD_LENGTH = 24
SWEEP_ROOTS = ("scrap_prices", "import_prices")


@dataclass(frozen=True, eq=False)
class ScenarioSpec:
    """One scenario: dataset, policy, caps, price overrides and solver settings.

    ``typical_periods=None`` keeps a single flat step per year instead of
    clustering the profiles.
    """

    name: str
    dataset: str
    cap_schedule: CapSchedule
    policy: RecyclingPolicy = field(default_factory=RecyclingPolicy)
    import_prices: Mapping[str, float] = field(default_factory=dict)
    scrap_prices: Mapping[str, float] = field(default_factory=dict)
    typical_periods: int | None = DEFAULT_TYPICAL_PERIODS
    period_length: int = DEFAULT_PERIOD_LENGTH
    steps: tuple[int, ...] = DEFAULT_STEPS
    corridor_share: float | None = DEFAULT_CORRIDOR_SHARE
    segments: int = DEFAULT_SEGMENTS
    discount_rate: float = DEFAULT_DISCOUNT_RATE

    def __post_init__(self):
        if not self.name:
            raise ConfigurationError("scenario needs a name")
        for kind in ("import_prices", "scrap_prices"):
            for k, v in getattr(self, kind).items():
                if not v >= 0:
                    raise ConfigurationError(f"{self.name}: {kind}.{k} = {v} is negative")
        if self.typical_periods is not None and self.typical_periods < 1:
            raise ConfigurationError(f"{self.name}: typical_periods must be >= 1")
        if self.corridor_share is not None and not self.corridor_share >= 0:
            raise ConfigurationError(f"{self.name}: corridor_share must be >= 0")
        object.__setattr__(self, "steps", tuple(int(y) for y in self.steps))

    def pathway_config(self, periods: TypicalPeriodSet) -> PathwayConfig:
        return PathwayConfig(
            cap_schedule=self.cap_schedule,
            policy=self.policy,
            periods=periods,
            import_prices=dict(self.import_prices),
            scrap_prices=dict(self.scrap_prices),
            corridor_share=self.corridor_share,
            discount_rate=self.discount_rate,
            segments=self.segments,
        )

    def with_parameter(self, path: str, value: float) -> "ScenarioSpec":
        """Copy with ``scrap_prices.<material>`` or ``import_prices.<commodity>`` set."""
        root, _, key = path.partition(".")
        if root not in SWEEP_ROOTS or not key:
            raise ConfigurationError(f"cannot sweep {path!r}; use one of {', '.join(r + '.<id>' for r in SWEEP_ROOTS)}")
        prices = dict(getattr(self, root))
        prices[key] = float(value)
        return dataclasses.replace(self, **{root: prices})


@lru_cache(maxsize=8)
def _load(path: str) -> Dataset:
    return load_dataset(path)


@lru_cache(maxsize=16)
def _periods(path: str, k: int | None, period_length: int) -> TypicalPeriodSet:
    profiles = list(_load(path).graph.profiles.values())
    if k is None or not profiles:
        return TypicalPeriodSet.single()
    return aggregate(profiles, k, period_length)


def prepare(spec: ScenarioSpec) -> tuple[Dataset, TypicalPeriodSet]:
    """Load the dataset and typical periods of a scenario (cached per process)."""
    path = str(spec.dataset)
    return _load(path), _periods(path, spec.typical_periods, spec.period_length)


# -- results ---------------------------------------------------------------------


def step_widths(years: Sequence[int]) -> list[int]:
    """Years each step stands for: the gap to the next step, one for the last."""
    years = list(years)
    return [b - a for a, b in zip(years, years[1:])] + [1] if years else []


def energy_accounts(g: SystemGraph, summary: YearSummary) -> dict[str, float]:
    """Primary and final energy of a solved year.

    Primary energy counts energy imports plus the output of energy
    technologies that take no energy input. Final energy counts exogenous
    energy demand plus the energy fed into material technologies.
    """
    energy = {c for c, com in g.commodities.items() if com.kind == ENERGY}
    primary = sum(summary.imports.get(c, 0.0) for c in energy)
    final = sum(g.demands.quantity(c, summary.year) for c in energy)
    for tid, act in summary.activities.items():
        t = g.technologies[tid]
        if t.reference_commodity in energy:
            if not any(c in energy for c in t.inputs):
                primary += act * sum(v for c, v in t.outputs.items() if c in energy)
        else:
            final += act * sum(v for c, v in t.inputs.items() if c in energy)
    return {"primary": primary, "final": final}


@dataclass(frozen=True, eq=False)
class ScenarioResult:
    """Per-year tables and cumulative figures of one scenario run.

    Mappings are keyed by step year. ``cap_duals`` holds the cap-row shadow
    prices as solved (non-positive); ``marginal_abatement`` flips their sign.
    ``pathway`` is only present on freshly computed results.
    """

    name: str
    years: tuple[int, ...]
    annual_costs: Mapping[int, float]
    emissions: Mapping[int, float]
    caps: Mapping[int, float]
    recycling_rates: Mapping[int, Mapping[str, float]]
    secondary_production: Mapping[int, Mapping[str, float]]
    cap_duals: Mapping[int, float | None]
    primary_energy: Mapping[int, float]
    final_energy: Mapping[int, float]
    energy_by_carrier: Mapping[int, Mapping[str, float]]
    reference_objective: float
    policy: str = ""
    pathway: PathwayResult | None = None

    @property
    def widths(self) -> list[int]:
        return step_widths(self.years)

    @property
    def cumulative_cost(self) -> float:
        return sum(w * self.annual_costs[y] for y, w in zip(self.years, self.widths))

    @property
    def baseline_emissions(self) -> float:
        return self.emissions[self.years[0]]

    @property
    def baseline_cost(self) -> float:
        return self.annual_costs[self.years[0]] * sum(self.widths)

    @property
    def transformation_cost(self) -> float:
        return self.cumulative_cost - self.baseline_cost

    @property
    def cumulative_co2_saved(self) -> float:
        e0 = self.baseline_emissions
        return sum(w * (e0 - self.emissions[y]) for y, w in zip(self.years, self.widths))

    @property
    def marginal_abatement(self) -> dict[int, float | None]:
        return {y: (None if d is None else -d) for y, d in self.cap_duals.items()}

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "policy": self.policy,
            "years": list(self.years),
            "cumulative_cost": self.cumulative_cost,
            "baseline_cost": self.baseline_cost,
            "transformation_cost": self.transformation_cost,
            "baseline_emissions": self.baseline_emissions,
            "cumulative_co2_saved": self.cumulative_co2_saved,
            "reference_objective": self.reference_objective,
            "per_year": {
                str(y): {
                    "annual_cost": self.annual_costs[y],
                    "emissions": self.emissions[y],
                    "cap": self.caps[y],
                    "cap_dual": self.cap_duals[y],
                    "primary_energy": self.primary_energy[y],
                    "final_energy": self.final_energy[y],
                    "recycling_rates": dict(self.recycling_rates[y]),
                    "secondary_production": dict(self.secondary_production[y]),
                    "energy_by_carrier": dict(self.energy_by_carrier[y]),
                }
                for y in self.years
            },
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "ScenarioResult":
        try:
            years = tuple(int(y) for y in data["years"])
            per = {int(k): v for k, v in data["per_year"].items()}

            def col(key):
                return {y: per[y][key] for y in years}

            return cls(
                name=data["name"],
                years=years,
                annual_costs=col("annual_cost"),
                emissions=col("emissions"),
                caps=col("cap"),
                recycling_rates=col("recycling_rates"),
                secondary_production=col("secondary_production"),
                cap_duals=col("cap_dual"),
                primary_energy=col("primary_energy"),
                final_energy=col("final_energy"),
                energy_by_carrier=col("energy_by_carrier"),
                reference_objective=data["reference_objective"],
                policy=data.get("policy", ""),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigurationError(f"malformed scenario summary: {exc}") from None


def condense(name: str, pathway: PathwayResult, graph: SystemGraph, policy: str = "") -> ScenarioResult:
    """Per-year tables of a finished pathway."""
    years = tuple(pathway.years)
    steps = {s.year: s for s in pathway.steps}
    energy = {y: energy_accounts(graph, steps[y].summary) for y in years}
    return ScenarioResult(
        name=name,
        years=years,
        annual_costs={y: steps[y].solution.objective for y in years},
        emissions={y: steps[y].summary.emissions for y in years},
        caps={y: steps[y].cap for y in years},
        recycling_rates={y: dict(steps[y].summary.recycling_rates) for y in years},
        secondary_production={y: dict(steps[y].summary.secondary_production) for y in years},
        cap_duals={y: steps[y].summary.cap_dual for y in years},
        primary_energy={y: energy[y]["primary"] for y in years},
        final_energy={y: energy[y]["final"] for y in years},
        energy_by_carrier={y: dict(steps[y].summary.energy_use) for y in years},
        reference_objective=pathway.reference.solution.objective,
        policy=policy,
        pathway=pathway,
    )


def run_scenario(spec: ScenarioSpec) -> ScenarioResult:
    """Solve the scenario's pathway; errors carry the scenario name."""
    dataset, periods = prepare(spec)
    try:
        pathway = run_pathway(dataset, spec.pathway_config(periods), spec.steps)
    except PathwayError as exc:
        raise PathwayError(f"scenario {spec.name!r}: {exc}", exc.year, exc.status, exc.rows) from exc
    except SolverError as exc:
        raise SolverError(f"scenario {spec.name!r}: {exc}") from exc
    return condense(spec.name, pathway, dataset.graph, spec.policy.mode)


def run_scenarios(specs: Sequence[ScenarioSpec], workers: int = 1) -> list[ScenarioResult]:
    """Run several scenarios, in parallel processes when ``workers > 1``."""
    names = [s.name for s in specs]
    if len(set(names)) != len(names):
        raise ConfigurationError(f"scenario names must be unique, got {names}")
    if workers <= 1 or len(specs) <= 1:
        return [run_scenario(s) for s in specs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_scenario, specs))


# -- metrics and comparison -------------------------------------------------------


def abatement_metrics(
    cost_delta: float, co2_saved: float, duals: Mapping[int, float | None] | None = None
) -> tuple[float, float | None]:
    """Average and terminal marginal abatement cost.

    Parameters
    ----------
    cost_delta : float
        Cost of the abatement in money.
    co2_saved : float
        Tonnes avoided; must be positive.
    duals : mapping year -> cap-row dual, optional
        Shadow prices as returned by the solver (non-positive when binding).

    Returns
    -------
    avg : float
        ``cost_delta / co2_saved``.
    marginal : float or None
        Negated dual of the last year, or ``None`` without duals.
    """
    if not co2_saved > 0:
        raise DomainError(f"abatement cost undefined for co2_saved = {co2_saved}")
    avg = cost_delta / co2_saved
    marginal = None
    if duals:
        last = duals[max(duals)]
        marginal = None if last is None else -float(last)
    return avg, marginal


@dataclass(frozen=True, eq=False)
class ComparisonRow:
    name: str
    is_reference: bool
    cumulative_cost: float
    cost_delta: float
    transformation_cost: float
    co2_saved: float
    avg_abatement: float | None
    marginal_abatement: float | None
    recycling_rates: Mapping[int, Mapping[str, float]]
    primary_energy_delta: Mapping[int, float]
    final_energy_delta: Mapping[int, float]


@dataclass(frozen=True, eq=False)
class ComparisonReport:
    reference: str
    years: tuple[int, ...]
    rows: tuple[ComparisonRow, ...]

    def row(self, name: str) -> ComparisonRow:
        for r in self.rows:
            if r.name == name:
                return r
        raise KeyError(name)

    def text(self) -> str:
        return render_comparison(self)


def compare(results: Sequence[ScenarioResult], reference: str) -> ComparisonReport:
    """Deltas of every scenario against the named reference, in input order."""
    names = [r.name for r in results]
    if len(set(names)) != len(names):
        raise ComparisonError(f"duplicate scenario names: {names}")
    by_name = {r.name: r for r in results}
    if reference not in by_name:
        raise ComparisonError(f"reference {reference!r} not among {names}")
    ref = by_name[reference]
    for r in results:
        if tuple(r.years) != tuple(ref.years):
            raise ComparisonError(f"{r.name!r} covers {list(r.years)}, reference covers {list(ref.years)}")
    rows = []
    for r in results:
        saved = r.cumulative_co2_saved
        try:
            avg, marginal = abatement_metrics(r.transformation_cost, saved, r.cap_duals)
        except DomainError:
            avg, marginal = None, abatement_metrics(0.0, 1.0, r.cap_duals)[1]
        rows.append(
            ComparisonRow(
                name=r.name,
                is_reference=r.name == reference,
                cumulative_cost=r.cumulative_cost,
                cost_delta=r.cumulative_cost - ref.cumulative_cost,
                transformation_cost=r.transformation_cost,
                co2_saved=saved,
                avg_abatement=avg,
                marginal_abatement=marginal,
                recycling_rates=r.recycling_rates,
                primary_energy_delta={y: r.primary_energy[y] - ref.primary_energy[y] for y in r.years},
                final_energy_delta={y: r.final_energy[y] - ref.final_energy[y] for y in r.years},
            )
        )
    return ComparisonReport(reference, tuple(ref.years), tuple(rows))


# -- text reports -------------------------------------------------------------------


def _num(x: float | None, fmt: str = "{:.6g}") -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "-"
    return fmt.format(x + 0.0)


def report(result: ScenarioResult) -> str:
    """Human-readable summary of one scenario; byte-stable for equal inputs."""
    lines = [
        f"scenario {result.name}",
        f"policy {result.policy or '-'}",
        f"cumulative cost {_num(result.cumulative_cost)}",
        f"transformation cost {_num(result.transformation_cost)}",
        f"co2 saved vs frozen {result.years[0]} emissions {_num(result.cumulative_co2_saved)}",
    ]
    try:
        avg, marginal = abatement_metrics(result.transformation_cost, result.cumulative_co2_saved, result.cap_duals)
        lines.append(f"avg abatement cost {_num(avg)}")
        lines.append(f"marginal abatement cost {result.years[-1]} {_num(marginal)}")
    except DomainError:
        lines.append("avg abatement cost - (no co2 saved)")
    materials = sorted({m for y in result.years for m in result.recycling_rates[y]})
    header = ["year", "annual_cost", "emissions", "cap", "marginal_abatement", "primary_energy", "final_energy"]
    header += [f"rate_{m}" for m in materials]
    lines.append("")
    lines.append(" ".join(f"{h:>18}" for h in header))
    mac = result.marginal_abatement
    for y in result.years:
        cells = [
            str(y),
            _num(result.annual_costs[y]),
            _num(result.emissions[y]),
            _num(result.caps[y]),
            _num(mac[y]),
            _num(result.primary_energy[y]),
            _num(result.final_energy[y]),
        ]
        cells += [_num(result.recycling_rates[y].get(m), "{:.4f}") for m in materials]
        lines.append(" ".join(f"{c:>18}" for c in cells))
    return "\n".join(lines) + "\n"


def render_comparison(rep: ComparisonReport) -> str:
    lines = [f"reference {rep.reference}", ""]
    header = ["scenario", "cumulative_cost", "cost_delta", "transformation", "co2_saved", "avg_abatement", "marginal_abatement"]
    lines.append(" ".join(f"{h:>18}" for h in header))
    for r in rep.rows:
        label = r.name + (" *" if r.is_reference else "")
        cells = [label, _num(r.cumulative_cost), _num(r.cost_delta), _num(r.transformation_cost),
                 _num(r.co2_saved), _num(r.avg_abatement), _num(r.marginal_abatement)]
        lines.append(" ".join(f"{c:>18}" for c in cells))
    materials = sorted({m for r in rep.rows for y in rep.years for m in r.recycling_rates[y]})
    for m in materials:
        lines += ["", f"recycling rate {m}", " ".join(f"{h:>18}" for h in ["scenario"] + [str(y) for y in rep.years])]
        for r in rep.rows:
            cells = [r.name] + [_num(r.recycling_rates[y].get(m), "{:.4f}") for y in rep.years]
            lines.append(" ".join(f"{c:>18}" for c in cells))
    for title, attr in (("primary energy delta", "primary_energy_delta"), ("final energy delta", "final_energy_delta")):
        lines += ["", title, " ".join(f"{h:>18}" for h in ["scenario"] + [str(y) for y in rep.years])]
        for r in rep.rows:
            cells = [r.name] + [_num(getattr(r, attr)[y]) for y in rep.years]
            lines.append(" ".join(f"{c:>18}" for c in cells))
    return "\n".join(lines) + "\n"


# -- output directories ----------------------------------------------------------


def write_result(result: ScenarioResult, directory: str | Path) -> Path:
    """Write tables, ``summary.json`` and ``report.txt`` into ``directory``."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    if result.pathway is not None:
        write_pathway(result.pathway, d)
    (d / "summary.json").write_text(json.dumps(result.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    (d / "report.txt").write_text(report(result), encoding="utf-8")
    return d


def load_result(directory: str | Path) -> ScenarioResult:
    """Read a result directory written by ``write_result`` (without the pathway)."""
    path = Path(directory) / "summary.json"
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigurationError(f"{path} not found") from None
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: {exc}") from None
    return ScenarioResult.from_dict(data)


# -- sweeps ----------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SweepSpec:
    """A base scenario, a price path such as ``scrap_prices.steel`` and its grid."""

    base: ScenarioSpec
    parameter: str
    grid: tuple[float, ...]
    full_pathway: bool = False

    def __post_init__(self):
        grid = tuple(float(v) for v in self.grid)
        if not grid:
            raise ConfigurationError("sweep grid is empty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigurationError("sweep grid must be strictly increasing")
        object.__setattr__(self, "grid", grid)
        self.base.with_parameter(self.parameter, grid[0])


@dataclass(frozen=True, eq=False)
class SweepPoint:
    value: float
    status: str
    message: str = ""
    objective: float | None = None
    emissions: float | None = None
    shares: Mapping[str, float] = field(default_factory=dict)
    activities: Mapping[str, float] = field(default_factory=dict)
    energy_by_carrier: Mapping[str, float] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status == "optimal"


@dataclass(frozen=True, eq=False)
class SweepResult:
    spec: SweepSpec
    year: int
    points: tuple[SweepPoint, ...]

    def shares(self, material: str) -> list[float | None]:
        return [p.shares.get(material) if p.ok else None for p in self.points]

    def monotone(self, tol: float = 1e-7) -> bool:
        """Secondary shares never rise along the grid (solved points only)."""
        for m in sorted({m for p in self.points for m in p.shares}):
            vals = [v for v in self.shares(m) if v is not None]
            if any(b > a + tol for a, b in zip(vals, vals[1:])):
                return False
        return True


def _sweep_point(args: tuple[ScenarioSpec, float, bool]) -> SweepPoint:
    spec, value, full = args
    dataset, periods = prepare(spec)
    try:
        if full:
            step = run_pathway(dataset, spec.pathway_config(periods), spec.steps).steps[-1]
        else:
            step = solve_reference(dataset, spec.pathway_config(periods), spec.steps)
    except PathwayError as exc:
        return SweepPoint(value, str(getattr(exc.status, "value", exc.status)), str(exc))
    except SolverError as exc:
        return SweepPoint(value, "solver_error", str(exc))
    sm = step.summary
    return SweepPoint(
        value=value,
        status="optimal",
        objective=step.solution.objective,
        emissions=sm.emissions,
        shares=dict(sm.recycling_rates),
        activities=dict(sm.activities),
        energy_by_carrier=dict(sm.energy_use),
    )


def sweep(spec: SweepSpec, workers: int = 1) -> SweepResult:
    """Solve the final step year (or the whole path) for every grid value.

    Infeasible points are recorded and the sweep continues.
    """
    jobs = [(spec.base.with_parameter(spec.parameter, v), v, spec.full_pathway) for v in spec.grid]
    if workers <= 1 or len(jobs) <= 1:
        points = [_sweep_point(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(_sweep_point, jobs))
    result = SweepResult(spec, spec.base.steps[-1], tuple(points))
    if not result.monotone():
        log.warning("sweep over %s: secondary share rises along the grid", spec.parameter)
    return result


def sweep_table(result: SweepResult) -> str:
    """Comma-separated table: one row per grid value."""
    pts = result.points
    materials = sorted({m for p in pts for m in p.shares})
    techs = sorted({t for p in pts for t in p.activities})
    carriers = sorted({c for p in pts for c in p.energy_by_carrier})
    header = ["value", "status", "objective", "emissions"]
    header += [f"share.{m}" for m in materials] + [f"activity.{t}" for t in techs]
    header += [f"energy.{c}" for c in carriers]
    lines = [",".join(header)]
    for p in pts:
        cells = [_num(p.value), p.status, _num(p.objective), _num(p.emissions)]
        cells += [_num(p.shares.get(m)) for m in materials]
        cells += [_num(p.activities.get(t)) for t in techs]
        cells += [_num(p.energy_by_carrier.get(c)) for c in carriers]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
