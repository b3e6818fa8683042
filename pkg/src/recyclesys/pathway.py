"""Myopic transformation path in fixed year steps.

The target year is first solved on its own and kept as reference. The path
then solves each step year in order. Every step sees the CO2 cap of its
year, the secondary availability implied by all production written so far,
and capacity bounds from surviving vintages plus a build corridor. After a
step, capacity beyond the surviving stock is committed as a new vintage and
the step's production is written to the inflow ledger for the years the
step stands for.

Capacity costs are charged on the capacity a step operates. Existing
vintages therefore only widen the feasible set; they are not sunk costs.
This keeps each step a plain instance of the single-year problem.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .dataset import Dataset
from .errors import ConfigurationError, DomainError, PathwayError
from .formulation import (
    DEFAULT_SEGMENTS,
    RecyclingPolicy,
    YearProblem,
    YearSummary,
    build_year_lp,
    recycled_products,
    summarize,
)
from .mfa import InflowLedger
from .simplex import LpSolution, solve
from .system import DEFAULT_DISCOUNT_RATE, Technology
from .tsa import TypicalPeriodSet

DEFAULT_ANCHORS = {2030: 0.55, 2050: 0.95}
DEFAULT_STEPS = tuple(range(2020, 2051, 5))
DEFAULT_CORRIDOR_SHARE = 0.2


@dataclass(frozen=True, eq=False)
class CapSchedule:
    """CO2 caps as reductions against a base-year emission level."""

    base: float
    anchors: Mapping[int, float] = field(default_factory=lambda: dict(DEFAULT_ANCHORS))

    def __post_init__(self):
        if not self.base >= 0:
            raise DomainError(f"base emissions must be >= 0, got {self.base}")
        if not self.anchors:
            raise DomainError("cap schedule needs at least one anchor")
        years = sorted(self.anchors)
        prev = -math.inf
        for y in years:
            r = self.anchors[y]
            if not 0 <= r <= 1:
                raise DomainError(f"reduction {r} in {y} outside [0, 1]")
            if r < prev:
                raise DomainError(f"reduction decreases at {y}")
            prev = r
        object.__setattr__(self, "anchors", {int(y): float(self.anchors[y]) for y in years})

    @property
    def span(self) -> tuple[int, int]:
        years = list(self.anchors)
        return years[0], years[-1]

    def reduction(self, year: int) -> float:
        lo, hi = self.span
        if not lo <= year <= hi:
            raise DomainError(f"year {year} outside the cap schedule {lo}..{hi}")
        years = list(self.anchors)
        return float(np.interp(year, years, [self.anchors[y] for y in years]))


def interpolate_caps(sched: CapSchedule, year: int) -> float:
    """Cap of ``year``: base times one minus the interpolated reduction."""
    return sched.base * (1.0 - sched.reduction(year))


@dataclass(frozen=True, eq=False)
class CapacityVintage:
    """Built capacity per technology as (build year, capacity) pairs."""

    entries: Mapping[str, tuple[tuple[int, float], ...]] = field(default_factory=dict)

    def of(self, tech_id: str) -> tuple[tuple[int, float], ...]:
        return tuple(self.entries.get(tech_id, ()))

    def available(self, tech: Technology, year: int) -> float:
        return sum(c for b, c in self.of(tech.id) if b <= year < b + tech.lifetime)

    def retired_between(self, tech: Technology, after: int, upto: int) -> float:
        """Capacity whose retirement year lies in (after, upto]."""
        return sum(c for b, c in self.of(tech.id) if after < b + tech.lifetime <= upto and b <= after)

    def with_build(self, tech_id: str, year: int, capacity: float) -> "CapacityVintage":
        if not capacity >= 0:
            raise DomainError(f"negative build {capacity} for {tech_id!r}")
        entries = {k: tuple(v) for k, v in self.entries.items()}
        entries[tech_id] = entries.get(tech_id, ()) + ((int(year), float(capacity)),)
        return CapacityVintage(entries)


def retire_and_bound(
    vintages: CapacityVintage,
    tech: Technology,
    year: int,
    max_build_rate: float,
    step_length: int = 5,
    policy: RecyclingPolicy | None = None,
    recycling: bool = False,
) -> tuple[float, float]:
    """Surviving capacity and the most that may be built in this step.

    ``max_build_rate`` is capacity per year; the bound covers
    ``step_length`` years. Nothing may be built before the first available
    year, and from the phase-out year on neither old nor new capacity counts.
    """
    if not max_build_rate >= 0:
        raise DomainError(f"max_build_rate must be >= 0, got {max_build_rate}")
    if tech.phase_out_year is not None and year >= tech.phase_out_year:
        return 0.0, 0.0
    available = vintages.available(tech, year)
    first = tech.first_available_year
    if policy is not None and recycling and policy.effective_from is not None and first > policy.effective_from:
        first = policy.effective_from
    if year < first:
        return available, 0.0
    return available, max_build_rate * step_length


@dataclass(frozen=True, eq=False)
class PathwayConfig:
    """Inputs of a pathway run besides the dataset.

    ``corridor_share`` limits builds per step to that share of the larger of
    the reference-year capacity and the first step's capacity, on top of
    replacing what retired since the previous step. Allowance left unused in
    one step carries over to later ones, so a route the myopic steps ignore
    early on can still ramp up once a tighter cap needs it. ``None`` removes
    the corridor.
    """

    cap_schedule: CapSchedule
    policy: RecyclingPolicy = field(default_factory=RecyclingPolicy)
    periods: TypicalPeriodSet = field(default_factory=TypicalPeriodSet.single)
    import_prices: Mapping[str, float] = field(default_factory=dict)
    scrap_prices: Mapping[str, float] = field(default_factory=dict)
    corridor_share: float | None = DEFAULT_CORRIDOR_SHARE
    discount_rate: float = DEFAULT_DISCOUNT_RATE
    segments: int = DEFAULT_SEGMENTS


@dataclass(frozen=True, eq=False)
class StepResult:
    year: int
    cap: float
    problem: YearProblem
    solution: LpSolution
    summary: YearSummary
    available: Mapping[str, float]
    committed: Mapping[str, float]
    retired: Mapping[str, float]
    capacity_upper: Mapping[str, float]


@dataclass(frozen=True, eq=False)
class PathwayResult:
    steps: tuple[StepResult, ...]
    reference: StepResult
    vintages: CapacityVintage
    ledger: InflowLedger

    @property
    def years(self) -> list[int]:
        return [s.year for s in self.steps]

    def step(self, year: int) -> StepResult:
        for s in self.steps:
            if s.year == year:
                return s
        raise KeyError(year)

    @property
    def emissions(self) -> dict[int, float]:
        return {s.year: s.summary.emissions for s in self.steps}

    @property
    def annual_costs(self) -> dict[int, float]:
        return {s.year: s.solution.objective for s in self.steps}


def _check_steps(steps: Sequence[int], sched: CapSchedule | None = None) -> list[int]:
    steps = [int(y) for y in steps]
    if not steps:
        raise ConfigurationError("pathway needs at least one step")
    if any(b <= a for a, b in zip(steps, steps[1:])):
        raise ConfigurationError("pathway steps must be strictly increasing")
    if sched is not None:
        lo, hi = sched.span
        if steps[0] < lo or steps[-1] > hi:
            raise ConfigurationError(f"cap schedule covers {lo}..{hi} but steps run {steps[0]}..{steps[-1]}")
    return steps


def _block(steps: list[int], i: int) -> range:
    """Years a step stands for: up to the next step, or one year at the end."""
    end = steps[i + 1] if i + 1 < len(steps) else steps[i] + 1
    return range(steps[i], end)


def _proxy_ledger(dataset: Dataset, steps: list[int]) -> InflowLedger:
    """Ledger with demand written for every step block, as the path would."""
    ledger = dataset.ledger
    for m in sorted(ledger.stocks):
        products = recycled_products(dataset.graph, m) or [m]
        for i, y in enumerate(steps[:-1]):
            q = sum(dataset.graph.demands.quantity(c, y) for c in products)
            for yr in _block(steps, i):
                ledger = ledger.with_inflow(m, yr, q)
    return ledger


def _problem(dataset: Dataset, cfg: PathwayConfig, year: int, ledger: InflowLedger, upper) -> YearProblem:
    return YearProblem(
        year=year,
        graph=dataset.graph,
        cap=interpolate_caps(cfg.cap_schedule, year),
        availability=dataset.availabilities(year, ledger),
        policy=cfg.policy,
        periods=cfg.periods,
        base_year_rates=dataset.base_year_rates,
        capacity_upper=upper,
        import_prices=cfg.import_prices,
        scrap_prices=cfg.scrap_prices,
        import_emission_factors=dataset.import_emission_factors,
        discount_rate=cfg.discount_rate,
        segments=cfg.segments,
    )


def solve_year(problem: YearProblem) -> tuple[LpSolution, YearSummary]:
    """Build and solve one year; raises PathwayError unless optimal."""
    lp = build_year_lp(problem)
    sol = solve(lp)
    if not sol.optimal:
        raise PathwayError(
            f"{problem.year}: {sol.status.value}"
            + (f" (rows: {', '.join(sol.infeasible_rows[:8])})" if sol.infeasible_rows else ""),
            year=problem.year,
            status=sol.status,
            rows=sol.infeasible_rows,
        )
    return sol, summarize(problem, lp, sol)


def solve_reference(dataset: Dataset, cfg: PathwayConfig, steps: Sequence[int] = DEFAULT_STEPS) -> StepResult:
    """Stand-alone solve of the last step year."""
    steps = _check_steps(steps, cfg.cap_schedule)
    year = steps[-1]
    problem = _problem(dataset, cfg, year, _proxy_ledger(dataset, steps), {})
    sol, summary = solve_year(problem)
    return StepResult(year, problem.cap, problem, sol, summary, {}, {}, {}, {})


def run_pathway(dataset: Dataset, cfg: PathwayConfig, steps: Sequence[int] = DEFAULT_STEPS) -> PathwayResult:
    """Solve the reference year, then every step in ascending order."""
    steps = _check_steps(steps, cfg.cap_schedule)
    g = dataset.graph
    reference = solve_reference(dataset, cfg, steps)
    recycling = set(g.recycling_technologies())

    ledger = dataset.ledger
    vintages = CapacityVintage()
    results: list[StepResult] = []
    corridor_base: dict[str, float] = {}
    allowance: dict[str, float] = {}
    prev_year = None
    for i, year in enumerate(steps):
        step_length = steps[i] - steps[i - 1] if i else 0
        available, upper, retired = {}, {}, {}
        for tid in sorted(g.technologies):
            tech = g.technologies[tid]
            corridor = i > 0 and cfg.corridor_share is not None
            rate = cfg.corridor_share * corridor_base[tid] / step_length if corridor else math.inf
            avail, bound = retire_and_bound(vintages, tech, year, rate, max(step_length, 1), cfg.policy, tid in recycling)
            available[tid] = avail
            retired[tid] = vintages.retired_between(tech, prev_year, year) if prev_year is not None else 0.0
            if corridor:
                allowance[tid] = allowance.get(tid, 0.0) + bound
                replace = retired[tid] if bound > 0 else 0.0
                upper[tid] = avail + replace + allowance[tid]
        problem = _problem(dataset, cfg, year, ledger, upper)
        sol, summary = solve_year(problem)

        committed = {}
        for tid, cap in summary.capacities.items():
            new = max(0.0, cap - available[tid])
            if new > 1e-9 * max(1.0, cap):
                vintages = vintages.with_build(tid, year, new)
                committed[tid] = new
                if tid in allowance:
                    allowance[tid] = max(0.0, allowance[tid] - new)
        for m in sorted(ledger.stocks):
            produced = _production(summary, g, m)
            for yr in _block(steps, i):
                ledger = ledger.with_inflow(m, yr, produced)
        if i == 0:
            for tid in g.technologies:
                corridor_base[tid] = max(
                    reference.summary.capacities.get(tid, 0.0), summary.capacities.get(tid, 0.0)
                )
        results.append(
            StepResult(year, problem.cap, problem, sol, summary, available, committed, retired, upper)
        )
        prev_year = year
    return PathwayResult(tuple(results), reference, vintages, ledger)


def _production(summary: YearSummary, g, material: str) -> float:
    products = recycled_products(g, material) or [material]
    total = 0.0
    for c in products:
        for tid in g.producers(c):
            total += summary.activities[tid] * g.technologies[tid].outputs[c]
    return max(total, 0.0)


# -- serialization ------------------------------------------------------------


def _write(path: Path, header, rows):
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _f(x: float) -> str:
    return f"{x:.10g}"


def write_pathway(result: PathwayResult, directory: str | Path) -> None:
    """Per-year tables: capacities, flows, emissions, recycling rates, duals."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    cap_rows, flow_rows, em_rows, rate_rows, dual_rows = [], [], [], [], []
    for s in result.steps:
        sm = s.summary
        for tid in sorted(sm.capacities):
            cap_rows.append(
                [s.year, tid, _f(sm.capacities[tid]), _f(s.available.get(tid, 0.0)), _f(s.committed.get(tid, 0.0))]
            )
        for tid in sorted(sm.activities):
            flow_rows.append([s.year, "activity", tid, _f(sm.activities[tid])])
        for c in sorted(sm.imports):
            flow_rows.append([s.year, "import", c, _f(sm.imports[c])])
        for c in sorted(sm.secondary):
            flow_rows.append([s.year, "secondary", c, _f(sm.secondary[c])])
        for c in sorted(sm.energy_use):
            flow_rows.append([s.year, "energy_use", c, _f(sm.energy_use[c])])
        em_rows.append([s.year, _f(sm.emissions), _f(s.cap), _f(s.solution.objective)])
        for m in sorted(sm.recycling_rates):
            rate_rows.append([s.year, m, _f(sm.recycling_rates[m]), _f(sm.secondary_production[m])])
        for name in sorted(s.solution.dual):
            if name == "co2_cap" or "][" not in name:
                dual_rows.append([s.year, name, _f(s.solution.dual[name])])
    _write(d / "capacities.csv", ["year", "technology", "capacity", "available", "committed"], cap_rows)
    _write(d / "flows.csv", ["year", "kind", "name", "quantity"], flow_rows)
    _write(d / "emissions.csv", ["year", "emissions", "cap", "annual_cost"], em_rows)
    _write(d / "recycling_rates.csv", ["year", "material", "rate", "secondary_production"], rate_rows)
    _write(d / "duals.csv", ["year", "constraint", "dual"], dual_rows)
