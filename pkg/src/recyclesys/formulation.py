"""Linear program of one optimization year.

Variable names
--------------
``cap[t]``                 capacity of technology ``t`` (annual reference output)
``act[t]``, ``act[t][p,h]`` annual or per-step output of ``t``
``imp[c]``, ``imp[c][p,h]`` imports of ``c``
``sec[c]``, ``sec[c][p,h]`` purchased secondary commodity ``c``
``chg[t][p,h]``, ``lvl[t][p,h]``  storage charging and state of charge
``seg[t][i]``              capacity segment ``i`` of the convex cost surrogate

Row names
---------
``capacity[t]``, ``capacity[t][p,h]``  activity within available capacity
``balance[c]``, ``balance[c][p,h]``    supply minus use equals demand
``co2_cap``                            system emissions within the cap
``scrap[m]``                           secondary use within forecast availability
``recycling_rate[m]``                  fixed recycled share of production
``storage[t][p,h]``                    state-of-charge continuity
``segments[t]``                        segment sum equals capacity

Energy carriers are balanced in every representative step. Materials are
storable goods and are balanced once per year; technologies whose reference
commodity is a material run at a flat rate and draw their energy inputs
uniformly over all steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import ConfigurationError, DomainError
from .program import EQ, GE, LE, LinearProgram
from .simplex import LpSolution
from .system import (
    DEFAULT_DISCOUNT_RATE,
    ENERGY,
    SystemGraph,
    Technology,
    capacity_cost,
)
from .tsa import SUMS_TO_ONE, TypicalPeriodSet

FIXED_AT_RATE = "fixed_at_rate"
FORBIDDEN = "forbidden"
BOUNDED_BY_AVAILABILITY = "bounded_by_availability"
POLICY_MODES = (FIXED_AT_RATE, FORBIDDEN, BOUNDED_BY_AVAILABILITY)

DEFAULT_SEGMENTS = 4


@dataclass(frozen=True, eq=False)
class RecyclingPolicy:
    """How recycling routes may be used.

    ``rates`` applies to ``fixed_at_rate`` and overrides the base-year rates
    passed to the builder. ``effective_from`` moves the first available year
    of recycling technologies that are not yet built today.
    """

    mode: str = BOUNDED_BY_AVAILABILITY
    rates: Mapping[str, float] = field(default_factory=dict)
    effective_from: int | None = None

    def __post_init__(self):
        if self.mode not in POLICY_MODES:
            raise ConfigurationError(f"unknown recycling policy {self.mode!r}")
        for m, r in self.rates.items():
            if not 0 <= r <= 1:
                raise DomainError(f"recycling rate {r} for {m!r} outside [0, 1]")


@dataclass(frozen=True, eq=False)
class YearProblem:
    """Everything needed to build the LP of one year.

    Parameters
    ----------
    year : int
    cap : float or None
        CO2 cap in tonnes; ``None`` or ``inf`` omits the emission row.
    graph : SystemGraph
    availability : mapping material -> effective secondary quantity
        Values may be floats or objects with an ``effective`` attribute.
    policy : RecyclingPolicy
    periods : TypicalPeriodSet
    base_year_rates : mapping material -> fraction
        Used by ``fixed_at_rate`` for materials without an explicit rate.
    capacity_upper : mapping technology -> capacity
        Extra upper bounds, e.g. from vintages and build corridors.
    reference_capacities : mapping technology -> capacity
        Width basis of the cost segments; see ``add_piecewise_invest_cost``.
    import_prices, scrap_prices : mapping
        Price overrides by commodity id and by material respectively.
    import_emission_factors : mapping commodity -> tCO2 per unit imported
        Carbon content of imported feedstock; zero unless given.
    """

    year: int
    graph: SystemGraph
    cap: float | None = None
    availability: Mapping[str, object] = field(default_factory=dict)
    policy: RecyclingPolicy = field(default_factory=RecyclingPolicy)
    periods: TypicalPeriodSet = field(default_factory=TypicalPeriodSet.single)
    base_year_rates: Mapping[str, float] = field(default_factory=dict)
    capacity_upper: Mapping[str, float] = field(default_factory=dict)
    reference_capacities: Mapping[str, float] = field(default_factory=dict)
    import_prices: Mapping[str, float] = field(default_factory=dict)
    scrap_prices: Mapping[str, float] = field(default_factory=dict)
    import_emission_factors: Mapping[str, float] = field(default_factory=dict)
    discount_rate: float = DEFAULT_DISCOUNT_RATE
    segments: int = DEFAULT_SEGMENTS

    def __post_init__(self):
        if self.cap is not None and not self.cap >= 0:
            raise DomainError(f"CO2 cap must be >= 0, got {self.cap}")

    @property
    def has_cap(self) -> bool:
        return self.cap is not None and math.isfinite(self.cap)

    def effective_availability(self, material: str) -> float:
        try:
            v = self.availability[material]
        except KeyError:
            raise ConfigurationError(
                f"{self.year}: no secondary availability for {material!r}"
            ) from None
        return float(getattr(v, "effective", v))

    def available(self, tech: Technology) -> bool:
        """Whether the technology may hold capacity in this year."""
        first = first_year(self.graph, self.policy, tech)
        if self.year < first:
            return False
        if tech.phase_out_year is not None and self.year >= tech.phase_out_year:
            return False
        return True


def first_year(g: SystemGraph, policy: RecyclingPolicy, tech: Technology) -> int:
    """First year a technology may hold capacity under ``policy``.

    ``effective_from`` only moves recycling routes that are not available yet.
    """
    first = tech.first_available_year
    eff = policy.effective_from
    if eff is not None and first > eff and tech.id in g.recycling_technologies():
        return eff
    return first


# -- naming -----------------------------------------------------------------


def step_label(p: int, h: int) -> str:
    return f"{p},{h}"


def steps_of(periods: TypicalPeriodSet) -> list[tuple[str, float]]:
    """(label, weight) of every representative step."""
    return [
        (step_label(p, h), float(w))
        for p, w in enumerate(periods.weights)
        for h in range(periods.period_length)
    ]


def _var(prefix: str, name: str, step: str | None = None) -> str:
    return f"{prefix}[{name}]" if step is None else f"{prefix}[{name}][{step}]"


def is_stepped(g: SystemGraph, commodity: str) -> bool:
    return g.commodity(commodity).kind == ENERGY


def tech_is_stepped(g: SystemGraph, tech: Technology) -> bool:
    return is_stepped(g, tech.reference_commodity)


def activity_terms(g: SystemGraph, periods: TypicalPeriodSet, tech_id: str) -> dict[str, float]:
    """Annual output of a technology as a linear combination of LP variables."""
    tech = g.technology(tech_id)
    if not tech_is_stepped(g, tech):
        return {_var("act", tech_id): 1.0}
    return {_var("act", tech_id, s): w for s, w in steps_of(periods)}


def _series(g: SystemGraph, periods: TypicalPeriodSet, profile_id: str) -> np.ndarray:
    """Per-step values of a profile on the representative steps."""
    if profile_id in periods.representatives:
        return np.asarray(periods.series(profile_id), dtype=float)
    profile = g.profiles[profile_id]
    n = periods.k * periods.period_length
    if profile.normalization == SUMS_TO_ONE:
        # spread the annual total evenly
        return np.full(n, profile.values.sum() / periods.steps_per_year)
    return np.full(n, profile.values.mean())


def _availability(g: SystemGraph, periods: TypicalPeriodSet, tech: Technology) -> np.ndarray:
    n = periods.k * periods.period_length
    if isinstance(tech.availability, str):
        return _series(g, periods, tech.availability)
    return np.full(n, float(tech.availability))


def _demand_shares(g: SystemGraph, periods: TypicalPeriodSet, commodity: str) -> np.ndarray:
    """Per-step fraction of annual demand; weighted sum is 1."""
    n = periods.k * periods.period_length
    pid = g.demands.profiles.get(commodity)
    if pid is None:
        return np.full(n, 1.0 / periods.steps_per_year)
    shares = _series(g, periods, pid)
    total = float(periods.step_weights() @ shares)
    if total <= 0:
        raise ConfigurationError(f"demand profile {pid!r} of {commodity!r} has no mass")
    return shares / total


def estimate_reference_capacity(problem: YearProblem, tech: Technology) -> float | None:
    """Capacity that would cover the direct demand of the reference commodity."""
    if problem.reference_capacities.get(tech.id):
        return float(problem.reference_capacities[tech.id])
    if tech.reference_capacity:
        return float(tech.reference_capacity)
    if tech.max_capacity:
        return float(tech.max_capacity)
    demand = problem.graph.demands.quantity(tech.reference_commodity, problem.year)
    if demand <= 0:
        return None
    mean_avail = float(_availability(problem.graph, problem.periods, tech).mean())
    if mean_avail <= 0:
        return None
    return demand / mean_avail


# -- builder ----------------------------------------------------------------


def build_year_lp(p: YearProblem) -> LinearProgram:
    """Cost-minimizing LP of one year; see the module docstring for names."""
    g = p.graph
    lp = LinearProgram()
    steps = steps_of(p.periods)
    W = float(p.periods.steps_per_year)
    secondary = set(g.secondary_commodities())
    recycling_techs = set(g.recycling_technologies())

    # supply terms per balance row: row name -> {var: coef}
    rows: dict[str, dict[str, float]] = {}

    def balance(c: str, s: str | None) -> dict[str, float]:
        return rows.setdefault(_var("balance", c, s), {})

    def add_flow(c: str, coefs_by_step: Mapping[str | None, tuple[str, float]]):
        for s, (var, coef) in coefs_by_step.items():
            row = balance(c, s)
            row[var] = row.get(var, 0.0) + coef

    for c in sorted(g.commodities):
        if is_stepped(g, c):
            for s, _ in steps:
                balance(c, s)
        else:
            balance(c, None)

    emission_terms: dict[str, float] = {}

    for tid in sorted(g.technologies):
        tech = g.technologies[tid]
        cap_var = _var("cap", tid)
        upper = math.inf
        if tech.max_capacity is not None:
            upper = tech.max_capacity
        if tid in p.capacity_upper:
            upper = min(upper, float(p.capacity_upper[tid]))
        if not p.available(tech):
            upper = 0.0
        cost = capacity_cost(tech, p.discount_rate)
        lp.add_variable(cap_var, 0.0, upper, cost)

        if tech_is_stepped(g, tech):
            avail = _availability(g, p.periods, tech)
            for i, (s, w) in enumerate(steps):
                a = _var("act", tid, s)
                lp.add_variable(a, 0.0, math.inf, w * tech.variable_cost)
                lp.add_constraint(_var("capacity", tid, s), {a: 1.0, cap_var: -avail[i] / W}, LE, 0.0)
                for c, v in tech.outputs.items():
                    add_flow(c, _flow_slots(g, c, s, a, v, w))
                if not tech.is_storage:
                    for c, v in tech.inputs.items():
                        add_flow(c, _flow_slots(g, c, s, a, -v, w))
                if tech.emission_factor:
                    emission_terms[a] = emission_terms.get(a, 0.0) + w * tech.emission_factor
            if tech.is_storage:
                _add_storage(lp, tech, p.periods, W, add_flow)
        else:
            a = _var("act", tid)
            avail = float(_availability(g, p.periods, tech).mean())
            lp.add_variable(a, 0.0, math.inf, tech.variable_cost)
            lp.add_constraint(_var("capacity", tid), {a: 1.0, cap_var: -avail}, LE, 0.0)
            for c, v in tech.outputs.items():
                add_flow(c, _flat_slots(g, c, steps, a, v, W))
            for c, v in tech.inputs.items():
                add_flow(c, _flat_slots(g, c, steps, a, -v, W))
            if tech.emission_factor:
                emission_terms[a] = emission_terms.get(a, 0.0) + tech.emission_factor

    # imports and secondary supply
    scrap_rows: dict[str, dict[str, float]] = {}
    for cid in sorted(g.commodities):
        com = g.commodities[cid]
        slots = [(s, w) for s, w in steps] if is_stepped(g, cid) else [(None, 1.0)]
        if com.importable:
            price = float(p.import_prices.get(cid, com.import_price))
            ef = float(p.import_emission_factors.get(cid, 0.0))
            for s, w in slots:
                v = _var("imp", cid, s)
                lp.add_variable(v, 0.0, math.inf, w * price)
                balance(cid, s)[v] = 1.0
                if ef:
                    emission_terms[v] = w * ef
        if cid in secondary:
            m = com.secondary_of
            price = float(p.scrap_prices.get(m, com.scrap_price))
            used = any(g.technologies[t].consumes(cid) for t in recycling_techs)
            limit = p.effective_availability(m) if used else 0.0
            if limit < 0:
                raise DomainError(f"negative secondary availability for {m!r}")
            for s, w in slots:
                v = _var("sec", cid, s)
                lp.add_variable(v, 0.0, math.inf, w * price)
                balance(cid, s)[v] = 1.0
                scrap_rows.setdefault(m, {})[v] = w
            scrap_rows.setdefault(m, {})
            scrap_rows[m]["__limit__"] = limit

    for name, coefs in rows.items():
        c, s = _split_balance(name)
        demand = g.demands.quantity(c, p.year)
        if s is None:
            rhs = demand
        else:
            shares = _demand_shares(g, p.periods, c)
            rhs = demand * shares[_step_index(p.periods, s)]
        lp.add_constraint(name, coefs, EQ, rhs)

    if p.has_cap:
        lp.add_constraint("co2_cap", emission_terms, LE, float(p.cap))

    for m in sorted(scrap_rows):
        coefs = dict(scrap_rows[m])
        limit = coefs.pop("__limit__")
        lp.add_constraint(_var("scrap", m), coefs, LE, limit)

    for v in lp.variables:
        if v.cost < 0:
            raise DomainError(f"negative objective coefficient on {v.name!r}")

    if p.segments > 1:
        for tid in sorted(g.technologies):
            tech = g.technologies[tid]
            if tech.invest_cost <= 0 or tech.invest_cost_band <= 0:
                continue
            if lp.variable(_var("cap", tid)).upper == 0:
                continue
            ref = estimate_reference_capacity(p, tech)
            if ref is None:
                continue
            add_piecewise_invest_cost(
                lp, tech, p.segments, reference_capacity=ref, discount_rate=p.discount_rate
            )

    add_recycling_policy(lp, p.policy, p.base_year_rates, g, p.periods)
    return lp


def _flow_slots(g, c, s, var, coef, w):
    """Flow of a stepped technology into the balance of ``c``."""
    if is_stepped(g, c):
        return {s: (var, coef)}
    # material produced or used by an energy technology counts annually
    return {None: (var, coef * w)}


def _flat_slots(g, c, steps, var, coef, W):
    """Flow of an annual technology, spread evenly over steps for energy."""
    if not is_stepped(g, c):
        return {None: (var, coef)}
    return {s: (var, coef / W) for s, _ in steps}


def _add_storage(lp, tech, periods, W, add_flow):
    """Charge, state-of-charge and cyclic continuity rows, cyclic per period."""
    tid = tech.id
    c = tech.reference_commodity
    loss = tech.inputs.get(c, 1.0)
    cap_var = _var("cap", tid)
    L = periods.period_length
    for p_idx in range(periods.k):
        for h in range(L):
            s = step_label(p_idx, h)
            ch = _var("chg", tid, s)
            lv = _var("lvl", tid, s)
            lp.add_variable(ch, 0.0, math.inf, 0.0)
            lp.add_variable(lv, 0.0, math.inf, 0.0)
            lp.add_constraint(_var("level", tid, s), {lv: 1.0, cap_var: -tech.storage_hours / W}, LE, 0.0)
            add_flow(c, {s: (ch, -loss)})
    for p_idx in range(periods.k):
        for h in range(L):
            s = step_label(p_idx, h)
            prev = step_label(p_idx, (h - 1) % L)
            coefs = {_var("lvl", tid, s): 1.0, _var("lvl", tid, prev): -1.0,
                     _var("chg", tid, s): -1.0, _var("act", tid, s): 1.0}
            if L == 1:
                coefs = {_var("chg", tid, s): -1.0, _var("act", tid, s): 1.0}
            lp.add_constraint(_var("storage", tid, s), coefs, EQ, 0.0)


def _split_balance(name: str) -> tuple[str, str | None]:
    inner = name[len("balance["):]
    c, _, rest = inner.partition("]")
    if rest:
        return c, rest[1:-1]
    return c, None


def _step_index(periods: TypicalPeriodSet, label: str) -> int:
    p, h = (int(x) for x in label.split(","))
    return p * periods.period_length + h


# -- modifiers --------------------------------------------------------------


def segment_cost_factors(segments: int, band: float) -> np.ndarray:
    """Multipliers of the flat capacity cost for each segment, rising linearly.

    ``segments=2, band=0.2`` gives ``[0.9, 1.1]``.
    """
    if segments < 1:
        raise DomainError(f"segments must be >= 1, got {segments}")
    if not band >= 0:
        raise DomainError(f"cost band must be >= 0, got {band}")
    i = np.arange(segments)
    return 1.0 - band + band * (2 * i + 1) / segments


def add_piecewise_invest_cost(
    lp: LinearProgram,
    tech: Technology,
    segments: int,
    reference_capacity: float | None = None,
    band: float | None = None,
    discount_rate: float = DEFAULT_DISCOUNT_RATE,
) -> LinearProgram:
    """Replace the flat capacity cost of ``tech`` by a convex staircase.

    Capacity is split into ``segments`` pieces whose unit costs rise from
    ``1 - band`` to ``1 + band`` times the flat cost. All but the last piece
    are ``reference_capacity / segments`` wide; the last is unbounded. With
    ``band=0`` or one segment the objective is unchanged. Modifies ``lp`` in
    place and returns it.
    """
    band = tech.invest_cost_band if band is None else band
    factors = segment_cost_factors(segments, band)
    cap_var = _var("cap", tech.id)
    flat = lp.variable(cap_var).cost
    if flat == 0 and tech.invest_cost > 0:
        flat = capacity_cost(tech, discount_rate)
    if segments == 1 or band == 0:
        return lp
    if reference_capacity is None:
        reference_capacity = tech.reference_capacity or tech.max_capacity
    if not reference_capacity or reference_capacity <= 0:
        raise DomainError(f"{tech.id}: segment widths need a positive reference capacity")
    width = reference_capacity / segments
    link = {cap_var: -1.0}
    for i, f in enumerate(factors):
        name = f"seg[{tech.id}][{i}]"
        upper = width if i < segments - 1 else math.inf
        lp.add_variable(name, 0.0, upper, flat * f)
        link[name] = 1.0
    lp.add_constraint(_var("segments", tech.id), link, EQ, 0.0)
    lp.update_variable(cap_var, cost=0.0)
    return lp


def recycled_products(g: SystemGraph, material: str) -> list[str]:
    """Commodities produced by the recycling routes of ``material``."""
    return sorted({g.technologies[t].reference_commodity for t in g.recycling_technologies(material)})


def add_recycling_policy(
    lp: LinearProgram,
    policy: RecyclingPolicy,
    base_year_rates: Mapping[str, float] | None,
    graph: SystemGraph,
    periods: TypicalPeriodSet,
) -> LinearProgram:
    """Apply a recycling policy to a year LP in place and return it.

    ``fixed_at_rate`` adds, per material, an annual equality between recycled
    and total production of the recycled products. ``forbidden`` bounds
    recycling capacity, activity and secondary purchases to zero.
    ``bounded_by_availability`` adds nothing: the secondary availability rows
    already limit recycling.
    """
    base_year_rates = base_year_rates or {}
    for m, r in base_year_rates.items():
        if not 0 <= r <= 1:
            raise DomainError(f"recycling rate {r} for {m!r} outside [0, 1]")
    if policy.mode == BOUNDED_BY_AVAILABILITY:
        return lp
    if policy.mode == FORBIDDEN:
        for m in graph.recycled_materials():
            for tid in graph.recycling_technologies(m):
                for name in [_var("cap", tid), *activity_terms(graph, periods, tid)]:
                    if lp.has_variable(name):
                        lp.update_variable(name, lower=0.0, upper=0.0)
            for c in graph.secondary_commodities(m):
                for v in list(lp.variables):
                    if v.name == _var("sec", c) or v.name.startswith(_var("sec", c) + "["):
                        lp.update_variable(v.name, lower=0.0, upper=0.0)
        return lp

    for m in graph.recycled_materials():
        if m in policy.rates:
            rate = float(policy.rates[m])
        elif m in base_year_rates:
            rate = float(base_year_rates[m])
        else:
            raise ConfigurationError(f"fixed recycling rate for {m!r} not given")
        if not 0 <= rate <= 1:
            raise DomainError(f"recycling rate {rate} for {m!r} outside [0, 1]")
        recycled = set(graph.recycling_technologies(m))
        coefs: dict[str, float] = {}
        for product in recycled_products(graph, m):
            for tid in graph.producers(product):
                out = graph.technologies[tid].outputs[product]
                share = (1.0 if tid in recycled else 0.0) - rate
                for var, w in activity_terms(graph, periods, tid).items():
                    coefs[var] = coefs.get(var, 0.0) + share * out * w
        lp.add_constraint(_var("recycling_rate", m), coefs, EQ, 0.0)
    return lp


# -- reading solutions ------------------------------------------------------


@dataclass(frozen=True)
class YearSummary:
    """Annual quantities read from an optimal year solution."""

    year: int
    objective: float
    capacities: Mapping[str, float]
    activities: Mapping[str, float]
    imports: Mapping[str, float]
    secondary: Mapping[str, float]
    emissions: float
    recycling_rates: Mapping[str, float]
    secondary_production: Mapping[str, float]
    energy_use: Mapping[str, float]
    cap_dual: float | None


def _annual(sol: LpSolution, periods: TypicalPeriodSet, prefix: str, name: str, stepped: bool) -> float:
    if stepped:
        return sum(w * sol.primal.get(_var(prefix, name, s), 0.0) for s, w in steps_of(periods))
    return sol.primal.get(_var(prefix, name), 0.0)


def summarize(p: YearProblem, lp: LinearProgram, sol: LpSolution) -> YearSummary:
    """Capacities, annual flows, emissions and recycling rates of a solution."""
    g = p.graph
    acts = {tid: _annual(sol, p.periods, "act", tid, tech_is_stepped(g, g.technologies[tid])) for tid in sorted(g.technologies)}
    caps = {tid: sol.primal.get(_var("cap", tid), 0.0) for tid in sorted(g.technologies)}
    imports = {
        c: _annual(sol, p.periods, "imp", c, is_stepped(g, c))
        for c in sorted(g.commodities)
        if g.commodities[c].importable
    }
    secondary = {
        c: _annual(sol, p.periods, "sec", c, is_stepped(g, c)) for c in g.secondary_commodities()
    }
    emissions = sum(acts[t] * g.technologies[t].emission_factor for t in acts)
    emissions += sum(imports.get(c, 0.0) * ef for c, ef in p.import_emission_factors.items())

    rates, recycled_out = {}, {}
    for m in g.recycled_materials():
        recycled = set(g.recycling_technologies(m))
        total = rec = 0.0
        for product in recycled_products(g, m):
            for tid in g.producers(product):
                out = acts[tid] * g.technologies[tid].outputs[product]
                total += out
                if tid in recycled:
                    rec += out
        recycled_out[m] = rec
        rates[m] = rec / total if total > 0 else 0.0

    energy_use: dict[str, float] = {}
    for tid, a in acts.items():
        for c, v in g.technologies[tid].inputs.items():
            if g.commodities[c].kind == ENERGY:
                energy_use[c] = energy_use.get(c, 0.0) + v * a
    cap_dual = sol.dual.get("co2_cap") if p.has_cap else None
    if cap_dual is not None and abs(cap_dual) < 1e-9:
        cap_dual = 0.0
    return YearSummary(
        year=p.year,
        objective=sol.objective,
        capacities=caps,
        activities=acts,
        imports=imports,
        secondary=secondary,
        emissions=emissions,
        recycling_rates=rates,
        secondary_production=recycled_out,
        energy_use=dict(sorted(energy_use.items())),
        cap_dual=cap_dual,
    )
