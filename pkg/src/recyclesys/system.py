"""Commodities, technologies, demands and the system graph they form."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Union

import numpy as np

from .errors import DomainError, UnknownNameError
from .tsa import Profile

ENERGY = "energy"
MATERIAL = "material"
UNIT_OF_KIND = {ENERGY: "MWh", MATERIAL: "tonne"}

DEFAULT_DISCOUNT_RATE = 0.07
DEFAULT_FIXED_OM_SHARE = 0.05
DEFAULT_COST_BAND = 0.1


@dataclass(frozen=True)
class Commodity:
    """An energy carrier or material good.

    ``secondary_of`` marks scrap and waste streams: the commodity is then
    supplied from the forecast secondary availability of that material, at
    ``scrap_price`` per unit.
    """

    id: str
    kind: str
    unit: str
    importable: bool = False
    import_price: float | None = None
    secondary_of: str | None = None
    scrap_price: float = 0.0


@dataclass(frozen=True, eq=False)
class Technology:
    """A conversion process, described per unit of reference output.

    Capacity is measured as annual output of ``reference_commodity``;
    ``invest_cost`` is per unit of that annual capacity.
    """

    id: str
    reference_commodity: str
    inputs: Mapping[str, float] = field(default_factory=dict)
    outputs: Mapping[str, float] = field(default_factory=dict)
    invest_cost: float = 0.0
    invest_cost_band: float = DEFAULT_COST_BAND
    fixed_om_share: float = DEFAULT_FIXED_OM_SHARE
    variable_cost: float = 0.0
    emission_factor: float = 0.0
    lifetime: int = 20
    max_capacity: float | None = None
    availability: Union[float, str] = 1.0
    first_available_year: int = 2020
    phase_out_year: int | None = None
    reference_capacity: float | None = None
    storage_hours: float = 0.0

    @property
    def is_storage(self) -> bool:
        return self.storage_hours > 0

    def consumes(self, commodity: str) -> bool:
        return self.inputs.get(commodity, 0.0) > 0


@dataclass(frozen=True, eq=False)
class DemandSet:
    """Exogenous annual demand per (commodity, year).

    Years between given points are interpolated linearly; outside the given
    range the nearest value is held.
    """

    quantities: Mapping[tuple[str, int], float] = field(default_factory=dict)
    profiles: Mapping[str, str] = field(default_factory=dict)

    @property
    def commodities(self) -> list[str]:
        return sorted({c for c, _ in self.quantities})

    def quantity(self, commodity: str, year: int) -> float:
        points = sorted((y, q) for (c, y), q in self.quantities.items() if c == commodity)
        if not points:
            return 0.0
        years, values = zip(*points)
        return float(np.interp(year, years, values))


@dataclass(frozen=True, eq=False)
class SystemGraph:
    commodities: Mapping[str, Commodity] = field(default_factory=dict)
    technologies: Mapping[str, Technology] = field(default_factory=dict)
    demands: DemandSet = field(default_factory=DemandSet)
    profiles: Mapping[str, Profile] = field(default_factory=dict)
    base_year_emissions: float = 0.0

    def technology(self, tech_id: str) -> Technology:
        try:
            return self.technologies[tech_id]
        except KeyError:
            raise UnknownNameError(f"unknown technology {tech_id!r}") from None

    def commodity(self, commodity_id: str) -> Commodity:
        try:
            return self.commodities[commodity_id]
        except KeyError:
            raise UnknownNameError(f"unknown commodity {commodity_id!r}") from None

    def secondary_commodities(self, material: str | None = None) -> list[str]:
        return sorted(
            c.id
            for c in self.commodities.values()
            if c.secondary_of is not None and (material is None or c.secondary_of == material)
        )

    def recycling_technologies(self, material: str | None = None) -> list[str]:
        """Technologies that consume a secondary commodity of ``material``."""
        secondary = set(self.secondary_commodities(material))
        return sorted(
            t.id for t in self.technologies.values() if any(t.consumes(c) for c in secondary)
        )

    def producers(self, commodity: str) -> list[str]:
        return sorted(t.id for t in self.technologies.values() if t.outputs.get(commodity, 0.0) > 0)

    def recycled_materials(self) -> list[str]:
        return sorted({c.secondary_of for c in self.commodities.values() if c.secondary_of})


@dataclass(frozen=True)
class Diagnostic:
    code: str
    subject: str
    message: str

    def __str__(self):
        return f"[{self.code}] {self.subject}: {self.message}"


def _check_commodity(c: Commodity, out: list[Diagnostic]):
    if c.kind not in UNIT_OF_KIND:
        out.append(Diagnostic("commodity", c.id, f"unknown kind {c.kind!r}"))
    elif c.unit != UNIT_OF_KIND[c.kind]:
        out.append(Diagnostic("commodity", c.id, f"unit {c.unit!r} does not match kind {c.kind!r}"))
    if c.importable != (c.import_price is not None):
        out.append(Diagnostic("commodity", c.id, "import_price must be given iff importable"))
    if c.import_price is not None and not c.import_price >= 0:
        out.append(Diagnostic("commodity", c.id, "negative import price"))
    if not c.scrap_price >= 0:
        out.append(Diagnostic("commodity", c.id, "negative scrap price"))


def _check_technology(g: SystemGraph, t: Technology, out: list[Diagnostic]):
    def bad(msg):
        out.append(Diagnostic("technology", t.id, msg))

    for side, flows in (("input", t.inputs), ("output", t.outputs)):
        for c, v in flows.items():
            if c not in g.commodities:
                bad(f"{side} references unknown commodity {c!r}")
            if not (v >= 0 and math.isfinite(v)):
                bad(f"{side} coefficient for {c!r} must be finite and >= 0")
    if t.reference_commodity not in t.outputs or t.outputs[t.reference_commodity] <= 0:
        bad("reference commodity must be a positive output")
    if not 0 <= t.fixed_om_share <= 1:
        bad("fixed_om_share outside [0, 1]")
    if t.lifetime < 1:
        bad("lifetime < 1")
    if not t.emission_factor >= 0:
        bad("negative emission factor")
    if not t.invest_cost >= 0 or not t.variable_cost >= 0:
        bad("negative cost")
    if not t.invest_cost_band >= 0:
        bad("negative invest cost band")
    if t.max_capacity is not None and not t.max_capacity >= 0:
        bad("negative max capacity")
    if isinstance(t.availability, str):
        if t.availability not in g.profiles:
            bad(f"availability profile {t.availability!r} not found")
    elif not 0 <= t.availability <= 1:
        bad("availability outside [0, 1]")
    if t.is_storage and set(t.inputs) - {t.reference_commodity}:
        bad("storage may only consume its reference commodity")


def _reachable(g: SystemGraph) -> set[str]:
    have = {c.id for c in g.commodities.values() if c.importable or c.secondary_of}
    changed = True
    while changed:
        changed = False
        for t in g.technologies.values():
            if t.is_storage:
                continue
            if all(c in have for c, v in t.inputs.items() if v > 0):
                new = {c for c, v in t.outputs.items() if v > 0} - have
                if new:
                    have |= new
                    changed = True
    return have


def validate_system(g: SystemGraph) -> list[Diagnostic]:
    """Check type invariants and demand reachability; never raises."""
    out: list[Diagnostic] = []
    for c in g.commodities.values():
        _check_commodity(c, out)
    for t in g.technologies.values():
        _check_technology(g, t, out)
    for pid, p in g.profiles.items():
        for msg in p.problems():
            out.append(Diagnostic("profile", pid, msg))

    for (c, year), q in g.demands.quantities.items():
        if c not in g.commodities:
            out.append(Diagnostic("demand", c, f"demand in {year} for unknown commodity"))
        if not q >= 0:
            out.append(Diagnostic("demand", c, f"negative demand in {year}"))
    for c, pid in g.demands.profiles.items():
        if pid not in g.profiles:
            out.append(Diagnostic("demand", c, f"demand profile {pid!r} not found"))

    produced = {c for t in g.technologies.values() for c, v in t.outputs.items() if v > 0}
    sources = {c.id for c in g.commodities.values() if c.importable or c.secondary_of}
    consumed = {c for t in g.technologies.values() for c, v in t.inputs.items() if v > 0}
    for c in sorted(consumed & set(g.commodities)):
        if c not in produced and c not in sources:
            out.append(Diagnostic("supply", c, "consumed but neither produced nor importable"))

    reachable = _reachable(g)
    for c in g.demands.commodities:
        if c in g.commodities and c not in reachable:
            out.append(Diagnostic("unsatisfiable demand", c, "no supply chain reaches this demand"))
    return out


def annualized_cost(invest: float, lifetime: float, discount_rate: float = DEFAULT_DISCOUNT_RATE) -> float:
    """Annuity of an investment; straight-line when ``discount_rate`` is 0."""
    if not lifetime >= 1:
        raise DomainError(f"lifetime must be >= 1, got {lifetime}")
    if not discount_rate >= 0:
        raise DomainError(f"discount rate must be >= 0, got {discount_rate}")
    if discount_rate == 0:
        return invest / lifetime
    return invest * discount_rate / (1.0 - (1.0 + discount_rate) ** (-lifetime))


def capacity_cost(t: Technology, discount_rate: float = DEFAULT_DISCOUNT_RATE) -> float:
    """Annual fixed cost per unit capacity: annuity plus fixed O&M."""
    return annualized_cost(t.invest_cost, t.lifetime, discount_rate) + t.fixed_om_share * t.invest_cost


def direct_emissions(g: SystemGraph, activity: Mapping[str, float]) -> float:
    """Sum of activity times emission factor, in tCO2."""
    total = 0.0
    for tech_id, a in activity.items():
        total += a * g.technology(tech_id).emission_factor
    return total
