"""Secondary raw material availability from residence-time distributions.

Material entering an anthropogenic stock in year ``t`` leaves it as scrap in
year ``x`` with a normal density in ``x - t``. Summing over all earlier inflows
gives the theoretical scrap quantity of year ``x``; obsolete stock, recovery
and collection losses reduce it to the effective quantity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import DomainError, UnknownNameError

SIGMA_TO_MU = 0.3


def default_sigma(mu: float) -> float:
    return SIGMA_TO_MU * mu


@dataclass(frozen=True)
class StockProfile:
    """Residence-time and loss parameters of one anthropogenic stock."""

    stock_id: str
    mu: float
    sigma: float
    sector_share: float
    recovery_rate: float = 1.0
    obsolete_share: float = 0.0
    collection_rate: float = 1.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError(f"stock {self.stock_id!r}: sigma must be > 0")
        for name in ("sector_share", "recovery_rate", "obsolete_share", "collection_rate"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise DomainError(f"stock {self.stock_id!r}: {name}={v} outside [0, 1]")

    @property
    def yield_factor(self) -> float:
        """Share of theoretical outflow that becomes usable scrap."""
        return (1.0 - self.obsolete_share) * self.recovery_rate * self.collection_rate


def retention_fraction(mu: float, sigma: float, dt):
    """Normal density of the residence time, evaluated at ``dt`` years."""
    if not sigma > 0:
        raise DomainError(f"sigma must be > 0, got {sigma}")
    z = (np.asarray(dt, dtype=float) - mu) / sigma
    out = np.exp(-0.5 * z * z) / (sigma * math.sqrt(2.0 * math.pi))
    return float(out) if out.ndim == 0 else out


def scrap_outflow(D: float, profile: StockProfile, x_minus_t):
    """Scrap released ``x_minus_t`` years after ``D`` tonnes entered the stock."""
    if not D >= 0:
        raise DomainError(f"inflow must be >= 0, got {D}")
    return D * retention_fraction(profile.mu, profile.sigma, x_minus_t)


def _check_shares(material: str, stocks: tuple[StockProfile, ...]):
    total = sum(s.sector_share for s in stocks)
    if stocks and abs(total - 1.0) > 1e-9:
        raise DomainError(f"sector shares of {material!r} sum to {total}, expected 1")


@dataclass(frozen=True, eq=False)
class InflowLedger:
    """Annual inflows D[material, stock, year] into anthropogenic stocks.

    Years before ``first_path_year`` are historical (exogenous); later years
    are written by the optimization. The ledger is immutable; ``with_inflow``
    returns an extended copy.
    """

    stocks: Mapping[str, tuple[StockProfile, ...]] = field(default_factory=dict)
    inflows: Mapping[tuple[str, str, int], float] = field(default_factory=dict)
    first_path_year: int | None = None

    def __post_init__(self):
        for material, stocks in self.stocks.items():
            _check_shares(material, tuple(stocks))
        for key, q in self.inflows.items():
            if not q >= 0:
                raise DomainError(f"negative inflow {key}")

    @property
    def materials(self) -> list[str]:
        return sorted(self.stocks)

    def stock_profiles(self, material: str) -> tuple[StockProfile, ...]:
        try:
            return tuple(self.stocks[material])
        except KeyError:
            raise UnknownNameError(f"no stock profiles for material {material!r}") from None

    def inflow(self, material: str, stock_id: str, year: int) -> float:
        return self.inflows.get((material, stock_id, year), 0.0)

    def years(self, material: str) -> list[int]:
        return sorted({y for m, _, y in self.inflows if m == material})

    def is_endogenous(self, year: int) -> bool:
        return self.first_path_year is not None and year >= self.first_path_year

    def with_inflow(self, material: str, year: int, quantity: float) -> "InflowLedger":
        """Split an endogenous production quantity over the material's stocks."""
        if not quantity >= 0:
            raise DomainError(f"negative production {quantity}")
        if self.first_path_year is not None and year < self.first_path_year:
            raise DomainError(f"endogenous inflow for {year} precedes the path start")
        inflows = dict(self.inflows)
        for s in self.stock_profiles(material):
            key = (material, s.stock_id, year)
            if key in inflows:
                raise DomainError(f"ledger entry {key} already written")
            inflows[key] = quantity * s.sector_share
        return InflowLedger(self.stocks, inflows, self.first_path_year)

    def __add__(self, other: "InflowLedger") -> "InflowLedger":
        stocks = dict(self.stocks)
        for m, s in other.stocks.items():
            if m in stocks and tuple(stocks[m]) != tuple(s):
                raise DomainError(f"stock profiles of {m!r} differ")
            stocks[m] = s
        inflows = dict(self.inflows)
        for key, q in other.inflows.items():
            inflows[key] = inflows.get(key, 0.0) + q
        return InflowLedger(stocks, inflows, self.first_path_year)


@dataclass(frozen=True)
class ScrapAvailability:
    material: str
    year: int
    theoretical: float
    effective: float
    per_stock: Mapping[str, float] = field(default_factory=dict)


def available_secondary(ledger: InflowLedger, material: str, x: int) -> ScrapAvailability:
    """Theoretical and effective scrap of ``material`` in year ``x``.

    Sums the outflow density over all ledger inflows of earlier years.
    """
    stocks = ledger.stock_profiles(material)
    theoretical = 0.0
    effective = 0.0
    per_stock = {}
    for s in stocks:
        entries = [(y, q) for (m, sid, y), q in ledger.inflows.items() if m == material and sid == s.stock_id and y < x]
        if entries:
            years, qs = np.array(entries, dtype=float).T
            b = float(np.dot(qs, retention_fraction(s.mu, s.sigma, x - years)))
        else:
            b = 0.0
        per_stock[s.stock_id] = b
        theoretical += b
        effective += b * s.yield_factor
    return ScrapAvailability(material, x, theoretical, effective, per_stock)


def backfill_prepath(
    historical: Mapping[int, float],
    stocks: Iterable[StockProfile],
    material: str = "steel",
    first_path_year: int | None = None,
) -> InflowLedger:
    """Ledger of historical production split over stocks by sector share."""
    stocks = tuple(stocks)
    _check_shares(material, stocks)
    inflows = {}
    for year, production in historical.items():
        if not production >= 0:
            raise DomainError(f"negative production {production} in {year}")
        if first_path_year is not None and year >= first_path_year:
            raise DomainError(f"historical year {year} is not before the path start {first_path_year}")
        for s in stocks:
            inflows[(material, s.stock_id, int(year))] = production * s.sector_share
    return InflowLedger({material: stocks}, inflows, first_path_year)


@dataclass(frozen=True)
class GrowthSeries:
    """Secondary availability extrapolated at a constant growth rate.

    Used for materials whose waste volumes are forecast directly (plastics,
    glass, paper) instead of through residence-time stocks.
    """

    material: str
    base_year: int
    base_quantity: float
    growth_rate: float
    recovery_rate: float = 1.0

    def available(self, year: int) -> ScrapAvailability:
        theoretical = self.base_quantity * (1.0 + self.growth_rate) ** (year - self.base_year)
        return ScrapAvailability(self.material, year, theoretical, theoretical * self.recovery_rate)


def merge_ledgers(ledgers: Iterable[InflowLedger], first_path_year: int | None = None) -> InflowLedger:
    out = InflowLedger(first_path_year=first_path_year)
    for led in ledgers:
        out = out + led
    return InflowLedger(out.stocks, out.inflows, first_path_year)
