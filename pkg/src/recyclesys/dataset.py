"""Loading system datasets from a directory of comma-separated files.

Files (``#`` lines are comments; empty cells mean "not given")

``commodities.csv``
    id, kind, unit, importable, import_price, secondary_of, scrap_price
``technologies.csv``
    id, reference_commodity, inputs, outputs, invest_cost, invest_cost_band,
    fixed_om_share, variable_cost, emission_factor, lifetime, max_capacity,
    availability, first_available_year, phase_out_year, reference_capacity,
    storage_hours. ``inputs``/``outputs`` are ``commodity:value`` pairs joined
    by ``;``. ``availability`` is a number or a profile id.
``demands.csv``
    commodity, year, quantity, profile
``profiles.csv`` (optional)
    one column per profile, header ``id:normalization``, one row per step
``system.csv``
    key, value. Keys: ``base_year_emissions``, ``first_path_year``,
    ``base_rate.<material>``, ``import_emission_factor.<commodity>``
``stocks.csv`` (optional)
    material, stock_id, mu, sigma, sector_share, recovery_rate,
    obsolete_share, collection_rate. Empty sigma means ``0.3 * mu``.
``history.csv`` (optional)
    material, year, quantity
``secondary_series.csv`` (optional)
    material, base_year, base_quantity, growth_rate, recovery_rate
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from .errors import ConfigurationError, DomainError, UnknownNameError
from .mfa import (
    GrowthSeries,
    InflowLedger,
    ScrapAvailability,
    StockProfile,
    available_secondary,
    backfill_prepath,
    default_sigma,
    merge_ledgers,
)
from .system import Commodity, DemandSet, SystemGraph, Technology
from .tsa import Profile

BUILTIN_PREFIX = "builtin:"

TECH_COLUMNS = (
    "id",
    "reference_commodity",
    "inputs",
    "outputs",
    "invest_cost",
    "invest_cost_band",
    "fixed_om_share",
    "variable_cost",
    "emission_factor",
    "lifetime",
    "max_capacity",
    "availability",
    "first_available_year",
    "phase_out_year",
    "reference_capacity",
    "storage_hours",
)


@dataclass(frozen=True, eq=False)
class Dataset:
    """A system graph plus everything needed to forecast secondary supply."""

    name: str
    graph: SystemGraph
    ledger: InflowLedger = field(default_factory=InflowLedger)
    growth: Mapping[str, GrowthSeries] = field(default_factory=dict)
    base_year_rates: Mapping[str, float] = field(default_factory=dict)
    import_emission_factors: Mapping[str, float] = field(default_factory=dict)
    first_path_year: int = 2020

    def availability(self, material: str, year: int, ledger: InflowLedger | None = None) -> ScrapAvailability:
        """Secondary availability from stocks if modeled, else the growth series."""
        ledger = self.ledger if ledger is None else ledger
        if material in ledger.stocks:
            return available_secondary(ledger, material, year)
        if material in self.growth:
            return self.growth[material].available(year)
        raise UnknownNameError(f"no availability model for material {material!r}")

    def availabilities(self, year: int, ledger: InflowLedger | None = None) -> dict[str, ScrapAvailability]:
        out = {}
        for m in self.graph.recycled_materials():
            try:
                out[m] = self.availability(m, year, ledger)
            except UnknownNameError:
                continue
        return out


def _rows(path: Path):
    text = path.read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


def _num(value: str | None, default=None, kind=float):
    if value is None or value.strip() == "":
        return default
    try:
        return kind(value)
    except ValueError:
        raise ConfigurationError(f"not a number: {value!r}") from None


def _flows(text: str | None) -> dict[str, float]:
    out: dict[str, float] = {}
    if not text or not text.strip():
        return out
    for part in text.split(";"):
        name, _, value = part.partition(":")
        if not value:
            raise ConfigurationError(f"flow entry {part!r} lacks ':value'")
        out[name.strip()] = float(value)
    return out


def _bool(text: str | None) -> bool:
    return (text or "").strip().lower() in ("1", "true", "yes")


def read_commodities(path: Path) -> dict[str, Commodity]:
    out = {}
    for r in _rows(path):
        c = Commodity(
            id=r["id"].strip(),
            kind=r["kind"].strip(),
            unit=r["unit"].strip(),
            importable=_bool(r.get("importable")),
            import_price=_num(r.get("import_price")),
            secondary_of=(r.get("secondary_of") or "").strip() or None,
            scrap_price=_num(r.get("scrap_price"), 0.0),
        )
        if c.id in out:
            raise ConfigurationError(f"duplicate commodity {c.id!r}")
        out[c.id] = c
    return out


def read_technologies(path: Path) -> dict[str, Technology]:
    out = {}
    for r in _rows(path):
        avail = (r.get("availability") or "").strip()
        try:
            availability: float | str = float(avail) if avail else 1.0
        except ValueError:
            availability = avail
        kw = dict(
            id=r["id"].strip(),
            reference_commodity=r["reference_commodity"].strip(),
            inputs=_flows(r.get("inputs")),
            outputs=_flows(r.get("outputs")),
            invest_cost=_num(r.get("invest_cost"), 0.0),
            variable_cost=_num(r.get("variable_cost"), 0.0),
            emission_factor=_num(r.get("emission_factor"), 0.0),
            lifetime=_num(r.get("lifetime"), 20, int),
            max_capacity=_num(r.get("max_capacity")),
            availability=availability,
            first_available_year=_num(r.get("first_available_year"), 2020, int),
            phase_out_year=_num(r.get("phase_out_year"), None, int),
            reference_capacity=_num(r.get("reference_capacity")),
            storage_hours=_num(r.get("storage_hours"), 0.0),
        )
        for key in ("invest_cost_band", "fixed_om_share"):
            v = _num(r.get(key))
            if v is not None:
                kw[key] = v
        t = Technology(**kw)
        if t.id in out:
            raise ConfigurationError(f"duplicate technology {t.id!r}")
        out[t.id] = t
    return out


def read_demands(path: Path) -> DemandSet:
    quantities, profiles = {}, {}
    for r in _rows(path):
        c = r["commodity"].strip()
        quantities[(c, int(r["year"]))] = float(r["quantity"])
        pid = (r.get("profile") or "").strip()
        if pid:
            if profiles.get(c, pid) != pid:
                raise ConfigurationError(f"commodity {c!r} has two demand profiles")
            profiles[c] = pid
    return DemandSet(quantities, profiles)


def read_profiles(path: Path) -> dict[str, Profile]:
    with path.open(encoding="utf-8") as fh:
        lines = [ln for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    header = [h.strip() for h in lines[0].split(",")]
    data = np.loadtxt(lines[1:], delimiter=",", ndmin=2)
    out = {}
    for j, col in enumerate(header):
        pid, _, norm = col.partition(":")
        out[pid] = Profile(pid, data[:, j], norm or "capacity_factor")
    return out


def read_key_values(path: Path) -> dict[str, str]:
    return {r["key"].strip(): r["value"].strip() for r in _rows(path)}


def read_stocks(path: Path) -> dict[str, tuple[StockProfile, ...]]:
    out: dict[str, list[StockProfile]] = {}
    for r in _rows(path):
        mu = float(r["mu"])
        out.setdefault(r["material"].strip(), []).append(
            StockProfile(
                stock_id=r["stock_id"].strip(),
                mu=mu,
                sigma=_num(r.get("sigma"), default_sigma(mu)),
                sector_share=float(r["sector_share"]),
                recovery_rate=_num(r.get("recovery_rate"), 1.0),
                obsolete_share=_num(r.get("obsolete_share"), 0.0),
                collection_rate=_num(r.get("collection_rate"), 1.0),
            )
        )
    return {m: tuple(s) for m, s in out.items()}


def read_history(path: Path) -> dict[str, dict[int, float]]:
    out: dict[str, dict[int, float]] = {}
    for r in _rows(path):
        out.setdefault(r["material"].strip(), {})[int(r["year"])] = float(r["quantity"])
    return out


def read_growth(path: Path) -> dict[str, GrowthSeries]:
    out = {}
    for r in _rows(path):
        m = r["material"].strip()
        out[m] = GrowthSeries(
            material=m,
            base_year=int(r["base_year"]),
            base_quantity=float(r["base_quantity"]),
            growth_rate=float(r["growth_rate"]),
            recovery_rate=_num(r.get("recovery_rate"), 1.0),
        )
    return out


def builtin_datasets() -> list[str]:
    """Names of the datasets shipped with the package."""
    root = Path(__file__).resolve().parent / "data"
    return sorted(p.name for p in root.iterdir() if (p / "commodities.csv").exists())


def resolve_dataset_path(ref: str | Path, base: str | Path | None = None) -> Path:
    """Directory of a dataset reference.

    ``builtin:<name>`` names a packaged dataset; anything else is a path,
    taken relative to ``base`` when it is not absolute.
    """
    text = str(ref)
    if text.startswith(BUILTIN_PREFIX):
        name = text[len(BUILTIN_PREFIX):]
        if name not in builtin_datasets():
            raise ConfigurationError(f"no packaged dataset {name!r}; have {builtin_datasets()}")
        return Path(__file__).resolve().parent / "data" / name
    path = Path(text)
    if not path.is_absolute() and base is not None:
        path = Path(base) / path
    return path


def load_dataset(directory: str | Path) -> Dataset:
    """Read a dataset directory; raises ConfigurationError on malformed files."""
    d = resolve_dataset_path(directory)
    if not d.is_dir():
        raise ConfigurationError(f"dataset directory {str(d)!r} not found")
    try:
        commodities = read_commodities(d / "commodities.csv")
        technologies = read_technologies(d / "technologies.csv")
        demands = read_demands(d / "demands.csv")
        profiles = read_profiles(d / "profiles.csv") if (d / "profiles.csv").exists() else {}
        system = read_key_values(d / "system.csv") if (d / "system.csv").exists() else {}
        stocks = read_stocks(d / "stocks.csv") if (d / "stocks.csv").exists() else {}
        history = read_history(d / "history.csv") if (d / "history.csv").exists() else {}
        growth = read_growth(d / "secondary_series.csv") if (d / "secondary_series.csv").exists() else {}
    except FileNotFoundError as exc:
        raise ConfigurationError(f"missing dataset file: {exc.filename}") from None
    except (KeyError, DomainError, ValueError) as exc:
        raise ConfigurationError(f"{d.name}: {exc}") from None

    first_path_year = int(system.get("first_path_year", 2020))
    base_rates, import_ef = {}, {}
    for key, value in system.items():
        if key.startswith("base_rate."):
            base_rates[key.split(".", 1)[1]] = float(value)
        elif key.startswith("import_emission_factor."):
            import_ef[key.split(".", 1)[1]] = float(value)
    graph = SystemGraph(
        commodities=commodities,
        technologies=technologies,
        demands=demands,
        profiles=profiles,
        base_year_emissions=float(system.get("base_year_emissions", 0.0)),
    )
    ledgers = []
    for material, stock in stocks.items():
        try:
            ledgers.append(backfill_prepath(history.get(material, {}), stock, material, first_path_year))
        except DomainError as exc:
            raise ConfigurationError(f"{d.name}: {exc}") from None
    ledger = merge_ledgers(ledgers, first_path_year)
    return Dataset(
        name=d.name,
        graph=graph,
        ledger=ledger,
        growth=growth,
        base_year_rates=base_rates,
        import_emission_factors=import_ef,
        first_path_year=first_path_year,
    )


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        if math.isinf(v):
            return "inf"
        return repr(v)
    return str(v)


def write_technologies(path: Path, technologies: Mapping[str, Technology]):
    """Inverse of ``read_technologies``; used by the dataset generators."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(TECH_COLUMNS)
        for t in technologies.values():
            row = []
            for col in TECH_COLUMNS:
                v = getattr(t, col)
                if col in ("inputs", "outputs"):
                    v = ";".join(f"{c}:{_fmt(float(x))}" for c, x in v.items())
                row.append(_fmt(v))
            w.writerow(row)
