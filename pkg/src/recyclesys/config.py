"""Scenario and sweep files.

Files are TOML. Paths inside a file are taken relative to the file itself;
``builtin:<name>`` names a dataset shipped with the package. Sections::

    [scenario]
    name = "ref95"
    dataset = "builtin:desk"
    output = "out/ref95"            # optional, default out/<name>

    [policy]
    mode = "bounded_by_availability"   # or fixed_at_rate, forbidden
    rates = { steel = 0.3 }            # fixed_at_rate only, optional
    effective_from = 2025              # optional

    [caps]
    base = 100000                      # optional, default from the dataset
    anchors = { 2020 = 0.40, 2030 = 0.55, 2050 = 0.95 }

    [prices.import]
    hydrogen = 100.0
    [prices.scrap]
    steel = 240.0

    [tsa]
    typical_periods = 2                # 0 keeps one flat step per year
    period_length = 24

    [pathway]
    steps = [2020, 2025, 2030, 2035, 2040, 2045, 2050]
    corridor_share = 0.2               # false disables the corridor
    segments = 4
    discount_rate = 0.07

A sweep file holds the same sections plus::

    [sweep]
    parameter = "scrap_prices.steel"
    grid = [240, 480, 960]
    full_pathway = false
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

from .dataset import BUILTIN_PREFIX, load_dataset, resolve_dataset_path
from .errors import ConfigurationError, DomainError
from .formulation import DEFAULT_SEGMENTS, RecyclingPolicy
from .pathway import DEFAULT_ANCHORS, DEFAULT_CORRIDOR_SHARE, DEFAULT_STEPS, CapSchedule
from .scenario import DEFAULT_PERIOD_LENGTH, DEFAULT_TYPICAL_PERIODS, ScenarioSpec, SweepSpec
from .system import DEFAULT_DISCOUNT_RATE

KNOWN_SECTIONS = {"scenario", "policy", "caps", "prices", "tsa", "pathway", "sweep"}


@dataclass(frozen=True)
class LoadedScenario:
    spec: ScenarioSpec
    output: Path
    source: Path


@dataclass(frozen=True)
class LoadedSweep:
    spec: SweepSpec
    output: Path
    source: Path


def read_toml(path: str | Path) -> dict[str, Any]:
    p = Path(path)
    try:
        with p.open("rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigurationError(f"{p} not found") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigurationError(f"{p}: {exc}") from None
    unknown = set(data) - KNOWN_SECTIONS
    if unknown:
        raise ConfigurationError(f"{p}: unknown sections {sorted(unknown)}")
    return data


def _section(data: Mapping, name: str) -> Mapping:
    sec = data.get(name, {})
    if not isinstance(sec, Mapping):
        raise ConfigurationError(f"[{name}] must be a table")
    return sec


def _prices(sec: Mapping, what: str) -> dict[str, float]:
    out = {}
    for k, v in sec.items():
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise ConfigurationError(f"{what}.{k} must be a number")
        out[str(k)] = float(v)
    return out


def cap_schedule(data: Mapping, base_dir: Path | None = None) -> CapSchedule:
    """The ``[caps]`` section; a missing base is read from the scenario's dataset."""
    caps = _section(data, "caps")
    anchors_raw = caps.get("anchors", DEFAULT_ANCHORS)
    try:
        anchors = {int(y): float(r) for y, r in anchors_raw.items()}
    except (TypeError, ValueError, AttributeError):
        raise ConfigurationError("[caps] anchors must map years to reduction fractions") from None
    base = caps.get("base")
    if base is None:
        ref = _section(data, "scenario").get("dataset")
        if ref is None:
            raise ConfigurationError("[caps] base missing and no dataset to read it from")
        base = load_dataset(resolve_dataset_path(ref, base_dir)).graph.base_year_emissions
    try:
        return CapSchedule(float(base), anchors)
    except DomainError as exc:
        raise ConfigurationError(f"[caps] {exc}") from None


def scenario_spec(data: Mapping, base_dir: Path) -> tuple[ScenarioSpec, Path]:
    sc = _section(data, "scenario")
    name = sc.get("name")
    ref = sc.get("dataset")
    if not name or not ref:
        raise ConfigurationError("[scenario] needs name and dataset")
    dataset = str(ref) if str(ref).startswith(BUILTIN_PREFIX) else str(resolve_dataset_path(ref, base_dir).resolve())
    output = base_dir / sc.get("output", f"out/{name}")

    pol = _section(data, "policy")
    try:
        policy = RecyclingPolicy(
            mode=pol.get("mode", "bounded_by_availability"),
            rates={str(k): float(v) for k, v in pol.get("rates", {}).items()},
            effective_from=pol.get("effective_from"),
        )
    except DomainError as exc:
        raise ConfigurationError(f"[policy] {exc}") from None

    prices = _section(data, "prices")
    tsa = _section(data, "tsa")
    k = int(tsa.get("typical_periods", DEFAULT_TYPICAL_PERIODS))
    pw = _section(data, "pathway")
    corridor = pw.get("corridor_share", DEFAULT_CORRIDOR_SHARE)
    if corridor is False:
        corridor = None
    elif corridor is True:
        corridor = DEFAULT_CORRIDOR_SHARE
    spec = ScenarioSpec(
        name=str(name),
        dataset=dataset,
        cap_schedule=cap_schedule(data, base_dir),
        policy=policy,
        import_prices=_prices(_section(prices, "import"), "prices.import"),
        scrap_prices=_prices(_section(prices, "scrap"), "prices.scrap"),
        typical_periods=k if k > 0 else None,
        period_length=int(tsa.get("period_length", DEFAULT_PERIOD_LENGTH)),
        steps=tuple(pw.get("steps", DEFAULT_STEPS)),
        corridor_share=None if corridor is None else float(corridor),
        segments=int(pw.get("segments", DEFAULT_SEGMENTS)),
        discount_rate=float(pw.get("discount_rate", DEFAULT_DISCOUNT_RATE)),
    )
    return spec, output


def load_scenario(path: str | Path) -> LoadedScenario:
    p = Path(path).resolve()
    data = read_toml(p)
    spec, output = scenario_spec(data, p.parent)
    return LoadedScenario(spec, output, p)


def load_sweep(path: str | Path) -> LoadedSweep:
    p = Path(path).resolve()
    data = read_toml(p)
    base, output = scenario_spec(data, p.parent)
    sw = _section(data, "sweep")
    if "parameter" not in sw or "grid" not in sw:
        raise ConfigurationError("[sweep] needs parameter and grid")
    spec = SweepSpec(base, str(sw["parameter"]), tuple(sw["grid"]), bool(sw.get("full_pathway", False)))
    return LoadedSweep(spec, output, p)
