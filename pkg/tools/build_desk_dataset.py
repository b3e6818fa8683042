"""Write the desk-scale dataset into ``src/recyclesys/data/desk``.

The desk system is a miniature single-node economy at roughly one
thousandth of national scale: an electricity, heat and hydrogen supply
side, a steel chain with blast furnace, direct reduction and scrap-based
electric arc furnaces, and an ammonia plant with a gas and a hydrogen route.

Hourly profiles are synthetic and generated from a fixed seed, so rerunning
this script reproduces the shipped files byte for byte.

Energy technologies are costed per MWh/a of nameplate output (EUR/kW
divided by 8.76); material technologies per t/a.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

HERE = Path(__file__).resolve().parent
OUT = HERE.parent / "src" / "recyclesys" / "data" / "desk"
SEED = 20200101
HOURS = 8760


def per_mwh_year(eur_per_kw: float) -> float:
    return round(eur_per_kw / 8.76, 3)


def profiles(rng: np.random.Generator) -> dict[str, tuple[str, np.ndarray]]:
    hours = np.arange(HOURS)
    day = hours // 24
    hod = hours % 24
    season = np.cos(2 * np.pi * (day - 172) / 365)  # +1 at midsummer

    daylight = np.clip(np.sin(np.pi * (hod - 6 + 2 * season) / (12 + 4 * season)), 0, None)
    cloud = np.repeat(rng.beta(2.0, 1.5, 365), 24)
    solar = daylight * (0.55 + 0.25 * season) * cloud
    solar = np.clip(solar, 0.0, 1.0)

    daily = np.empty(365)
    daily[0] = 0.0
    for d in range(1, 365):
        daily[d] = 0.8 * daily[d - 1] + rng.normal(0.0, 0.6)
    wind = 0.32 - 0.08 * season + 0.18 * np.repeat(daily, 24) + rng.normal(0.0, 0.04, HOURS)
    wind = np.clip(wind, 0.0, 0.95)

    load = 1.0 + 0.15 * (-season) + 0.2 * np.sin(np.pi * np.clip(hod - 6, 0, 16) / 16)
    load *= np.where(np.repeat(np.arange(365) % 7 >= 5, 24), 0.85, 1.0)
    load = load / load.sum()
    return {
        "solar": ("capacity_factor", solar),
        "wind": ("capacity_factor", wind),
        "load": ("sums_to_one", load),
    }


def write(name: str, header: list[str], rows: list[list], comment: str | None = None):
    with (OUT / name).open("w", newline="", encoding="utf-8") as fh:
        if comment:
            for line in comment.strip().splitlines():
                fh.write(f"# {line}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(SEED)

    write(
        "commodities.csv",
        ["id", "kind", "unit", "importable", "import_price", "secondary_of", "scrap_price"],
        [
            ["electricity", "energy", "MWh", "", "", "", ""],
            ["heat", "energy", "MWh", "", "", "", ""],
            ["hydrogen", "energy", "MWh", "true", "100", "", ""],
            ["natural_gas", "energy", "MWh", "true", "25", "", ""],
            ["coal", "energy", "MWh", "true", "22", "", ""],
            ["iron_ore", "material", "tonne", "true", "110", "", ""],
            ["pig_iron", "material", "tonne", "", "", "", ""],
            ["iron_sponge", "material", "tonne", "", "", "", ""],
            ["steel", "material", "tonne", "", "", "", ""],
            ["steel_scrap", "material", "tonne", "", "", "steel", "240"],
            ["ammonia", "material", "tonne", "", "", "", ""],
        ],
        comment="Prices in EUR per MWh or per tonne. Imported hydrogen at 0.10 EUR/kWh, steel scrap at 0.24 EUR/kg.",
    )

    tech_header = [
        "id", "reference_commodity", "inputs", "outputs", "invest_cost", "invest_cost_band",
        "fixed_om_share", "variable_cost", "emission_factor", "lifetime", "max_capacity",
        "availability", "first_available_year", "phase_out_year", "reference_capacity", "storage_hours",
    ]
    # id, ref, inputs, outputs, invest, var cost, ef, lifetime, availability, first, phase-out, ref cap
    techs = [
        ["pv", "electricity", "", "electricity:1", per_mwh_year(500), 0, 0, 25, "solar", "", "", 600000],
        ["wind", "electricity", "", "electricity:1", per_mwh_year(1200), 0, 0, 25, "wind", "", "", 400000],
        ["ccgt", "electricity", "natural_gas:1.75", "electricity:1", per_mwh_year(800), 2, 0.35, 30, 0.95, "", "", 40000],
        ["coal_pp", "electricity", "coal:2.5", "electricity:1", per_mwh_year(1600), 4, 0.85, 40, 0.9, "", 2038, 40000],
        ["h2_turbine", "electricity", "hydrogen:1.7", "electricity:1", per_mwh_year(700), 2, 0, 30, 0.95, "", "", 40000],
        ["electrolyzer", "hydrogen", "electricity:1.45", "hydrogen:1", per_mwh_year(1100), 0, 0, 20, 1.0, "", "", 150000],
        ["gas_boiler", "heat", "natural_gas:1.1", "heat:1", per_mwh_year(100), 1, 0.22, 25, 1.0, "", "", 100000],
        ["h2_boiler", "heat", "hydrogen:1.1", "heat:1", per_mwh_year(120), 1, 0, 25, 1.0, "", "", 100000],
        ["e_heater", "heat", "electricity:1.02", "heat:1", per_mwh_year(150), 1, 0, 25, 1.0, "", "", 100000],
        ["blast_furnace", "pig_iron", "iron_ore:1.5;coal:5.057;electricity:0.062;natural_gas:0.072",
         "pig_iron:1", 365, 0, 1.42, 40, 0.95, "", "", 40000],
        ["oxygen_converter", "steel", "pig_iron:1;electricity:0.018;natural_gas:0.108",
         "steel:1", 128, 0, 0, 40, 0.95, "", "", 40000],
        ["eaf_scrap", "steel", "steel_scrap:1.1;electricity:0.576;heat:0.215",
         "steel:1", 184, 0, 0, 40, 0.95, "", "", 40000],
        ["eaf_dri", "steel", "iron_sponge:1;electricity:0.576;heat:0.215",
         "steel:1", 184, 0, 0, 40, 0.95, "", "", 40000],
        ["h2_dr", "iron_sponge", "iron_ore:1.4;hydrogen:1.808;electricity:0.127;heat:1.516",
         "iron_sponge:1", 220, 0, 0, 40, 0.95, 2025, "", 40000],
        ["hb_gas", "ammonia", "natural_gas:5.83;electricity:2.07;heat:1.83",
         "ammonia:1", 670, 0, 1.2, 30, 0.95, "", "", 3400],
        ["hb_h2", "ammonia", "hydrogen:5.93;electricity:1.72;heat:1.83",
         "ammonia:1", 500, 0, 0, 30, 0.95, 2025, "", 3400],
    ]
    rows = []
    for tid, ref, inp, out, inv, var, ef, life, avail, first, phase, refcap in techs:
        rows.append([tid, ref, inp, out, inv, "", "", var, ef, life, "", avail, first, phase, refcap, ""])
    write(
        "technologies.csv",
        tech_header,
        rows,
        comment=(
            "Specific inputs per unit of reference output (MWh/t or t/t); steel chain and ammonia values\n"
            "from published process tables, ore ratios and power-sector data are desk assumptions.\n"
            "Energy technologies: invest in EUR per MWh/a nameplate; materials: EUR per t/a."
        ),
    )

    demand_rows = []
    for year, steel, ammonia, power in [
        (2020, 40000, 2300, 100000),
        (2030, 40000, 2600, 105000),
        (2040, 39000, 3000, 110000),
        (2050, 39000, 3400, 115000),
    ]:
        demand_rows.append(["steel", year, steel, ""])
        demand_rows.append(["ammonia", year, ammonia, ""])
        demand_rows.append(["electricity", year, power, "load"])
    write("demands.csv", ["commodity", "year", "quantity", "profile"], demand_rows,
          comment="Annual demand in tonnes or MWh; linear between the listed years.")

    prof = profiles(rng)
    with (OUT / "profiles.csv").open("w", encoding="utf-8") as fh:
        fh.write("# Synthetic hourly series, seed %d\n" % SEED)
        fh.write(",".join(f"{pid}:{norm}" for pid, (norm, _) in prof.items()) + "\n")
        data = np.column_stack([v for _, v in prof.values()])
        for row in data:
            fh.write(",".join("%.12g" % x for x in row) + "\n")

    write(
        "system.csv",
        ["key", "value"],
        [
            ["base_year_emissions", 100000],
            ["first_path_year", 2020],
            ["base_rate.steel", 0.30],
        ],
        comment="base_year_emissions is the 1990 reference for the CO2 cap schedule (tCO2).",
    )

    write(
        "stocks.csv",
        ["material", "stock_id", "mu", "sigma", "sector_share", "recovery_rate", "obsolete_share", "collection_rate"],
        [
            ["steel", "transportation", 13, "", 0.30, 0.82, 0.0, 1.0],
            ["steel", "mechanical_engineering", 20, "", 0.10, 0.87, 0.0, 1.0],
            ["steel", "construction", 50, "", 0.47, 0.82, 0.1, 1.0],
            ["steel", "other_products", 10, "", 0.13, 0.58, 0.0, 1.0],
        ],
        comment="Empty sigma means 0.3 * mu.",
    )

    years = np.arange(1870, 2020)
    anchors_y = [1870, 1900, 1913, 1945, 1950, 1960, 1970, 1974, 1980, 1990, 2000, 2010, 2019]
    anchors_q = [1, 6, 17, 2, 12, 34, 45, 53, 44, 44, 46, 44, 40]
    production = np.interp(years, anchors_y, anchors_q) * 1000.0
    write(
        "history.csv",
        ["material", "year", "quantity"],
        [["steel", int(y), round(float(q), 3)] for y, q in zip(years, production)],
        comment="Synthetic crude steel production in tonnes, piecewise linear through rough national figures / 1000.",
    )


if __name__ == "__main__":
    main()
