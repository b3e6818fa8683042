"""Write the national-scale industry dataset into ``src/recyclesys/data/sm_b``.

Process rows carry the published investment costs and specific energy
demands unchanged (kWh/kg read as MWh/t). Everything the tables leave open
is a labelled assumption in ``ASSUMPTIONS`` below and in the file comments:
the energy supply side, fuel prices and emission factors, ore and scrap
input ratios, demand splits and the secondary supply series.

The dataset has no hourly profiles; renewable availability is an annual
mean, so one flat step per year is the intended resolution.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

HERE = Path(__file__).resolve().parent
OUT = HERE.parent / "src" / "recyclesys" / "data" / "sm_b"
MT = 1e6
TWH = 1e6

# Combustion factors in tCO2 per MWh of fuel, used for technologies without
# a published process value.
FUEL_EF = {"natural_gas": 0.201, "coal": 0.338, "heating_oil": 0.266, "crude_oil": 0.264}

ASSUMPTIONS = """
Assumptions beyond the process tables:
- energy supply technologies, fuel and import prices: desk values, same as the desk dataset
- iron ore input 1.5 t/t pig iron and 1.4 t/t iron sponge; scrap input 1.1 t/t steel
- primary non-ferrous routes take 1.93 t alumina, or 1 t of metal contained in concentrate;
  batch glass melting takes 1.2 t raw batch per t
- scrap based electric arc furnace and sponge based furnace share the published furnace row
- glass furnaces: one variant per carrier and glass type, midpoint of the published range for
  the main carrier plus the lower bound of power; cullet variants use 70 % of the energy
  (3 % per 10 % cullet) and 1 t waste glass per t
- glass batch process emissions 0.2 t/t for batch melting, 0 with cullet
- all glass types supply one glass demand; all paper machines supply one paper demand
- recovered paper pulping 0.3 MWh/t power, 1.1 t recovered paper per t pulp
- Fischer-Tropsch invest converted at 11.9 MWh/t; the unlabelled 3.5 entry is not used
- emissions of fuel use are folded into each technology's emission factor
- aggregated industry demand held at its 2019 level
"""


def per_mwh_year(eur_per_kw: float) -> float:
    return round(eur_per_kw / 8.76, 3)


def mid(lo: float, hi: float) -> float:
    return round((lo + hi) / 2.0, 4)


def write(name: str, header: list[str], rows: list[list], comment: str | None = None):
    with (OUT / name).open("w", newline="", encoding="utf-8") as fh:
        if comment:
            for line in comment.strip().splitlines():
                fh.write(f"# {line}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


# name, invest 2020 (2050), power, coal/coke, natural gas, hydrogen, process heat, reference
STEEL = [
    ("Blast furnace", 365, 365, 0.062, 5.057, 0.072, None, None, "Pig iron"),
    ("Oxygen converter", 128, 128, 0.018, None, 0.108, None, None, "Crude steel"),
    ("Electric arc furnace", 184, 184, 0.576, None, None, None, 0.215, "Crude steel"),
    ("H2-Direct-reduction", 220, 220, 0.127, None, None, 1.808, 1.516, "Iron sponge"),
]

# name, invest 2020 (2050), power, coal/coke, natural gas, process heat, reference
NON_FERROUS = [
    ("Hall-Heroult-Process", 5000, 5000, 15.622, 3.413, None, 0.739, "Aluminum"),
    ("Aluminum melting furnace", 500, 500, 0.7811, None, None, None, "Aluminum"),
    ("Hall-Heroult-Process (inert)", 5500, 5500, 19.528, None, None, None, "Aluminum"),
    ("Primary copper", 2873, 2873, 1.436, 0.101, 1.016, None, "Copper"),
    ("Kayser Recycling System", 1810, 1810, 0.858, 0.120, 0.556, None, "Copper"),
    ("Primary zinc", 1520, 1520, 3.989, None, None, 0.034, "Zinc"),
    ("Rolling oxide process", 2000, 2000, 4.078, 0.15, 0.051, None, "Zinc"),
    ("Zinc smelting furnace", 315, 315, 0.08, None, 0.694, 1.34, "Zinc"),
]

# name, invest 2020 (2050), power, natural gas, heating oil, hydrogen (ranges), reference
GLASS = [
    ("Furnace flat glass", 195, 195, (0.10, 1.10), (0.36, 1.90), (1.49, 1.77), (0.20, 2.09), "Flat glass"),
    ("Furnace glass fiber", 195, 195, (0.09, 1.00), (0.37, 2.10), None, (0.20, 2.31), "Fiberglass"),
    ("Furnace hollow glass", 195, 195, (0.09, 1.00), (0.26, 1.40), (1.07, 1.30), (0.14, 1.54), "Hollow glass"),
    ("Furnace special glass", 195, 195, (0.12, 1.25), (0.66, 3.29), None, (0.36, 3.85), "Special glass"),
]

# name, invest 2020 (2050), power, process heat, reference
PAPER = [
    ("Paper Machine Graphic Paper", 1300, 1300, 0.458, 1.019, "Graphic paper"),
    ("Paper Machine Packaging Paper", 1058, 1058, 0.144, 1.019, "Packing paper"),
    ("Paper machine Sanitary paper", 1705, 1705, 0.971, 1.019, "Sanitary paper"),
    ("Paper Machine Special Paper", 1108, 1108, 0.231, 1.019, "Special paper"),
    ("Mechanical Defibering", 300, 300, 2.745, -1.127, "Wood pulp"),
    ("Chemical Defibering", 1355, 1355, 0.702, 5.859, "Fiber"),
]

# name, invest 2020 (2050), {carrier: MWh/t}, reference
CHEMICALS = [
    ("Chlor-alkali electrolysis", 404, 404, {"electricity": 2.35, "heat": 0.3}, "Chlorine"),
    ("Haber-Bosch process", 670, 670, {"electricity": 2.07, "natural_gas": 5.83, "heat": 1.83}, "Ammonia"),
    ("Haber-Bosch process (H2)", 500, 500, {"electricity": 1.72, "hydrogen": 5.93, "heat": 1.83}, "Ammonia"),
    ("Methanol (steam reforming)", 400, 400, {"electricity": 0.17, "natural_gas": 6.94, "heat": 3.14}, "Methanol"),
    ("Methanol (partial oxidation)", 530, 530, {"electricity": 0.18, "crude_oil": 9.22}, "Methanol"),
    ("Methanol (H2)", 197, 197, {"electricity": 1.5, "hydrogen": 6.33}, "Methanol"),
    ("Methanol (bio-mass)", 400, 400, {"electricity": 0.17, "biomass": 10.08, "heat": 3.33}, "Methanol"),
]

# name, invest 2020 (2050), power MWh/t, methanol t/t, naphtha t/t, reference
HVC = [
    ("Methanol-to-Olefins", 268, 268, 1.39, 2.34, None, "HVC"),
    ("Steamcracker", 1700, 1700, 0.1, None, 1.22, "HVC"),
    ("Steamcracker (el. heating)", 250, 250, 4.7, None, 1.22, "HVC"),
]
FISCHER_TROPSCH = ("Fisher-Tropsch-Synthesis", 788, 500, 1.32, 3.5, "Diesel/ Gasoline/ Kerosene")

# branch, heat < 100 C, 100-500 C, > 500 C, electricity (TWh, 2019)
AGGREGATED = [
    ("Stone and earth industry", 0.03, 0.05, 2.34, 1.72),
    ("Nutrition & Tobacco", 18.11, 22.25, 0.00, 19.08),
    ("Other. chemical industry", 2.53, 3.93, 10.48, 6.78),
    ("Rubber & plastic goods", 1.74, 6.59, 0.00, 13.81),
    ("Metalworking", 4.11, 3.25, 6.00, 14.64),
    ("Mechanical Engineering", 2.92, 2.18, 4.12, 10.89),
    ("Vehicle construction", 5.11, 3.88, 7.15, 16.06),
    ("Other manufacturing", 18.18, 6.07, 7.27, 21.14),
]

# Mt; 2020, 2030, 2040, 2050
DEMAND = {
    "Steel": (40.0, 40.0, 39.0, 39.0),
    "Cement": (34.2, 35.1, 35.9, 36.9),
    "Aluminum": (1.3, 1.3, 1.3, 1.3),
    "Copper": (0.7, 0.7, 0.7, 0.7),
    "Zinc": (0.3, 0.3, 0.3, 0.3),
    "Urea": (0.5, 0.6, 0.7, 0.8),
    "Ammonia": (2.3, 2.6, 3.0, 3.4),
    "Methanol": (1.1, 1.3, 1.5, 1.7),
    "Chlorine": (3.9, 4.5, 5.1, 5.7),
    "Plastics": (14.4, 16.0, 17.7, 19.4),
    "Glass": (7.2, 7.6, 8.0, 8.4),
    "Paper": (22.7, 23.6, 24.5, 25.5),
}
DEMAND_COMMODITY = {
    "Steel": "steel", "Aluminum": "aluminum", "Copper": "copper", "Zinc": "zinc",
    "Ammonia": "ammonia", "Methanol": "methanol", "Chlorine": "chlorine",
    "Plastics": "hvc", "Glass": "glass", "Paper": "paper",
}

# Stock parameters per sector: share, mean lifetime, obsolete share, recovery rate
STEEL_STOCKS = [
    ("transportation", 0.3, 13, 0.0, 0.82),
    ("mechanical_engineering", 0.1, 20, 0.0, 0.87),
    ("construction", 0.47, 50, 0.1, 0.82),
    ("other_products", 0.13, 10, 0.0, 0.58),
]
ALUMINUM_STOCKS = [
    ("transportation", 0.29, 20, 0.94),
    ("mechanical_engineering", 0.09, 40, 0.64),
    ("construction", 0.26, 50, 0.86),
    ("other_products", 0.36, 12, 0.66),
]
PACKAGING_SHARE = 0.12


def slug(name: str) -> str:
    out = "".join(ch.lower() if ch.isalnum() else "_" for ch in name)
    while "__" in out:
        out = out.replace("__", "_")
    return out.strip("_")


def fuel_ef(inputs: dict[str, float]) -> float:
    return round(sum(v * FUEL_EF.get(c, 0.0) for c, v in inputs.items()), 4)


def flows(d: dict[str, float]) -> str:
    return ";".join(f"{c}:{v:g}" for c, v in d.items() if v)


def tech(tid, ref, inputs, outputs, invest, ef, life, avail=1.0, first="", phase="", refcap="", var=0):
    return [tid, ref, flows(inputs), flows(outputs), invest, "", "", var, ef, life, "", avail, first, phase, refcap, ""]


def energy_techs() -> list[list]:
    return [
        tech("pv", "electricity", {}, {"electricity": 1}, per_mwh_year(500), 0, 25, 0.11, refcap=200 * TWH),
        tech("wind", "electricity", {}, {"electricity": 1}, per_mwh_year(1200), 0, 25, 0.32, refcap=300 * TWH),
        tech("ccgt", "electricity", {"natural_gas": 1.75}, {"electricity": 1}, per_mwh_year(800), 0.35, 30, 0.95, var=2),
        tech("coal_pp", "electricity", {"coal": 2.5}, {"electricity": 1}, per_mwh_year(1600), 0.85, 40, 0.9, phase=2038, var=4),
        tech("h2_turbine", "electricity", {"hydrogen": 1.7}, {"electricity": 1}, per_mwh_year(700), 0, 30, 0.95, var=2),
        tech("electrolyzer", "hydrogen", {"electricity": 1.45}, {"hydrogen": 1}, per_mwh_year(1100), 0, 20),
        tech("gas_boiler", "heat", {"natural_gas": 1.1}, {"heat": 1}, per_mwh_year(100), 0.22, 25, var=1),
        tech("oil_boiler", "heat", {"heating_oil": 1.1}, {"heat": 1}, per_mwh_year(100), 0.29, 25, var=1),
        tech("biomass_boiler", "heat", {"biomass": 1.15}, {"heat": 1}, per_mwh_year(300), 0, 25, var=2),
        tech("h2_boiler", "heat", {"hydrogen": 1.1}, {"heat": 1}, per_mwh_year(120), 0, 25, var=1),
        tech("e_heater", "heat", {"electricity": 1.02}, {"heat": 1}, per_mwh_year(150), 0, 25, var=1),
    ]


def industry_techs() -> list[list]:
    rows = []
    bf, oc, eaf, dr = STEEL
    inputs = {"iron_ore": 1.5, "electricity": bf[3], "coal": bf[4], "natural_gas": bf[5]}
    rows.append(tech("blast_furnace", "pig_iron", inputs, {"pig_iron": 1}, bf[1], 1.42, 40, 0.95))
    inputs = {"pig_iron": 1, "electricity": oc[3], "natural_gas": oc[5]}
    rows.append(tech("oxygen_converter", "steel", inputs, {"steel": 1}, oc[1], fuel_ef(inputs), 40, 0.95))
    rows.append(tech("eaf_scrap", "steel", {"steel_scrap": 1.1, "electricity": eaf[3], "heat": eaf[7]},
                     {"steel": 1}, eaf[1], 0, 40, 0.95))
    rows.append(tech("eaf_dri", "steel", {"iron_sponge": 1, "electricity": eaf[3], "heat": eaf[7]},
                     {"steel": 1}, eaf[1], 0, 40, 0.95))
    rows.append(tech("h2_dr", "iron_sponge", {"iron_ore": 1.4, "electricity": dr[3], "hydrogen": dr[6], "heat": dr[7]},
                     {"iron_sponge": 1}, dr[1], 0, 40, 0.95, first=2025))

    secondary = {
        "Aluminum melting furnace": ("aluminum_scrap", 1.0),
        "Kayser Recycling System": ("copper_scrap", 1.0),
        "Rolling oxide process": ("zinc_scrap", 1.0),
        "Zinc smelting furnace": ("zinc_scrap", 1.0),
    }
    for name, inv, _, power, coal, gas, heat, ref in NON_FERROUS:
        inputs = {"electricity": power, "coal": coal or 0, "natural_gas": gas or 0, "heat": heat or 0}
        if name in secondary:
            scrap, ratio = secondary[name]
            inputs = {scrap: ratio, **inputs}
        elif "Hall-Heroult" in name:
            inputs = {"alumina": 1.93, **inputs}
        elif name.startswith("Primary"):
            inputs = {f"{slug(ref)}_concentrate": 1.0, **inputs}
        product = slug(ref)
        first = 2030 if "inert" in name else ""
        rows.append(tech(slug(name), product, inputs, {product: 1}, inv, fuel_ef(inputs), 30, 0.95, first=first))

    for name, inv, _, power, gas, oil, h2, _ref in GLASS:
        kind = slug(name).replace("furnace_", "")
        variants = {"gas": {"natural_gas": mid(*gas), "electricity": power[0]},
                    "electric": {"electricity": power[1]},
                    "h2": {"hydrogen": mid(*h2), "electricity": power[0]}}
        if oil:
            variants["oil"] = {"heating_oil": mid(*oil), "electricity": power[0]}
        for carrier, inputs in variants.items():
            ef = round(fuel_ef(inputs) + 0.2, 4)
            batch = {"glass_batch": 1.2, **inputs}
            rows.append(tech(f"glass_{kind}_{carrier}", "glass", batch, {"glass": 1}, inv, ef, 15, 0.95))
            cullet = {"waste_glass": 1.0, **{c: round(v * 0.7, 4) for c, v in inputs.items()}}
            rows.append(tech(f"glass_{kind}_{carrier}_cullet", "glass", cullet, {"glass": 1}, inv,
                             fuel_ef(cullet), 15, 0.95))

    *machines, mech, chem = PAPER
    for name, inv, _, power, heat, _ref in machines:
        rows.append(tech(slug(name), "paper", {"pulp": 1, "electricity": power, "heat": heat},
                         {"paper": 1}, inv, 0, 30, 0.95))
    rows.append(tech("mechanical_defibering", "pulp", {"electricity": mech[3]}, {"pulp": 1, "heat": -mech[4]},
                     mech[1], 0, 30, 0.95))
    rows.append(tech("chemical_defibering", "pulp", {"electricity": chem[3], "heat": chem[4]}, {"pulp": 1},
                     chem[1], 0, 30, 0.95))
    rows.append(tech("recovered_paper_pulping", "pulp", {"recovered_paper": 1.1, "electricity": 0.3}, {"pulp": 1},
                     300, 0, 30, 0.95))

    for name, inv, _, inputs, ref in CHEMICALS:
        product = slug(ref)
        ef = 1.2 if name == "Haber-Bosch process" else fuel_ef(inputs)
        rows.append(tech(slug(name), product, dict(inputs), {product: 1}, inv, ef, 30, 0.95))
    for name, inv, _, power, methanol, naphtha, _ref in HVC:
        inputs = {"electricity": power, "methanol": methanol or 0, "naphtha": naphtha or 0}
        rows.append(tech(slug(name), "hvc", inputs, {"hvc": 1}, inv, 0, 30, 0.95))
    name, inv, _, h2, _unused, _ref = FISCHER_TROPSCH
    rows.append(tech("fischer_tropsch", "synfuel", {"hydrogen": h2}, {"synfuel": 1}, round(inv / 11.9, 3), 0, 25, 0.95))
    return rows


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    energy = [
        ["electricity", "energy", "MWh", "", "", "", ""],
        ["heat", "energy", "MWh", "", "", "", ""],
        ["hydrogen", "energy", "MWh", "true", "100", "", ""],
        ["synfuel", "energy", "MWh", "true", "160", "", ""],
        ["natural_gas", "energy", "MWh", "true", "25", "", ""],
        ["coal", "energy", "MWh", "true", "22", "", ""],
        ["heating_oil", "energy", "MWh", "true", "45", "", ""],
        ["crude_oil", "energy", "MWh", "true", "40", "", ""],
        ["biomass", "energy", "MWh", "true", "30", "", ""],
    ]
    materials = [
        ["iron_ore", "material", "tonne", "true", "110", "", ""],
        ["pig_iron", "material", "tonne", "", "", "", ""],
        ["iron_sponge", "material", "tonne", "", "", "", ""],
        ["steel", "material", "tonne", "", "", "", ""],
        ["steel_scrap", "material", "tonne", "", "", "steel", "240"],
        ["alumina", "material", "tonne", "true", "350", "", ""],
        ["copper_concentrate", "material", "tonne", "true", "2800", "", ""],
        ["zinc_concentrate", "material", "tonne", "true", "1600", "", ""],
        ["glass_batch", "material", "tonne", "true", "80", "", ""],
        ["aluminum", "material", "tonne", "", "", "", ""],
        ["aluminum_scrap", "material", "tonne", "", "", "aluminum", "350"],
        ["copper", "material", "tonne", "", "", "", ""],
        ["copper_scrap", "material", "tonne", "", "", "copper", "2650"],
        ["zinc", "material", "tonne", "", "", "", ""],
        ["zinc_scrap", "material", "tonne", "", "", "zinc", "1470"],
        ["glass", "material", "tonne", "", "", "", ""],
        ["waste_glass", "material", "tonne", "", "", "glass", "50"],
        ["pulp", "material", "tonne", "", "", "", ""],
        ["paper", "material", "tonne", "", "", "", ""],
        ["recovered_paper", "material", "tonne", "", "", "paper", "50"],
        ["chlorine", "material", "tonne", "", "", "", ""],
        ["ammonia", "material", "tonne", "", "", "", ""],
        ["methanol", "material", "tonne", "", "", "", ""],
        ["naphtha", "material", "tonne", "true", "550", "", ""],
        ["hvc", "material", "tonne", "", "", "", ""],
    ]
    write(
        "commodities.csv",
        ["id", "kind", "unit", "importable", "import_price", "secondary_of", "scrap_price"],
        energy + materials,
        comment="Prices in EUR per MWh or per tonne. Scrap prices: steel 0.24, aluminium 0.35, copper 2.65,\n"
                "zinc 1.47, waste glass and paper 0.05 EUR/kg; imported hydrogen 0.10, synthetic fuel 0.16 EUR/kWh.",
    )

    header = [
        "id", "reference_commodity", "inputs", "outputs", "invest_cost", "invest_cost_band",
        "fixed_om_share", "variable_cost", "emission_factor", "lifetime", "max_capacity",
        "availability", "first_available_year", "phase_out_year", "reference_capacity", "storage_hours",
    ]
    write("technologies.csv", header, energy_techs() + industry_techs(), comment=ASSUMPTIONS)

    rows = []
    years = (2020, 2030, 2040, 2050)
    for label, values in DEMAND.items():
        c = DEMAND_COMMODITY.get(label)
        if c is None:
            continue
        for y, v in zip(years, values):
            rows.append([c, y, round(v * MT), ""])
    heat = sum(a + b + c for _, a, b, c, _ in AGGREGATED) * TWH
    power = sum(e for *_, e in AGGREGATED) * TWH
    for y in years:
        rows.append(["heat", y, round(heat), ""])
        rows.append(["electricity", y, round(power), ""])
    write("demands.csv", ["commodity", "year", "quantity", "profile"], rows,
          comment="Goods in tonnes; heat and electricity of the aggregated industries in MWh.\n"
                  "Cement and urea have no process rows and are not modelled.")

    write("aggregated_industry.csv", ["branch", "heat_below_100C", "heat_100_500C", "heat_above_500C", "electricity"],
          [list(r) for r in AGGREGATED], comment="TWh in 2019; summed into the heat and electricity demands.")

    write(
        "system.csv",
        ["key", "value"],
        [
            ["base_year_emissions", 250000000],
            ["first_path_year", 2020],
            ["base_rate.steel", 0.30],
            ["base_rate.aluminum", 0.50],
            ["base_rate.copper", 0.40],
            ["base_rate.zinc", 0.30],
            ["base_rate.glass", 0.30],
            ["base_rate.paper", 0.65],
        ],
        comment="Base-year emissions of the covered slice (tCO2), a desk estimate. Base rates are recycling\n"
                "shares of 2020, capped by what the secondary supply series can deliver.",
    )

    stock_rows = [["steel", sid, mu, "", share, rec, obs, 1.0] for sid, share, mu, obs, rec in STEEL_STOCKS]
    for sid, share, mu, rec in ALUMINUM_STOCKS:
        stock_rows.append(["aluminum", sid, mu, "", round(share * (1 - PACKAGING_SHARE), 4), rec, 0.0, 1.0])
    stock_rows.append(["aluminum", "packaging", 2, 1.0, PACKAGING_SHARE, 1.0, 0.0, 1.0])
    write(
        "stocks.csv",
        ["material", "stock_id", "mu", "sigma", "sector_share", "recovery_rate", "obsolete_share", "collection_rate"],
        stock_rows,
        comment="Empty sigma means 0.3 * mu. Aluminium packaging returns within about two years (fifth stock); sigma stays at one year so annual sampling keeps its mass.",
    )

    hist_years = np.arange(1870, 2020)
    steel = np.interp(hist_years, [1870, 1900, 1913, 1945, 1950, 1960, 1970, 1974, 1980, 1990, 2000, 2010, 2019],
                      [1, 6, 17, 2, 12, 34, 45, 53, 44, 44, 46, 44, 40]) * MT
    alu = np.interp(hist_years, [1870, 1900, 1939, 1945, 1950, 1970, 1980, 2000, 2019],
                    [0, 0, 0.2, 0.0, 0.1, 0.9, 1.2, 1.3, 1.3]) * MT
    rows = [["steel", int(y), round(float(q))] for y, q in zip(hist_years, steel)]
    rows += [["aluminum", int(y), round(float(q))] for y, q in zip(hist_years, alu) if q > 0]
    write("history.csv", ["material", "year", "quantity"], rows,
          comment="Synthetic production histories in tonnes, piecewise linear through rough national figures.")

    write(
        "secondary_series.csv",
        ["material", "base_year", "base_quantity", "growth_rate", "recovery_rate"],
        [
            ["glass", 2019, 3000000, 0.005, 0.85],
            ["paper", 2019, 22600000, 0.004, 0.75],
            ["copper", 2019, 300000, 0.0, 1.0],
            ["zinc", 2019, 100000, 0.0, 1.0],
        ],
        comment="Waste glass from about 3 Mt collected, recovered paper as a share of production.\n"
                "Copper and zinc scrap volumes are desk assumptions held constant.",
    )


if __name__ == "__main__":
    main()
