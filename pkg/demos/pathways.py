"""
Thirty years of caps: comparing recycling policies
==================================================

Three pathways to 2050 under the same caps. Recycling can be optimized
against its scrap supply, held at base-year rates, or ruled out. A price sweep
then shows where paid-for scrap stops being worth it.
"""

from recyclesys import (
    BOUNDED_BY_AVAILABILITY,
    FIXED_AT_RATE,
    FORBIDDEN,
    CapSchedule,
    RecyclingPolicy,
    ScenarioSpec,
    SweepSpec,
    compare,
    run_scenario,
    sweep,
)

caps = CapSchedule(100000, {2020: 0.40, 2030: 0.55, 2050: 0.95})


def spec(name, mode):
    # typical_periods=None keeps one flat step per year so the demo runs in seconds
    return ScenarioSpec(name, "builtin:desk", caps, RecyclingPolicy(mode=mode), typical_periods=None)


results = [run_scenario(spec(n, m)) for n, m in [("optimized", BOUNDED_BY_AVAILABILITY), ("fixed", FIXED_AT_RATE), ("none", FORBIDDEN)]]
print(compare(results, "optimized").text())

best = results[0]
for y in best.years:
    print(f"{y}: emissions {best.emissions[y]:8.0f}  steel recycling {best.recycling_rates[y]['steel']:.2f}")

# Raise the scrap price and record the recycling share in the final year.
grid = (240, 360, 480, 900, 2400)
swept = sweep(SweepSpec(spec("sweep", BOUNDED_BY_AVAILABILITY), "scrap_prices.steel", grid))
for price, share in zip(grid, swept.shares("steel")):
    print(f"scrap at {price:5d}/t: recycling share {share:.2f}")
