"""
How much steel scrap comes back?
================================

Steel that enters an in-use stock (a car, a bridge, a machine) leaves it again
after a lifetime that scatters around a mean. This walk-through builds the
scrap forecast of the desk dataset step by step.
"""

import numpy as np

from recyclesys import StockProfile, available_secondary, load_dataset, retention_fraction, scrap_outflow

# A construction stock: fifty years mean lifetime, fifteen years spread.
construction = StockProfile("construction", mu=50, sigma=15, sector_share=1.0)

# Share of a vintage released per year, t years after it entered the stock.
t = np.array([0, 25, 50, 75, 100])
print("released per year at age", dict(zip(t.tolist(), np.round(retention_fraction(50, 15, t), 3).tolist())))

# Ten million tonnes built in one year come back spread over a century.
ages = np.arange(0, 101)
returned = scrap_outflow(10e6, construction, ages)
print(f"peak return {returned.max():.0f} t/a at age {ages[returned.argmax()]}")
print(f"returned within a century: {returned.sum() / 10e6:.3f} of the inflow")

# The desk dataset carries a full inflow history. Summing every vintage and
# stock gives the scrap available to recycling routes in a given year.
desk = load_dataset("builtin:desk")
for year in (2020, 2035, 2050):
    a = available_secondary(desk.ledger, "steel", year)
    print(f"{year}: theoretical {a.theoretical:12.0f}  after collection and recovery {a.effective:12.0f}")

# Each stock has its own share of the inflow and its own recovery rate.
for s in desk.ledger.stock_profiles("steel"):
    print(f"  {s.stock_id:24s} mu={s.mu:4.0f}  share={s.sector_share:.2f}  yield={s.yield_factor:.3f}")
