"""
One year, one cap: recycling against primary production
========================================================

A single-year linear program picks the cheapest mix of routes that meets
demand under an emission cap. Its cap dual is the marginal abatement cost.
"""

from recyclesys import (
    BOUNDED_BY_AVAILABILITY,
    FORBIDDEN,
    RecyclingPolicy,
    YearProblem,
    build_year_lp,
    load_dataset,
    solve,
    summarize,
)

desk = load_dataset("builtin:desk")


def solve_year(cap, mode=BOUNDED_BY_AVAILABILITY, year=2040):
    p = YearProblem(
        year=year,
        graph=desk.graph,
        cap=cap,
        availability=desk.availabilities(year),
        policy=RecyclingPolicy(mode=mode),
        base_year_rates=desk.base_year_rates,
        import_emission_factors=desk.import_emission_factors,
    )
    lp = build_year_lp(p)
    sol = solve(lp)
    return sol, summarize(p, lp, sol)


# Tighten the cap and watch the recycling rate and the carbon price.
for cap in (80e3, 60e3, 40e3, 20e3):
    sol, s = solve_year(cap)
    print(
        f"cap {cap:8.0f}: cost {sol.objective:14.0f}  "
        f"steel recycling {s.recycling_rates['steel']:.2f}  marginal abatement {abs(s.cap_dual):8.1f}"
    )

# The dual is a derivative; check it against a small cap change.
cap, eps = 40e3, 4.0
sol, s = solve_year(cap)
lower, _ = solve_year(cap - eps)
print(f"dual {s.cap_dual:.4f}  finite difference {(sol.objective - lower.objective) / eps:.4f}")

# Without recycling routes the same cap costs more.
no_rec, _ = solve_year(cap, FORBIDDEN)
print(f"recycling saves {no_rec.objective - sol.objective:.0f} per year at cap {cap:.0f}")
