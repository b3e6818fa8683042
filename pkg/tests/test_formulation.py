import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from recyclesys.errors import ConfigurationError, DomainError
from recyclesys.formulation import (
    BOUNDED_BY_AVAILABILITY,
    FIXED_AT_RATE,
    FORBIDDEN,
    RecyclingPolicy,
    YearProblem,
    activity_terms,
    add_piecewise_invest_cost,
    build_year_lp,
    segment_cost_factors,
    summarize,
)
from recyclesys.program import LinearProgram
from recyclesys.simplex import LpStatus, solve
from recyclesys.system import Commodity, DemandSet, SystemGraph, Technology, capacity_cost
from recyclesys.tsa import TypicalPeriodSet


def desk_problem(desk, mode=BOUNDED_BY_AVAILABILITY, year=2030, cap=None, periods=None, **kw):
    policy = kw.pop("policy", None) or RecyclingPolicy(mode=mode)
    return YearProblem(
        year=year,
        graph=desk.graph,
        cap=cap,
        availability=desk.availabilities(year),
        policy=policy,
        periods=periods or TypicalPeriodSet.single(),
        base_year_rates=desk.base_year_rates,
        import_emission_factors=desk.import_emission_factors,
        **kw,
    )


def solved(p):
    lp = build_year_lp(p)
    sol = solve(lp)
    assert sol.optimal, sol.status
    return lp, sol, summarize(p, lp, sol)


def one_tech_graph():
    return SystemGraph(
        commodities={"power": Commodity("power", "energy", "MWh")},
        technologies={"pv": Technology("pv", "power", outputs={"power": 1.0}, invest_cost=50.0)},
        demands=DemandSet({("power", 2030): 100.0}),
    )


class TestStructure:
    def test_one_technology_one_demand(self):
        periods = TypicalPeriodSet(2, {}, np.array([3, 2]), np.array([0, 0, 1, 0, 1]), np.array([0, 2]))
        p = YearProblem(2030, one_tech_graph(), periods=periods, segments=1)
        lp = build_year_lp(p)
        names = {v.name for v in lp.variables}
        assert names == {"cap[pv]"} | {f"act[pv][{s}]" for s in ("0,0", "0,1", "1,0", "1,1")}
        balances = [c for c in lp.constraints if c.name.startswith("balance[")]
        assert len(balances) == 4 and all(c.relation == "=" for c in balances)
        assert sum(w * c.rhs for w, c in zip([3, 3, 2, 2], balances)) == pytest.approx(100.0)
        assert not lp.has_constraint("co2_cap")

    def test_cap_row_only_with_cap(self, desk):
        assert build_year_lp(desk_problem(desk, cap=5e4)).constraint("co2_cap").rhs == 5e4
        assert not build_year_lp(desk_problem(desk, cap=math.inf)).has_constraint("co2_cap")

    def test_scrap_row_bounds_recycling_input(self, desk):
        p = desk_problem(desk)
        lp = build_year_lp(p)
        row = lp.constraint("scrap[steel]")
        assert row.relation == "<="
        assert row.rhs == pytest.approx(desk.availability("steel", 2030).effective)
        assert dict(row.coefficients) == {"sec[steel_scrap]": 1.0}
        balance = lp.constraint("balance[steel_scrap]")
        assert balance.coefficients == {"sec[steel_scrap]": 1.0, "act[eaf_scrap]": -1.1}

    def test_missing_availability(self, desk):
        p = dataclasses.replace(desk_problem(desk), availability={})
        with pytest.raises(ConfigurationError):
            build_year_lp(p)

    def test_costs_are_nonnegative(self, desk, desk_periods):
        lp = build_year_lp(desk_problem(desk, periods=desk_periods, cap=3e4))
        assert all(v.cost >= 0 for v in lp.variables)

    def test_negative_cap(self, desk):
        with pytest.raises(DomainError):
            desk_problem(desk, cap=-1.0)

    def test_text_export_round_trips(self, desk):
        lp = build_year_lp(desk_problem(desk, cap=6e4))
        assert solve(LinearProgram.from_text(lp.to_text())).objective == pytest.approx(solve(lp).objective, rel=1e-12)


class TestPiecewiseCost:
    def test_factors(self):
        assert segment_cost_factors(2, 0.2).tolist() == pytest.approx([0.9, 1.1])
        assert segment_cost_factors(1, 0.2).tolist() == [1.0]

    def test_segment_costs(self):
        g = one_tech_graph()
        tech = g.technologies["pv"]
        lp = build_year_lp(YearProblem(2030, g, segments=1))
        flat = capacity_cost(tech)
        add_piecewise_invest_cost(lp, tech, 2, reference_capacity=100.0, band=0.2)
        assert lp.variable("seg[pv][0]").cost == pytest.approx(0.9 * flat)
        assert lp.variable("seg[pv][1]").cost == pytest.approx(1.1 * flat)
        assert lp.variable("seg[pv][0]").upper == pytest.approx(50.0)
        assert lp.variable("cap[pv]").cost == 0.0

    def test_negative_band(self):
        g = one_tech_graph()
        lp = build_year_lp(YearProblem(2030, g, segments=1))
        with pytest.raises(DomainError):
            add_piecewise_invest_cost(lp, g.technologies["pv"], 4, reference_capacity=1.0, band=-0.1)

    def test_zero_band_keeps_objective(self, desk):
        p = desk_problem(desk, cap=5e4, segments=1)
        lp = build_year_lp(p)
        base = solve(lp).objective
        for tid in sorted(desk.graph.technologies):
            add_piecewise_invest_cost(lp, desk.graph.technologies[tid], 4, reference_capacity=1e4, band=0.0)
        assert solve(lp).objective == pytest.approx(base, rel=1e-9)

    def test_band_splits_near_equal_routes(self):
        def caps(band):
            g = SystemGraph(
                commodities={"good": Commodity("good", "material", "tonne")},
                technologies={
                    t: Technology(t, "good", outputs={"good": 1.0}, invest_cost=c, invest_cost_band=band)
                    for t, c in (("a", 100.0), ("b", 101.0))
                },
                demands=DemandSet({("good", 2030): 50.0}),
            )
            p = YearProblem(2030, g)
            return solved(p)[2].capacities

        assert min(caps(0.2).values()) > 0
        assert caps(0.0) == pytest.approx({"a": 50.0, "b": 0.0})


class TestRecyclingPolicy:
    def test_forbidden_zeroes_recycling(self, desk):
        p = desk_problem(desk, FORBIDDEN)
        lp = build_year_lp(p)
        for name in ["cap[eaf_scrap]", *activity_terms(desk.graph, p.periods, "eaf_scrap"), "sec[steel_scrap]"]:
            assert lp.variable(name).upper == 0.0
        assert solved(p)[2].secondary_production["steel"] == 0.0

    def test_fixed_zero_equals_forbidden(self, desk):
        fixed = desk_problem(desk, policy=RecyclingPolicy(FIXED_AT_RATE, {"steel": 0.0}), cap=7e4)
        forbidden = desk_problem(desk, FORBIDDEN, cap=7e4)
        assert solved(fixed)[1].objective == pytest.approx(solved(forbidden)[1].objective, rel=1e-9)

    def test_zero_availability_means_no_recycling(self, desk):
        p = dataclasses.replace(desk_problem(desk), availability={"steel": 0.0})
        assert solved(p)[2].activities["eaf_scrap"] == pytest.approx(0.0, abs=1e-9)

    def test_fixed_rate_is_met(self, desk):
        p = desk_problem(desk, policy=RecyclingPolicy(FIXED_AT_RATE, {"steel": 0.45}))
        p = dataclasses.replace(p, availability={"steel": 1e6})
        _, _, s = solved(p)
        steel = sum(s.activities[t] for t in desk.graph.producers("steel"))
        assert s.activities["eaf_scrap"] / steel == pytest.approx(0.45, rel=1e-9)
        assert s.recycling_rates["steel"] == pytest.approx(0.45, rel=1e-9)

    def test_fixed_rate_defaults_to_base_year(self, desk):
        _, _, s = solved(desk_problem(desk, FIXED_AT_RATE))
        assert s.recycling_rates["steel"] == pytest.approx(desk.base_year_rates["steel"], rel=1e-9)

    def test_rate_outside_unit_interval(self):
        with pytest.raises(DomainError):
            RecyclingPolicy(FIXED_AT_RATE, {"steel": 1.5})
        with pytest.raises(ConfigurationError):
            RecyclingPolicy("sometimes")

    def test_effective_from_moves_recycling_start(self, desk):
        late = dataclasses.replace(desk.graph.technologies["eaf_scrap"], first_available_year=2040)
        g = dataclasses.replace(desk.graph, technologies={**desk.graph.technologies, "eaf_scrap": late})
        p = dataclasses.replace(desk_problem(desk), graph=g)
        assert not p.available(late)
        moved = dataclasses.replace(p, policy=RecyclingPolicy(effective_from=2030))
        assert moved.available(late)

    @pytest.mark.parametrize("cap", [9e4, 6e4, 4e4])
    def test_nesting_in_one_year(self, desk, cap):
        costs = {}
        for mode in (BOUNDED_BY_AVAILABILITY, FIXED_AT_RATE, FORBIDDEN):
            costs[mode] = solved(desk_problem(desk, mode, year=2040, cap=cap))[1].objective
        assert costs[BOUNDED_BY_AVAILABILITY] <= costs[FIXED_AT_RATE] * (1 + 1e-9)
        assert costs[BOUNDED_BY_AVAILABILITY] <= costs[FORBIDDEN] * (1 + 1e-9)


class TestSolutions:
    def test_balances_hold_on_typical_periods(self, desk, desk_periods):
        p = desk_problem(desk, year=2050, cap=5e3, periods=desk_periods)
        lp, sol, s = solved(p)
        rows = [c.name for c in lp.constraints if c.name.startswith("balance[")]
        assert max(abs(lp.residual(r, sol.primal)) for r in rows) <= 1e-8
        assert s.emissions <= 5e3 + 1e-6
        assert s.cap_dual < 0

    def test_summary_emissions_match_activities(self, desk):
        _, _, s = solved(desk_problem(desk, cap=6e4))
        direct = sum(a * desk.graph.technologies[t].emission_factor for t, a in s.activities.items())
        assert s.emissions == pytest.approx(direct + sum(s.imports.get(c, 0.0) * f for c, f in desk.import_emission_factors.items()))

    @settings(max_examples=15, deadline=None)
    @given(st.floats(2e4, 9e4), st.floats(1.05, 1.5))
    def test_relaxing_the_cap_never_costs_more(self, desk, cap, factor):
        tight = solved(desk_problem(desk, year=2040, cap=cap))[1].objective
        loose = solved(desk_problem(desk, year=2040, cap=cap * factor))[1].objective
        assert loose <= tight * (1 + 1e-9)


class TestStorage:
    @staticmethod
    def day_night(with_battery=True):
        techs = {"pv": Technology("pv", "power", outputs={"power": 1.0}, invest_cost=50.0, availability="sun")}
        if with_battery:
            techs["battery"] = Technology(
                "battery", "power", inputs={"power": 1.25}, outputs={"power": 1.0}, invest_cost=5.0, storage_hours=1.0
            )
        g = SystemGraph(
            commodities={"power": Commodity("power", "energy", "MWh")},
            technologies=techs,
            demands=DemandSet({("power", 2030): 100.0}),
        )
        periods = TypicalPeriodSet(2, {"sun": np.array([[1.0, 0.0]])}, np.array([1]), np.array([0]), np.array([0]))
        return YearProblem(2030, g, periods=periods, segments=1)

    def test_night_demand_needs_storage(self):
        assert solve(build_year_lp(self.day_night(False))).status is LpStatus.INFEASIBLE

    def test_battery_shifts_day_surplus_with_losses(self):
        lp, sol, _ = solved(self.day_night())
        x = sol.primal
        assert x["act[battery][0,1]"] == pytest.approx(50.0)
        assert x["chg[battery][0,0]"] == pytest.approx(50.0)
        # the charge is drawn with its losses on top of the daytime demand
        assert x["act[pv][0,0]"] == pytest.approx(50.0 + 1.25 * 50.0)
        rows = [c.name for c in lp.constraints if c.name.startswith(("balance[", "storage["))]
        assert max(abs(lp.residual(r, x)) for r in rows) <= 1e-8
