import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import annuity
from recyclesys import load_dataset
from recyclesys.errors import DomainError, UnknownNameError
from recyclesys.system import (
    Commodity,
    DemandSet,
    SystemGraph,
    Technology,
    annualized_cost,
    capacity_cost,
    direct_emissions,
    validate_system,
)


def steel_graph(**tech_kw):
    return SystemGraph(
        commodities={
            "steel": Commodity("steel", "material", "tonne"),
            "coal": Commodity("coal", "energy", "MWh", importable=True, import_price=20.0),
        },
        technologies={
            "bf": Technology("bf", "steel", inputs={"coal": 5.0}, outputs={"steel": 1.0}, emission_factor=1.42, **tech_kw),
        },
        demands=DemandSet({("steel", 2020): 10.0}),
    )


class TestValidate:
    def test_empty_graph(self):
        assert validate_system(SystemGraph()) == []

    def test_unsatisfiable_demand(self):
        g = SystemGraph(
            commodities={"steel": Commodity("steel", "material", "tonne")},
            demands=DemandSet({("steel", 2030): 1.0}),
        )
        diags = validate_system(g)
        assert [d.code for d in diags] == ["unsatisfiable demand"]
        assert diags[0].subject == "steel"

    @pytest.mark.parametrize("name", ["desk", "sm_b"])
    def test_shipped_datasets_are_clean(self, name):
        assert validate_system(load_dataset(f"builtin:{name}").graph) == []

    def test_small_graph_is_clean(self):
        assert validate_system(steel_graph()) == []

    @pytest.mark.parametrize(
        "kw",
        [{"lifetime": 0}, {"fixed_om_share": 1.5}, {"invest_cost": -1.0}, {"availability": 1.2}, {"availability": "nope"}],
    )
    def test_technology_invariants(self, kw):
        assert [d.code for d in validate_system(steel_graph(**kw))] == ["technology"]

    def test_reference_must_be_output(self):
        g = steel_graph()
        bad = Technology("x", "coal", outputs={"steel": 1.0})
        g = SystemGraph(g.commodities, {**g.technologies, "x": bad}, g.demands)
        assert any(d.subject == "x" for d in validate_system(g))

    def test_import_price_iff_importable(self):
        g = SystemGraph(commodities={"gas": Commodity("gas", "energy", "MWh", importable=True)})
        assert [d.code for d in validate_system(g)] == ["commodity"]

    def test_unit_matches_kind(self):
        g = SystemGraph(commodities={"gas": Commodity("gas", "energy", "tonne")})
        assert [d.code for d in validate_system(g)] == ["commodity"]

    def test_consumed_commodity_needs_a_source(self):
        g = steel_graph()
        coal = Commodity("coal", "energy", "MWh")
        g = SystemGraph({**g.commodities, "coal": coal}, g.technologies, g.demands)
        codes = {d.code for d in validate_system(g)}
        assert codes == {"supply", "unsatisfiable demand"}

    def test_idempotent(self):
        g = load_dataset("builtin:desk").graph
        bad = SystemGraph(g.commodities, g.technologies, DemandSet({("unobtainium", 2020): 1.0}), g.profiles)
        assert validate_system(bad) == validate_system(bad)


class TestAnnualizedCost:
    def test_straight_line(self):
        assert annualized_cost(1000, 20, 0.0) == 50.0

    def test_annuity(self):
        assert annualized_cost(1000, 20, 0.05) == pytest.approx(80.24, abs=0.01)

    def test_blast_furnace_straight_line(self):
        assert annualized_cost(365, 20, 0.0) == pytest.approx(18.25)

    def test_continuous_at_zero_rate(self):
        assert annualized_cost(1000, 20, 1e-9) == pytest.approx(annualized_cost(1000, 20, 0.0), rel=1e-6)

    @pytest.mark.parametrize("lifetime, rate", [(0, 0.05), (20, -0.01)])
    def test_domain(self, lifetime, rate):
        with pytest.raises(DomainError):
            annualized_cost(1000, lifetime, rate)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(0, 1e4), st.integers(1, 60), st.floats(0.001, 0.2))
    def test_matches_discounted_sum(self, invest, lifetime, rate):
        assert annualized_cost(invest, lifetime, rate) == pytest.approx(annuity(invest, lifetime, rate), rel=1e-9, abs=1e-9)

    def test_capacity_cost_adds_fixed_om(self):
        t = Technology("t", "x", outputs={"x": 1.0}, invest_cost=1000, lifetime=20, fixed_om_share=0.05)
        assert capacity_cost(t, 0.0) == pytest.approx(50.0 + 50.0)


class TestDirectEmissions:
    def test_zero_activity(self):
        assert direct_emissions(steel_graph(), {"bf": 0.0}) == 0.0

    def test_blast_furnace(self):
        assert direct_emissions(steel_graph(), {"bf": 1.0}) == pytest.approx(1.42)

    def test_hand_sum(self):
        g = SystemGraph(
            technologies={
                "a": Technology("a", "x", outputs={"x": 1.0}, emission_factor=0.5),
                "b": Technology("b", "x", outputs={"x": 1.0}, emission_factor=0.25),
            }
        )
        assert direct_emissions(g, {"a": 2.0, "b": 4.0}) == pytest.approx(2.0)

    def test_unknown_technology(self):
        with pytest.raises(UnknownNameError):
            direct_emissions(steel_graph(), {"nope": 1.0})

    @settings(max_examples=50, deadline=None)
    @given(st.floats(0, 1e6), st.floats(0, 1e6))
    def test_linear(self, a, b):
        g = steel_graph()
        total = direct_emissions(g, {"bf": a + b})
        assert total == pytest.approx(direct_emissions(g, {"bf": a}) + direct_emissions(g, {"bf": b}), rel=1e-12)


class TestDemandSet:
    def test_interpolates_and_holds(self):
        d = DemandSet({("steel", 2020): 10.0, ("steel", 2030): 20.0})
        assert d.quantity("steel", 2025) == pytest.approx(15.0)
        assert d.quantity("steel", 2010) == 10.0
        assert d.quantity("steel", 2050) == 20.0
        assert d.quantity("glass", 2025) == 0.0


def test_graph_lookups():
    g = load_dataset("builtin:desk").graph
    assert g.recycling_technologies("steel") == ["eaf_scrap"]
    assert g.secondary_commodities() == ["steel_scrap"]
    assert g.recycled_materials() == ["steel"]
    assert "eaf_scrap" in g.producers("steel")
    with pytest.raises(UnknownNameError):
        g.technology("nope")
    with pytest.raises(UnknownNameError):
        g.commodity("nope")
