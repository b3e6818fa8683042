import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import gaussian_density
from recyclesys import load_dataset
from recyclesys.errors import DomainError, UnknownNameError
from recyclesys.mfa import (
    GrowthSeries,
    InflowLedger,
    StockProfile,
    available_secondary,
    backfill_prepath,
    default_sigma,
    retention_fraction,
    scrap_outflow,
)

STEEL_SPLITS = (
    StockProfile("transportation", 13, default_sigma(13), 0.3),
    StockProfile("mechanical_engineering", 20, default_sigma(20), 0.1),
    StockProfile("construction", 50, default_sigma(50), 0.47),
    StockProfile("other_products", 10, default_sigma(10), 0.13),
)


def single(mu=50.0, sigma=15.0, **kw):
    return StockProfile("s", mu, sigma, 1.0, **kw)


class TestRetentionFraction:
    @pytest.mark.parametrize(
        "dt, expected, tol",
        [(10, 7.6e-4, 0.05e-4), (30, 1.093e-2, 0.005e-2), (50, 2.660e-2, 0.0005e-2)],
    )
    def test_reference_values(self, dt, expected, tol):
        assert retention_fraction(50, 15, dt) == pytest.approx(expected, abs=tol)

    def test_peak_is_normalizing_constant(self):
        assert retention_fraction(50, 15, 50) == pytest.approx(1 / (15 * math.sqrt(2 * math.pi)), rel=1e-15)

    def test_vectorized(self):
        out = retention_fraction(50, 15, [10, 30])
        assert out.shape == (2,)
        assert out[1] == pytest.approx(gaussian_density(50, 15, 30))

    @pytest.mark.parametrize("sigma", [0.0, -1.0])
    def test_nonpositive_sigma(self, sigma):
        with pytest.raises(DomainError):
            retention_fraction(50, sigma, 10)


class TestScrapOutflow:
    def test_zero_inflow(self):
        assert all(scrap_outflow(0.0, single(), dt) == 0.0 for dt in range(0, 120, 7))

    def test_peak_identity_with_default_sigma(self):
        s = StockProfile("transport", 13, default_sigma(13), 1.0)
        assert scrap_outflow(1e6, s, 13) == pytest.approx(1e6 / (s.sigma * math.sqrt(2 * math.pi)))

    def test_negative_inflow(self):
        with pytest.raises(DomainError):
            scrap_outflow(-1.0, single(), 10)

    def test_profile_validation(self):
        with pytest.raises(DomainError):
            StockProfile("s", 10, 0.0, 1.0)
        with pytest.raises(DomainError):
            StockProfile("s", 10, 3.0, 1.0, recovery_rate=1.2)


class TestAvailableSecondary:
    def test_single_inflow_equals_outflow(self):
        s = single()
        ledger = InflowLedger({"steel": (s,)}, {("steel", "s", 2000): 4e6})
        got = available_secondary(ledger, "steel", 2033)
        assert got.theoretical == pytest.approx(scrap_outflow(4e6, s, 33))

    def test_two_inflows_hand_sum(self):
        ledger = InflowLedger({"steel": (single(),)}, {("steel", "s", 2020): 5e6, ("steel", "s", 2021): 5e6})
        expected = 5e6 * (gaussian_density(50, 15, 30) + gaussian_density(50, 15, 29))
        assert available_secondary(ledger, "steel", 2050).theoretical == pytest.approx(expected, rel=1e-12)

    def test_only_earlier_years_count(self):
        ledger = InflowLedger({"steel": (single(),)}, {("steel", "s", 2050): 5e6})
        assert available_secondary(ledger, "steel", 2050).theoretical == 0.0

    def test_constant_inflow_reaches_steady_state(self):
        s = single(mu=30, sigma=9, recovery_rate=0.8, obsolete_share=0.1, collection_rate=0.9)
        D = 2e6
        ledger = InflowLedger({"steel": (s,)}, {("steel", "s", y): D for y in range(1700, 2000)})
        got = available_secondary(ledger, "steel", 2000)
        assert got.effective == pytest.approx(D * 0.9 * 0.8 * 0.9, rel=0.01)

    def test_unknown_material(self):
        with pytest.raises(UnknownNameError):
            available_secondary(InflowLedger(), "copper", 2030)


class TestBackfill:
    def test_sector_split(self):
        ledger = backfill_prepath({2015: 40e6}, STEEL_SPLITS)
        got = [ledger.inflow("steel", s.stock_id, 2015) for s in STEEL_SPLITS]
        assert got == pytest.approx([12e6, 4e6, 18.8e6, 5.2e6])

    def test_empty_history(self):
        assert backfill_prepath({}, STEEL_SPLITS).inflows == {}

    def test_constant_history_gives_constant_columns(self):
        ledger = backfill_prepath({y: 30e6 for y in range(2010, 2020)}, STEEL_SPLITS)
        for s in STEEL_SPLITS:
            assert len({ledger.inflow("steel", s.stock_id, y) for y in range(2010, 2020)}) == 1

    def test_negative_production(self):
        with pytest.raises(DomainError):
            backfill_prepath({2010: -1.0}, STEEL_SPLITS)

    def test_history_must_precede_path(self):
        with pytest.raises(DomainError):
            backfill_prepath({2020: 1.0}, STEEL_SPLITS, first_path_year=2020)

    def test_shares_must_sum_to_one(self):
        with pytest.raises(DomainError):
            backfill_prepath({2010: 1.0}, STEEL_SPLITS[:2])


class TestLedger:
    def test_with_inflow_splits_and_is_write_once(self):
        ledger = backfill_prepath({2019: 1.0}, STEEL_SPLITS, first_path_year=2020)
        ledger = ledger.with_inflow("steel", 2020, 10.0)
        assert ledger.inflow("steel", "construction", 2020) == pytest.approx(4.7)
        assert ledger.is_endogenous(2020) and not ledger.is_endogenous(2019)
        with pytest.raises(DomainError):
            ledger.with_inflow("steel", 2020, 1.0)
        with pytest.raises(DomainError):
            ledger.with_inflow("steel", 2019, 1.0)

    def test_ledger_is_not_mutated(self):
        ledger = backfill_prepath({2019: 1.0}, STEEL_SPLITS, first_path_year=2020)
        before = dict(ledger.inflows)
        ledger.with_inflow("steel", 2021, 5.0)
        assert dict(ledger.inflows) == before


def test_growth_series():
    g = GrowthSeries("glass", 2020, 3e6, 0.005, recovery_rate=0.85)
    got = g.available(2030)
    assert got.theoretical == pytest.approx(3e6 * 1.005**10)
    assert got.effective == pytest.approx(0.85 * got.theoretical)


# -- properties --------------------------------------------------------------

fraction = st.floats(0.0, 1.0)
inflow_maps = st.dictionaries(st.integers(1950, 2040), st.floats(0.0, 1e7), max_size=8)


def _ledger(flows, stock):
    return InflowLedger({"m": (stock,)}, {("m", stock.stock_id, y): q for y, q in flows.items()})


@settings(max_examples=60, deadline=None)
@given(inflow_maps, inflow_maps, st.integers(1960, 2080))
def test_superposition(a, b, x):
    s = single(mu=20, sigma=6, recovery_rate=0.7)
    lhs = available_secondary(_ledger(a, s) + _ledger(b, s), "m", x)
    ra, rb = available_secondary(_ledger(a, s), "m", x), available_secondary(_ledger(b, s), "m", x)
    assert lhs.theoretical == pytest.approx(ra.theoretical + rb.theoretical, rel=1e-9, abs=1e-6)
    assert lhs.effective == pytest.approx(ra.effective + rb.effective, rel=1e-9, abs=1e-6)
    assert 0.0 <= lhs.effective <= lhs.theoretical * (1 + 1e-12)


@settings(max_examples=60, deadline=None)
@given(inflow_maps, st.integers(1960, 2080), fraction, fraction, fraction, fraction)
def test_effective_monotone_in_loss_factors(flows, x, r1, r2, c, o):
    lo, hi = sorted((r1, r2))
    base = dict(mu=25.0, sigma=7.5, collection_rate=c, obsolete_share=o)
    e_lo = available_secondary(_ledger(flows, single(recovery_rate=lo, **base)), "m", x).effective
    e_hi = available_secondary(_ledger(flows, single(recovery_rate=hi, **base)), "m", x).effective
    assert e_lo <= e_hi + 1e-9
    more_obsolete = dict(base, obsolete_share=min(1.0, o + 0.1))
    e_obs = available_secondary(_ledger(flows, single(recovery_rate=hi, **more_obsolete)), "m", x).effective
    assert e_obs <= e_hi + 1e-9
    fuller = dict(base, collection_rate=min(1.0, c + 0.1))
    e_col = available_secondary(_ledger(flows, single(recovery_rate=hi, **fuller)), "m", x).effective
    assert e_col >= e_hi - 1e-9


@settings(max_examples=60, deadline=None)
@given(st.floats(1.0, 80.0), st.floats(0.05, 0.6), st.floats(0.0, 1e8))
def test_outflow_mass_bounded_by_inflow(mu, ratio, D):
    # annual sampling of the density only conserves mass for sigma of a year or more
    sigma = max(ratio * mu, 1.0)
    s = single(mu=mu, sigma=sigma)
    lo, hi = math.floor(mu - 6 * sigma), math.ceil(mu + 6 * sigma)
    total = sum(scrap_outflow(D, s, dt) for dt in range(lo, hi + 1))
    assert 0.0 <= total <= D * (1 + 1e-6)


def test_narrow_stock_overshoots_when_sampled_annually():
    s = single(mu=1.0, sigma=0.3)
    assert sum(scrap_outflow(1.0, s, dt) for dt in range(-2, 5)) > 1.3


@pytest.mark.parametrize("name", ["desk", "sm_b"])
def test_shipped_stocks_release_at_most_their_inflow(name):
    ledger = load_dataset(f"builtin:{name}").ledger
    for material in ledger.materials:
        for s in ledger.stock_profiles(material):
            released = sum(scrap_outflow(1.0, s, dt) for dt in range(1, 400))
            assert released <= 1.0 + 1e-6, (material, s.stock_id)
