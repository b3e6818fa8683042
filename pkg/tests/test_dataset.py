import shutil

import pytest

from recyclesys.dataset import (
    builtin_datasets,
    load_dataset,
    read_technologies,
    resolve_dataset_path,
    write_technologies,
)
from recyclesys.errors import ConfigurationError, UnknownNameError
from recyclesys.system import validate_system


def test_builtins():
    assert builtin_datasets() == ["desk", "sm_b"]
    assert resolve_dataset_path("builtin:desk").name == "desk"
    with pytest.raises(ConfigurationError):
        resolve_dataset_path("builtin:atlantis")


def test_relative_paths_use_base(tmp_path):
    assert resolve_dataset_path("data/x", tmp_path) == tmp_path / "data" / "x"
    assert resolve_dataset_path(tmp_path, "/elsewhere") == tmp_path


def test_desk_contents(desk):
    g = desk.graph
    assert g.base_year_emissions == 100000
    assert desk.base_year_rates == {"steel": 0.3}
    assert g.technologies["blast_furnace"].inputs["coal"] == pytest.approx(5.057)
    assert g.commodities["steel_scrap"].scrap_price == 240
    assert g.commodities["hydrogen"].import_price == 100
    assert sum(s.sector_share for s in desk.ledger.stock_profiles("steel")) == pytest.approx(1.0)


def test_sm_b_contents():
    ds = load_dataset("builtin:sm_b")
    assert validate_system(ds.graph) == []
    assert set(ds.graph.recycled_materials()) >= {"steel", "aluminum", "glass", "paper"}
    for m in ds.graph.recycled_materials():
        assert ds.availability(m, 2030).effective >= 0


def test_availability_prefers_stocks_then_growth(desk):
    assert desk.availability("steel", 2030).effective > 0
    with pytest.raises(UnknownNameError):
        desk.availability("glass", 2030)


def test_technology_table_round_trip(tmp_path, desk):
    path = tmp_path / "technologies.csv"
    write_technologies(path, desk.graph.technologies)
    back = read_technologies(path)
    assert back.keys() == desk.graph.technologies.keys()
    for tid, t in desk.graph.technologies.items():
        assert back[tid].inputs == t.inputs and back[tid].invest_cost == t.invest_cost
        assert back[tid].lifetime == t.lifetime and back[tid].availability == t.availability


def test_missing_directory(tmp_path):
    with pytest.raises(ConfigurationError):
        load_dataset(tmp_path / "nothing")


def test_missing_file(tmp_path):
    d = tmp_path / "broken"
    shutil.copytree(resolve_dataset_path("builtin:desk"), d)
    (d / "demands.csv").unlink()
    with pytest.raises(ConfigurationError, match="demands.csv"):
        load_dataset(d)


def test_malformed_number(tmp_path):
    d = tmp_path / "broken"
    shutil.copytree(resolve_dataset_path("builtin:desk"), d)
    text = (d / "demands.csv").read_text().replace("40000", "forty thousand")
    (d / "demands.csv").write_text(text)
    with pytest.raises(ConfigurationError):
        load_dataset(d)
