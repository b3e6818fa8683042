import json
import textwrap
from pathlib import Path

import pytest

from recyclesys.cli import main
from recyclesys.config import cap_schedule, load_scenario, load_sweep, read_toml
from recyclesys.errors import ConfigurationError
from recyclesys.formulation import FIXED_AT_RATE

SCENARIOS = Path(__file__).resolve().parents[1] / "scenarios"

FAST_SCENARIO = """
[scenario]
name = "{name}"
dataset = "builtin:desk"

[policy]
mode = "{mode}"

[caps]
anchors = {{ 2020 = 0.40, 2030 = 0.55, 2050 = 0.95 }}

[tsa]
typical_periods = 0
"""


def write(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(textwrap.dedent(text).lstrip(), encoding="utf-8")
    return path


@pytest.fixture
def tiny_dataset(tmp_path):
    d = tmp_path / "tiny"
    write(d / "commodities.csv", "id,kind,unit,importable,import_price,secondary_of,scrap_price\nx,material,tonne,,,,\n")
    write(
        d / "technologies.csv",
        "id,reference_commodity,inputs,outputs,invest_cost,emission_factor\ndirty,x,,x:1,10,1.0\n",
    )
    write(d / "demands.csv", "commodity,year,quantity,profile\nx,2020,10,\n")
    write(d / "system.csv", "key,value\nbase_year_emissions,100\n")
    return d


class TestConfig:
    def test_shipped_scenarios_load(self):
        for name in ("ref95", "recx", "wo_rec"):
            loaded = load_scenario(SCENARIOS / f"{name}.toml")
            assert loaded.spec.name == name
            assert loaded.spec.cap_schedule.base == 100000
            assert loaded.output == SCENARIOS / "out" / name
        ref = load_scenario(SCENARIOS / "ref95.toml").spec
        assert ref.policy.mode == FIXED_AT_RATE and ref.policy.effective_from == 2040

    def test_shipped_sweep_loads(self):
        sw = load_sweep(SCENARIOS / "scrap_sweep.toml").spec
        assert sw.parameter == "scrap_prices.steel"
        assert len(sw.grid) == 10 and not sw.full_pathway

    def test_defaults_and_corridor_switch(self, tmp_path):
        p = write(tmp_path / "s.toml", FAST_SCENARIO.format(name="a", mode="forbidden") + "\n[pathway]\ncorridor_share = false\n")
        spec = load_scenario(p).spec
        assert spec.typical_periods is None
        assert spec.corridor_share is None
        assert spec.steps == (2020, 2025, 2030, 2035, 2040, 2045, 2050)

    def test_relative_dataset_path(self, tmp_path, tiny_dataset):
        p = write(tmp_path / "cfg" / "s.toml", '[scenario]\nname = "t"\ndataset = "../tiny"\n[caps]\nanchors = { 2020 = 0.0, 2050 = 0.5 }\n')
        spec = load_scenario(p).spec
        assert Path(spec.dataset) == tiny_dataset.resolve()
        assert spec.cap_schedule.base == 100.0

    @pytest.mark.parametrize(
        "text",
        [
            "[scenario]\nname = 'a'\n[surprise]\nx = 1\n",
            "[scenario]\nname = 'a'\n",
            "[scenario]\nname = 'a'\ndataset = 'builtin:desk'\n[policy]\nmode = 'sometimes'\n",
            "[scenario]\nname = 'a'\ndataset = 'builtin:desk'\n[caps]\nanchors = { 2030 = 0.9, 2050 = 0.5 }\n",
            "[scenario]\nname = 'a'\ndataset = 'builtin:desk'\n[prices.scrap]\nsteel = 'cheap'\n",
            "not toml = = 1\n",
        ],
    )
    def test_bad_files(self, tmp_path, text):
        p = write(tmp_path / "bad.toml", text)
        with pytest.raises(ConfigurationError):
            load_scenario(p)

    def test_caps_section_alone(self):
        sched = cap_schedule(read_toml(SCENARIOS / "caps.toml"))
        assert sched.base == 100000 and sched.span == (2020, 2050)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError):
            read_toml(tmp_path / "nope.toml")


class TestCli:
    def test_validate(self, capsys):
        assert main(["validate", "builtin:desk"]) == 0
        assert "0 problems" in capsys.readouterr().out

    def test_validate_reports_problems(self, tiny_dataset, capsys):
        (tiny_dataset / "demands.csv").write_text("commodity,year,quantity,profile\nx,2020,10,\nghost,2020,1,\n")
        assert main(["validate", str(tiny_dataset)]) == 2
        assert "ghost" in capsys.readouterr().out

    def test_caps(self, capsys):
        assert main(["caps", str(SCENARIOS / "caps.toml"), "--year", "2030", "--year", "2050"]) == 0
        assert capsys.readouterr().out.split() == ["2030", "45000", "2050", "5000"]

    def test_caps_outside_span(self, capsys):
        assert main(["caps", str(SCENARIOS / "caps.toml"), "--year", "2060"]) == 2

    def test_run_and_compare(self, tmp_path, capsys):
        a = write(tmp_path / "a.toml", FAST_SCENARIO.format(name="a", mode="bounded_by_availability"))
        b = write(tmp_path / "b.toml", FAST_SCENARIO.format(name="b", mode="forbidden"))
        assert main(["run", str(a), str(b), "--out", str(tmp_path / "out"), "-q"]) == 0
        for name in ("a", "b"):
            summary = json.loads((tmp_path / "out" / name / "summary.json").read_text())
            assert summary["name"] == name
        capsys.readouterr()
        out = tmp_path / "cmp.txt"
        assert main(["compare", str(tmp_path / "out" / "a"), str(tmp_path / "out" / "b"), "--reference", "a", "--out", str(out)]) == 0
        assert out.read_text() == capsys.readouterr().out
        assert out.read_text().startswith("reference a")

    def test_run_default_output_is_next_to_the_file(self, tmp_path):
        a = write(tmp_path / "a.toml", FAST_SCENARIO.format(name="a", mode="forbidden"))
        assert main(["run", str(a), "-q"]) == 0
        assert (tmp_path / "out" / "a" / "report.txt").exists()

    def test_compare_unknown_reference(self, tmp_path):
        a = write(tmp_path / "a.toml", FAST_SCENARIO.format(name="a", mode="forbidden"))
        main(["run", str(a), "-q"])
        assert main(["compare", str(tmp_path / "out" / "a"), "--reference", "zzz"]) == 2

    def test_sweep(self, tmp_path):
        p = write(
            tmp_path / "sw.toml",
            FAST_SCENARIO.format(name="sw", mode="bounded_by_availability")
            + '\n[sweep]\nparameter = "scrap_prices.steel"\ngrid = [240, 2400]\n',
        )
        assert main(["sweep", str(p), "--out", str(tmp_path / "sweep"), "-q"]) == 0
        lines = (tmp_path / "sweep" / "sweep.csv").read_text().splitlines()
        assert lines[0].startswith("value,status,objective,emissions,share.steel")
        assert len(lines) == 3

    def test_infeasible_exit_code(self, tmp_path, tiny_dataset, capsys):
        p = write(
            tmp_path / "inf.toml",
            '[scenario]\nname = "inf"\ndataset = "tiny"\n[caps]\nanchors = { 2020 = 0.0, 2030 = 0.95 }\n'
            "[tsa]\ntypical_periods = 0\n[pathway]\nsteps = [2020, 2030]\n",
        )
        assert main(["run", str(p)]) == 1
        assert "2030" in capsys.readouterr().err

    def test_configuration_exit_code(self, tmp_path):
        p = write(tmp_path / "bad.toml", "[scenario]\nname = 'a'\n")
        assert main(["run", str(p)]) == 2

    def test_help_lists_subcommands(self, capsys):
        with pytest.raises(SystemExit):
            main(["--help"])
        out = capsys.readouterr().out
        for cmd in ("validate", "run", "sweep", "compare", "caps"):
            assert cmd in out
