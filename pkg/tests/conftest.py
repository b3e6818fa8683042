"""Shared fixtures: the desk dataset, its typical periods and scenario runs."""

import pytest

from recyclesys import (
    BOUNDED_BY_AVAILABILITY,
    FIXED_AT_RATE,
    FORBIDDEN,
    CapSchedule,
    RecyclingPolicy,
    ScenarioSpec,
    aggregate,
    load_dataset,
    run_scenario,
)

DESK = "builtin:desk"
DESK_ANCHORS = {2020: 0.40, 2030: 0.55, 2050: 0.95}

_criteria: dict[int, tuple[str, str]] = {}


@pytest.fixture(scope="session")
def desk():
    return load_dataset(DESK)


@pytest.fixture(scope="session")
def desk_periods(desk):
    return aggregate(list(desk.graph.profiles.values()), 2, 24)


@pytest.fixture(scope="session")
def desk_schedule(desk):
    return CapSchedule(desk.graph.base_year_emissions, DESK_ANCHORS)


def desk_spec(name, mode, **kw):
    return ScenarioSpec(
        name=name,
        dataset=DESK,
        cap_schedule=CapSchedule(100000, DESK_ANCHORS),
        policy=RecyclingPolicy(mode=mode),
        **kw,
    )


@pytest.fixture(scope="session")
def desk_runs():
    """Full desk pathways under the three recycling policies (slow, shared)."""
    modes = {"bounded": BOUNDED_BY_AVAILABILITY, "fixed": FIXED_AT_RATE, "forbidden": FORBIDDEN}
    return {name: run_scenario(desk_spec(name, mode)) for name, mode in modes.items()}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or rep.when not in ("setup", "call"):
        return
    if rep.when == "setup" and rep.passed:
        return
    number, title = marker.args
    _criteria[number] = ("PASS" if rep.passed else "FAIL", title)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        status, title = _criteria[number]
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {title}")
