import json
from importlib import resources

import pytest

from spherecensus.lattice import FaceLattice

SPHERES = [
    "sphere_10_32_33_0",
    "sphere_10_32_33_1",
    "sphere_10_33_35_12",
    "sphere_11_35_0",
    "sphere_11_35_1",
]


def data_path(name: str):
    if not name.endswith(".json"):
        name += ".json"
    return resources.files("spherecensus") / "data" / name


def load_json(name: str) -> dict:
    return json.loads(data_path(name).read_text())


def load_lattice(name: str) -> FaceLattice:
    return FaceLattice.from_facets(load_json(name)["facets"])


@pytest.fixture(scope="session")
def lattices():
    return {name: load_lattice(name) for name in SPHERES + ["simplex_boundary"]}


# acceptance lines, printed after the run
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
