import os
from pathlib import Path

import pytest

from fuzzcent import datasets
from fuzzcent.graphcore import FuzzyGraph

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    # never touch the user's spread cache
    monkeypatch.setenv("FUZZCENT_CACHE_DIR", str(tmp_path / "spread-cache"))


@pytest.fixture(scope="session")
def karate() -> FuzzyGraph:
    return datasets.load("karate")


@pytest.fixture(scope="session")
def karate_path() -> Path:
    return datasets.path("karate")


def complete_graph(n: int, w: float = 1.0) -> FuzzyGraph:
    return FuzzyGraph(n, [(i, j, w) for i in range(n) for j in range(i + 1, n)])


def path_graph(n: int, w: float = 1.0) -> FuzzyGraph:
    return FuzzyGraph(n, [(i, i + 1, w) for i in range(n - 1)])


def star_graph(leaves: int, w: float = 1.0) -> FuzzyGraph:
    return FuzzyGraph(leaves + 1, [(0, i, w) for i in range(1, leaves + 1)])


def external_network(name: str) -> Path | None:
    """Locate an edge list that is not bundled (e.g. dolphins, email)."""
    try:
        return datasets.path(name)
    except KeyError:
        pass
    folder = os.environ.get("FUZZCENT_DATA_DIR")
    if folder:
        for suffix in (".edges", ".txt", ".csv"):
            p = Path(folder) / f"{name}{suffix}"
            if p.exists():
                return p
    return None
