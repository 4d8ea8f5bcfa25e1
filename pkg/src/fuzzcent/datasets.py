"""Edge lists shipped with the package."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .graphcore import FuzzyGraph, parse_edge_list


def available() -> list[str]:
    folder = resources.files("fuzzcent") / "data"
    return sorted(p.name.rsplit(".", 1)[0] for p in folder.iterdir() if p.name.endswith(".edges"))


def path(name: str) -> Path:
    p = resources.files("fuzzcent") / "data" / f"{name}.edges"
    if not p.is_file():
        raise KeyError(f"no bundled network {name!r}; have {available()}")
    return Path(str(p))


def load(name: str) -> FuzzyGraph:
    return parse_edge_list(path(name).read_text(encoding="utf-8"))
