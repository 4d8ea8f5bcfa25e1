"""Static SVG renderings of the experiment figures.

Output is byte-stable for identical inputs: the SVG date stamp is dropped and
element ids use a fixed hash salt.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

_RC = {"svg.hashsalt": "fuzzcent", "svg.fonttype": "none"}


def _save(fig, path: Path) -> None:
    with matplotlib.rc_context(_RC):
        fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def robustness_svg(curves: Mapping[str, Sequence[float]], path: str | Path, title: str = "") -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    for name, fractions in curves.items():
        steps = range(1, len(fractions) + 1)
        ax.plot(steps, fractions, label=name, linewidth=1.2)
    ax.set_xlabel("nodes removed")
    ax.set_ylabel("LCC fraction")
    ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, Path(path))


def imprecision_svg(
    values: Mapping[str, Sequence[float]],
    grid: Sequence[float],
    path: str | Path,
    title: str = "",
) -> None:
    fig, ax = plt.subplots(figsize=(7, 4))
    names = list(values)
    width = 0.8 / max(len(names), 1)
    for i, name in enumerate(names):
        xs = [j + (i - (len(names) - 1) / 2) * width for j in range(len(grid))]
        ax.bar(xs, values[name], width=width, label=name)
    ax.set_xticks(range(len(grid)))
    ax.set_xticklabels([f"{p:g}" for p in grid])
    ax.set_xlabel("top fraction p")
    ax.set_ylabel("imprecision E(p)")
    ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, Path(path))


def runtime_svg(seconds: Mapping[str, float], path: str | Path, title: str = "") -> None:
    fig, ax = plt.subplots(figsize=(5, 4))
    names = list(seconds)
    ax.bar(names, [seconds[k] for k in names])
    ax.set_yscale("log")
    ax.set_ylabel("median seconds per ranking")
    ax.set_title(title)
    ax.tick_params(axis="x", labelsize=7)
    fig.tight_layout()
    _save(fig, Path(path))
