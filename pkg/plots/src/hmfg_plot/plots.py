"""Render solver CSV artifacts as figures.

Four plot kinds, each a pure function of its input CSVs:

- ``heatmap``: long-format (t, alpha, series, value) rows for one series,
  time on the x axis, position alpha on the y axis, color = value.
- ``convergence``: summary rows (N, mean, ci95_low, ci95_high), mean curve
  with a shaded 95% confidence band (a capped error bar for a single N).
- ``exploitability``: (iteration, value) trace.
- ``kernel``: a discretized kernel tensor (i0..i{k-1}, value) shown as a
  heatmap over the first two coordinates, averaging out the rest.

Rendering embeds no timestamps, so identical inputs yield identical PNG and
SVG bytes.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "hmfg-plot"

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["PlotSpec", "PlotError", "render", "KINDS"]

KINDS = ("heatmap", "convergence", "exploitability", "kernel")

_REQUIRED = {
    "heatmap": ("t", "alpha", "series", "value"),
    "convergence": ("N", "mean", "ci95_low", "ci95_high"),
    "exploitability": ("iteration", "value"),
    "kernel": ("i0", "i1", "value"),
}

_SPEC_FIELDS = {"inputs", "kind", "output", "series",
                "title", "xlabel", "ylabel", "xlim", "ylim"}


class PlotError(Exception):
    """Invalid plot spec or input CSV."""


@dataclass
class PlotSpec:
    inputs: list[str]
    kind: str
    output: str
    series: str | None = None
    title: str | None = None
    xlabel: str | None = None
    ylabel: str | None = None
    xlim: tuple[float, float] | None = None
    ylim: tuple[float, float] | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PlotError(f"unknown plot kind {self.kind!r}; expected one of {KINDS}")
        if not self.inputs:
            raise PlotError("spec needs at least one input CSV")

    @classmethod
    def from_dict(cls, d: dict) -> "PlotSpec":
        if not isinstance(d, dict):
            raise PlotError("plot spec must be a JSON object")
        unknown = set(d) - _SPEC_FIELDS
        if unknown:
            raise PlotError(f"unknown spec field(s): {', '.join(sorted(unknown))}")
        missing = {"inputs", "kind", "output"} - set(d)
        if missing:
            raise PlotError(f"spec missing required field(s): {', '.join(sorted(missing))}")
        kw = dict(d)
        for key in ("xlim", "ylim"):
            if kw.get(key) is not None:
                kw[key] = tuple(float(v) for v in kw[key])
        return cls(**kw)


def _read_csv(path) -> tuple[list[str], list[dict]]:
    p = Path(path)
    if not p.exists():
        raise PlotError(f"input file not found: {p}")
    with open(p, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise PlotError(f"empty input file: {p}")
        rows = list(reader)
    return list(reader.fieldnames), rows


def _require(columns, needed, path):
    for col in needed:
        if col not in columns:
            raise PlotError(f"missing column {col!r} in {path}")


def _pivot_long(rows, series):
    ts = sorted({float(r["t"]) for r in rows})
    alphas = sorted({float(r["alpha"]) for r in rows})
    ti = {t: i for i, t in enumerate(ts)}
    ai = {a: i for i, a in enumerate(alphas)}
    grid = np.full((len(alphas), len(ts)), np.nan)
    for r in rows:
        if r["series"] == series:
            grid[ai[float(r["alpha"])], ti[float(r["t"])]] = float(r["value"])
    return np.asarray(ts), np.asarray(alphas), grid


def _draw_heatmap(ax, fig, spec):
    columns, rows = _read_csv(spec.inputs[0])
    _require(columns, _REQUIRED["heatmap"], spec.inputs[0])
    names = sorted({r["series"] for r in rows})
    series = spec.series if spec.series is not None else names[0]
    if series not in names:
        raise PlotError(f"series {series!r} not present in {spec.inputs[0]}; "
                        f"available: {', '.join(names)}")
    ts, alphas, grid = _pivot_long(rows, series)
    extent = (ts[0], ts[-1], alphas[0], alphas[-1]) if len(ts) > 1 else (0, 1, 0, 1)
    im = ax.imshow(grid, origin="lower", aspect="auto",
                   extent=extent, cmap="viridis", interpolation="nearest")
    fig.colorbar(im, ax=ax, label="probability")
    return series, "t", "alpha"


def _draw_convergence(ax, fig, spec):
    columns, rows = _read_csv(spec.inputs[0])
    _require(columns, _REQUIRED["convergence"], spec.inputs[0])
    rows = sorted(rows, key=lambda r: float(r["N"]))
    N = np.array([float(r["N"]) for r in rows])
    mean = np.array([float(r["mean"]) for r in rows])
    lo = np.array([float(r["ci95_low"]) for r in rows])
    hi = np.array([float(r["ci95_high"]) for r in rows])
    if len(rows) == 1:
        ax.errorbar(float(N[0]), float(mean[0]),
                    yerr=np.array([[float(mean[0] - lo[0])], [float(hi[0] - mean[0])]]),
                    fmt="o", capsize=6, color="C0")
    else:
        ax.plot(N, mean, marker="o", color="C0")
        ax.fill_between(N, lo, hi, alpha=0.3, color="C0", linewidth=0)
        ax.set_xscale("log", base=2)
    return None, "N", "empirical gap"


def _draw_exploitability(ax, fig, spec):
    columns, rows = _read_csv(spec.inputs[0])
    _require(columns, _REQUIRED["exploitability"], spec.inputs[0])
    it = np.array([float(r["iteration"]) for r in rows])
    val = np.array([float(r["value"]) for r in rows])
    order = np.argsort(it)
    ax.plot(it[order], val[order], color="C1")
    return None, "iteration", "exploitability"


def _draw_kernel(ax, fig, spec):
    columns, rows = _read_csv(spec.inputs[0])
    _require(columns, _REQUIRED["kernel"], spec.inputs[0])
    index_cols = []
    while f"i{len(index_cols)}" in columns:
        index_cols.append(f"i{len(index_cols)}")
    M = max(int(r[index_cols[0]]) for r in rows) + 1
    tensor = np.full((M,) * len(index_cols), np.nan)
    for r in rows:
        tensor[tuple(int(r[c]) for c in index_cols)] = float(r["value"])
    # show the pairwise face: average over remaining coordinates
    grid = tensor if tensor.ndim == 2 else tensor.mean(axis=tuple(range(2, tensor.ndim)))
    im = ax.imshow(grid.T, origin="lower", aspect="equal", extent=(0, 1, 0, 1),
                   cmap="viridis", vmin=0.0, vmax=1.0, interpolation="nearest")
    fig.colorbar(im, ax=ax, label="kernel value")
    return None, "alpha", "alpha"


_DRAW = {
    "heatmap": _draw_heatmap,
    "convergence": _draw_convergence,
    "exploitability": _draw_exploitability,
    "kernel": _draw_kernel,
}


def render(spec: PlotSpec) -> list[Path]:
    """Render the spec and write one PNG and one SVG; returns their paths."""
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    try:
        default_title, xlab, ylab = _DRAW[spec.kind](ax, fig, spec)
        ax.set_xlabel(spec.xlabel if spec.xlabel is not None else xlab)
        ax.set_ylabel(spec.ylabel if spec.ylabel is not None else ylab)
        title = spec.title if spec.title is not None else default_title
        if title:
            ax.set_title(title)
        if spec.xlim is not None:
            ax.set_xlim(spec.xlim)
        if spec.ylim is not None:
            ax.set_ylim(spec.ylim)
        out = Path(spec.output)
        stem = out.with_suffix("") if out.suffix.lower() in (".png", ".svg") else out
        stem.parent.mkdir(parents=True, exist_ok=True)
        written = []
        for ext, metadata in ((".png", {"Software": None}),
                              (".svg", {"Date": None})):
            path = stem.with_suffix(ext)
            fig.savefig(path, dpi=150, metadata=metadata)
            written.append(path)
        return written
    finally:
        plt.close(fig)
