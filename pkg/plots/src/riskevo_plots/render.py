"""Render figures from riskevo CSV outputs.

Three figure kinds, matched to the engine's file schemas:

ternary  - simplex phase portrait from a stationary CSV (i_S, i_I, prob),
           optionally overlaid with arrows from a gradient CSV
           (i_S, i_I, g_I, g_S). Corners: S left, I right, A top.
heatmap  - per-strategy adoption maps from a two-axis sweep CSV.
lines    - adoption (and insurer profit) curves from a one-axis sweep
           or premium CSV.

Rendering is deterministic: the same input files produce identical
image bytes. Numeric values are drawn as-is; only arrow lengths are
visually scaled.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import matplotlib
matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import matplotlib.tri as mtri  # noqa: E402
import numpy as np  # noqa: E402

STATIONARY_COLUMNS = ("i_S", "i_I", "prob")
GRADIENT_COLUMNS = ("i_S", "i_I", "g_I", "g_S")
RESULT_COLUMNS = ("p_S", "p_I", "p_A", "profit", "argmax")

#: Barycentric corners: S left, I right, A top.
CORNERS = {"S": np.array([0.0, 0.0]),
           "I": np.array([1.0, 0.0]),
           "A": np.array([0.5, np.sqrt(3.0) / 2.0])}

STRATEGY_COLORS = {"p_S": "#1f77b4", "p_I": "#d62728", "p_A": "#2ca02c"}
STRATEGY_NAMES = {"p_S": "risk-sharing pool (S)", "p_I": "index insurance (I)",
                  "p_A": "no insurance (A)"}


class SchemaError(ValueError):
    """Input CSV does not match the columns the figure kind expects."""


@dataclass(frozen=True)
class FigureSpec:
    """What to draw: input CSVs, figure kind, labels, output path."""

    inputs: tuple[Path, ...]
    kind: str  # ternary | heatmap | lines
    out: Path
    stride: int = 2
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""


def load_table(path) -> tuple[list[str], dict[str, np.ndarray]]:
    """Read a CSV into named columns; non-numeric columns stay strings."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise SchemaError(f"{path}: empty file")
    header = lines[0].split(",")
    raw = {name: [] for name in header}
    for line in lines[1:]:
        for name, cell in zip(header, line.split(",")):
            raw[name].append(cell)
    columns = {}
    for name, cells in raw.items():
        try:
            columns[name] = np.array([float(cell) for cell in cells])
        except ValueError:
            columns[name] = np.array(cells)
    return header, columns


def _require(header, expected, path, kind):
    if tuple(header) != tuple(expected):
        raise SchemaError(
            f"{path}: {kind} figures need columns {','.join(expected)}, "
            f"found {','.join(header)}")


def _barycentric_xy(i_s, i_i, total):
    shares = np.stack([i_s, i_i, total - i_s - i_i], axis=1) / total
    return shares @ np.stack([CORNERS["S"], CORNERS["I"], CORNERS["A"]])


def _draw_ternary(spec: FigureSpec, ax, fig):
    header, cols = load_table(spec.inputs[0])
    _require(header, STATIONARY_COLUMNS, spec.inputs[0], "ternary")
    i_s, i_i, probs = cols["i_S"], cols["i_I"], cols["prob"]
    size = int(np.max(i_s + i_i))
    xy = _barycentric_xy(i_s, i_i, size)

    try:
        tri = mtri.Triangulation(xy[:, 0], xy[:, 1])
        shading = ax.tripcolor(tri, probs, cmap="Greys", shading="gouraud",
                               vmin=0.0)
    except (ValueError, RuntimeError):  # collinear edge-only state space
        shading = ax.scatter(xy[:, 0], xy[:, 1], c=probs, cmap="Greys",
                             vmin=0.0, s=14)
    fig.colorbar(shading, ax=ax, fraction=0.04, pad=0.02,
                 label="stationary probability")

    if len(spec.inputs) > 1:
        gheader, gcols = load_table(spec.inputs[1])
        _require(gheader, GRADIENT_COLUMNS, spec.inputs[1], "ternary gradient")
        g_i, g_s = gcols["g_I"], gcols["g_S"]
        g_a = -(g_i + g_s)
        direction = (np.outer(g_s, CORNERS["S"]) + np.outer(g_i, CORNERS["I"])
                     + np.outer(g_a, CORNERS["A"]))
        keep = ((gcols["i_S"] % spec.stride == 0)
                & (gcols["i_I"] % spec.stride == 0))
        gxy = _barycentric_xy(gcols["i_S"], gcols["i_I"], size)
        strength = np.linalg.norm(direction, axis=1)
        # autoscaling divides by the longest arrow; all-zero fields
        # (neutral selection) need an explicit scale
        scale = None if strength[keep].max() > 0 else 1.0
        arrows = ax.quiver(gxy[keep, 0], gxy[keep, 1],
                           direction[keep, 0], direction[keep, 1],
                           strength[keep], cmap="viridis", width=0.003,
                           scale=scale)
        fig.colorbar(arrows, ax=ax, fraction=0.04, pad=0.08,
                     label="selection gradient strength")

    border = np.array([CORNERS["S"], CORNERS["I"], CORNERS["A"], CORNERS["S"]])
    ax.plot(border[:, 0], border[:, 1], color="black", linewidth=1.0)
    ax.text(-0.03, -0.02, "S", ha="right", va="top", fontsize=13)
    ax.text(1.03, -0.02, "I", ha="left", va="top", fontsize=13)
    ax.text(0.5, np.sqrt(3) / 2 + 0.03, "A", ha="center", va="bottom", fontsize=13)
    ax.set_aspect("equal")
    ax.axis("off")


def _split_sweep(header, path, kind, n_axes):
    if len(header) != n_axes + len(RESULT_COLUMNS) \
            or tuple(header[n_axes:]) != RESULT_COLUMNS:
        want = n_axes * "<axis>," + ",".join(RESULT_COLUMNS)
        raise SchemaError(f"{path}: {kind} figures need columns {want}, "
                          f"found {','.join(header)}")
    return header[:n_axes]


def _draw_heatmap(spec: FigureSpec, fig):
    header, cols = load_table(spec.inputs[0])
    ax_y, ax_x = _split_sweep(header, spec.inputs[0], "heatmap", 2)
    ys = np.unique(cols[ax_y])
    xs = np.unique(cols[ax_x])
    axes = fig.subplots(1, 3, sharey=True)
    for ax, key in zip(axes, ("p_S", "p_I", "p_A")):
        grid = np.full((len(ys), len(xs)), np.nan)
        for y, x, val in zip(cols[ax_y], cols[ax_x], cols[key]):
            grid[np.searchsorted(ys, y), np.searchsorted(xs, x)] = val
        mesh = ax.pcolormesh(grid, cmap="viridis", vmin=0.0, vmax=1.0)
        ax.set_xticks(np.arange(len(xs)) + 0.5, [f"{v:g}" for v in xs])
        ax.set_yticks(np.arange(len(ys)) + 0.5, [f"{v:g}" for v in ys])
        ax.set_xlabel(spec.xlabel or ax_x)
        ax.set_title(STRATEGY_NAMES[key], fontsize=10)
    axes[0].set_ylabel(spec.ylabel or ax_y)
    fig.colorbar(mesh, ax=axes, fraction=0.025, pad=0.02,
                 label="average adoption rate")


def _draw_lines(spec: FigureSpec, ax):
    header, cols = load_table(spec.inputs[0])
    (axis,) = _split_sweep(header, spec.inputs[0], "lines", 1)
    x = cols[axis]
    for key in ("p_S", "p_I", "p_A"):
        ax.plot(x, cols[key], marker="o", markersize=3.5,
                color=STRATEGY_COLORS[key], label=STRATEGY_NAMES[key])
    ax.set_xlabel(spec.xlabel or axis)
    ax.set_ylabel(spec.ylabel or "average adoption rate")
    ax.set_ylim(-0.02, 1.02)
    twin = ax.twinx()
    twin.plot(x, cols["profit"], linestyle="--", color="#7f7f7f",
              label="insurer profit")
    twin.set_ylabel("insurer profit")
    handles, labels = ax.get_legend_handles_labels()
    h2, l2 = twin.get_legend_handles_labels()
    ax.legend(handles + h2, labels + l2, fontsize=8, loc="center right")


def render(spec: FigureSpec) -> Path:
    """Draw the figure and write it to ``spec.out``."""
    if not spec.inputs:
        raise SchemaError("no input CSV given")
    if spec.kind == "heatmap":
        fig = plt.figure(figsize=(9.5, 3.2), dpi=150)
        _draw_heatmap(spec, fig)
    elif spec.kind == "ternary":
        fig, ax = plt.subplots(figsize=(5.4, 4.6), dpi=150)
        _draw_ternary(spec, ax, fig)
    elif spec.kind == "lines":
        fig, ax = plt.subplots(figsize=(5.2, 3.6), dpi=150)
        _draw_lines(spec, ax)
        fig.tight_layout()
    else:
        raise SchemaError(f"unknown figure kind {spec.kind!r}")
    if spec.title:
        fig.suptitle(spec.title)
    out = Path(spec.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    metadata = {"Software": "riskevo-plot"} if out.suffix == ".png" else None
    fig.savefig(out, metadata=metadata)
    plt.close(fig)
    return out


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="riskevo-plot",
        description="Render riskevo CSV outputs as figures.")
    parser.add_argument("inputs", nargs="+", type=Path,
                        help="input CSV file(s); ternary takes the "
                             "stationary CSV plus an optional gradient CSV")
    parser.add_argument("--kind", required=True,
                        choices=("ternary", "heatmap", "lines"))
    parser.add_argument("--out", required=True, type=Path)
    parser.add_argument("--stride", type=int, default=2,
                        help="draw every stride-th gradient arrow")
    parser.add_argument("--title", default="")
    parser.add_argument("--xlabel", default="")
    parser.add_argument("--ylabel", default="")
    args = parser.parse_args(argv)
    spec = FigureSpec(inputs=tuple(args.inputs), kind=args.kind, out=args.out,
                      stride=args.stride, title=args.title,
                      xlabel=args.xlabel, ylabel=args.ylabel)
    try:
        render(spec)
    except (SchemaError, OSError) as exc:
        print(f"riskevo-plot: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
