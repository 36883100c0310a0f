"""Parameter-grid experiments: regime maps, premium pricing, restricted games.

Each grid point is an independent stationary solve; rows come back in
deterministic axis order regardless of how they were scheduled, so a
rerun of the same spec reproduces its output bit for bit.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .markov import gradient_field, insurer_profit, solve_stationary
from .params import (ModelParams, ParameterError, Strategy,
                     canonical_strategies, validate)

#: Parameters that may serve as sweep axes.
AXIS_FIELDS = ("w", "p", "q", "r", "alpha", "gamma", "delta1", "delta2",
               "c", "beta", "mu", "Z", "N")
_INT_FIELDS = ("Z", "N")

OUTPUT_KINDS = ("adoption", "profit", "stationary", "gradient")


@dataclass(frozen=True)
class SweepSpec:
    """A 1- or 2-axis grid around a base parameter set.

    ``outputs`` selects what each row carries beyond adoption rates and
    profit: "stationary" and "gradient" attach the per-state vectors
    needed for simplex plots. ``mode`` optionally restricts the active
    strategy set for every point.
    """

    base: ModelParams
    axes: tuple[tuple[str, tuple[float, ...]], ...]
    outputs: tuple[str, ...] = ("adoption", "profit")
    mode: tuple[Strategy, ...] | None = None

    def __post_init__(self):
        if not 1 <= len(self.axes) <= 2:
            raise ValueError("a sweep needs 1 or 2 axes")
        for name, values in self.axes:
            if name not in AXIS_FIELDS:
                raise ValueError(f"unknown sweep axis {name!r}")
            if len(values) == 0:
                raise ValueError(f"axis {name!r} has no values")
        for kind in self.outputs:
            if kind not in OUTPUT_KINDS:
                raise ValueError(f"unknown output kind {kind!r}")

    @property
    def axis_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.axes)


@dataclass(frozen=True)
class SweepRow:
    """Result of one grid point.

    ``error`` is set (and the numeric fields are NaN) when the point's
    parameters fail validation; the sweep itself continues.
    """

    values: tuple[float, ...]
    p_s: float = np.nan
    p_i: float = np.nan
    p_a: float = np.nan
    profit: float = np.nan
    argmax: str = "error"
    residual: float = np.nan
    error: str | None = None
    probs: np.ndarray | None = field(default=None, compare=False, repr=False)
    gradient: np.ndarray | None = field(default=None, compare=False, repr=False)
    states: tuple | None = field(default=None, compare=False, repr=False)


def argmax_strategy(p_s: float, p_i: float, p_a: float) -> str:
    """Label of the most adopted strategy; exact ties are reported as such."""
    rates = (("S", p_s), ("I", p_i), ("A", p_a))
    best = max(v for _, v in rates)
    winners = [k for k, v in rates if v == best]
    return winners[0] if len(winners) == 1 else "tie"


def _point_params(spec: SweepSpec, values: tuple[float, ...]) -> ModelParams:
    changes = {}
    for name, value in zip(spec.axis_names, values):
        changes[name] = int(value) if name in _INT_FIELDS else float(value)
    params = spec.base.replace(**changes)
    if spec.mode is not None:
        params = params.replace(strategies=spec.mode)
    return validate(params)


def _run_point(spec: SweepSpec, values: tuple[float, ...]) -> SweepRow:
    try:
        params = _point_params(spec, values)
    except ParameterError as exc:
        return SweepRow(values=values, error=str(exc))
    model, result = solve_stationary(params)
    p_s, p_i, p_a = result.adoption
    row = SweepRow(
        values=values, p_s=p_s, p_i=p_i, p_a=p_a,
        profit=insurer_profit(p_i, params),
        argmax=argmax_strategy(p_s, p_i, p_a),
        residual=result.residual,
        probs=result.probs if "stationary" in spec.outputs else None,
        gradient=gradient_field(model) if "gradient" in spec.outputs else None,
        states=model.space.states
        if {"stationary", "gradient"} & set(spec.outputs) else None,
    )
    return row


def sweep_grid(spec: SweepSpec, threads: int = 1) -> list[SweepRow]:
    """One row per grid point, in row-major axis order."""
    points = list(itertools.product(*(values for _, values in spec.axes)))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda pt: _run_point(spec, pt), points))
    return [_run_point(spec, pt) for pt in points]


class PremiumCurve(NamedTuple):
    """Profit curve over a premium grid with its maximizer."""

    rows: list[SweepRow]
    c_star: float
    profit_star: float


def optimal_premium(params: ModelParams, c_grid, threads: int = 1) -> PremiumCurve:
    """Scan premiums and pick the profit-maximizing one.

    The grid is evaluated in ascending order and ties are broken toward
    the smaller premium. Points that fail validation are kept in the
    curve with their error; if none is feasible this raises.
    """
    grid = tuple(sorted(float(c) for c in c_grid))
    if not grid:
        raise ParameterError("empty premium grid")
    spec = SweepSpec(base=params, axes=(("c", grid),))
    rows = sweep_grid(spec, threads=threads)
    feasible = [row for row in rows if row.error is None]
    if not feasible:
        raise ParameterError("no premium in the grid passes validation; first error: "
                             + str(rows[0].error))
    best = feasible[0]
    for row in feasible[1:]:
        if row.profit > best.profit:
            best = row
    return PremiumCurve(rows=rows, c_star=best.values[0], profit_star=best.profit)


def restrict_strategies(params: ModelParams, subset) -> ModelParams:
    """Restrict the game to two strategies; the state space collapses to
    one simplex edge and mutation feeds only the remaining rival."""
    chosen = canonical_strategies(subset)
    if len(chosen) != 2:
        raise ParameterError("restricted mode needs exactly 2 distinct strategies")
    return params.replace(strategies=chosen)
