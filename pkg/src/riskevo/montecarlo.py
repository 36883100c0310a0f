"""Agent-based forward simulation of the imitation/mutation process.

The simulation realizes the same per-step law as the exact kernel by
sampling individuals directly: with probability mu a uniformly chosen
individual mutates to one of the other active strategies, otherwise a
random individual considers copying a second, distinct individual and
does so with the Fermi probability. Long-run visit frequencies provide
an independent statistical check of the exact stationary solve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fitness import FitnessTable, build_fitness_table
from .markov import PopulationState, StateSpace, adoption_rates
from .params import ModelParams, Strategy, validate
from .payoffs import build_payoff_tables

GENERATOR = "PCG64"

_BLOCK = 1 << 16


class UniformStream:
    """Buffered uniform(0,1) draws from a seeded PCG64 generator."""

    __slots__ = ("_gen", "_buf", "_pos")

    def __init__(self, seed: int):
        self._gen = np.random.Generator(np.random.PCG64(seed))
        self._buf = self._gen.random(_BLOCK)
        self._pos = 0

    def next(self) -> float:
        pos = self._pos
        if pos == _BLOCK:
            self._buf = self._gen.random(_BLOCK)
            pos = 0
        self._pos = pos + 1
        return self._buf[pos]


@dataclass(frozen=True)
class SimConfig:
    """Simulation run plan: length, discarded prefix, sampling stride.

    ``initial`` must be a valid state for the active strategy set; None
    selects the first state of the enumeration (all loners when A is
    active).
    """

    steps: int
    burnin: int = 0
    thinning: int = 1
    seed: int = 0
    initial: tuple[int, int] | None = None


def _check_config(config: SimConfig, space: StateSpace) -> PopulationState:
    if config.burnin < 0 or config.steps <= config.burnin:
        raise ValueError("need steps > burnin >= 0")
    if config.thinning < 1:
        raise ValueError("thinning must be >= 1")
    if config.initial is None:
        return space.states[0]
    state = PopulationState(*config.initial)
    space.index_of(*state)
    return state


def _fermi(f_x: float, f_y: float, beta: float) -> float:
    z = beta * (f_x - f_y)
    if z >= 0.0:
        e = math.exp(-z) if z < 700.0 else 0.0
        return e / (1.0 + e)
    return 1.0 / (1.0 + math.exp(z))


def _strategy_of(idx: int, i_s: int, i_i: int) -> Strategy:
    if idx < i_s:
        return Strategy.S
    if idx < i_s + i_i:
        return Strategy.I
    return Strategy.A


def step_once(i_s: int, i_i: int, params: ModelParams, ftable: FitnessTable,
              uniforms: UniformStream) -> tuple[int, int]:
    """Advance the population by one elementary update.

    At most one individual changes strategy per call; the resulting
    one-step law matches the exact kernel's transition probabilities.
    """
    Z = params.Z
    if uniforms.next() < params.mu:
        idx = min(int(uniforms.next() * Z), Z - 1)
        x = _strategy_of(idx, i_s, i_i)
        others = [s for s in params.strategies if s is not x]
        y = others[min(int(uniforms.next() * len(others)), len(others) - 1)]
    else:
        j = min(int(uniforms.next() * Z), Z - 1)
        k = min(int(uniforms.next() * (Z - 1)), Z - 2)
        if k >= j:
            k += 1
        x = _strategy_of(j, i_s, i_i)
        y = _strategy_of(k, i_s, i_i)
        if x is y:
            return i_s, i_i
        accept = _fermi(ftable.at(i_s, i_i, x), ftable.at(i_s, i_i, y), params.beta)
        if not uniforms.next() < accept:
            return i_s, i_i
    return (i_s - (x is Strategy.S) + (y is Strategy.S),
            i_i - (x is Strategy.I) + (y is Strategy.I))


@dataclass(frozen=True)
class SimResult:
    """Empirical visit frequencies with run metadata."""

    space: StateSpace
    frequencies: np.ndarray
    adoption: tuple[float, float, float]
    samples: int
    config: SimConfig
    generator: str = GENERATOR


def simulate(params: ModelParams, config: SimConfig) -> SimResult:
    """Run the chain forward and tally post-burn-in visit frequencies.

    Deterministic given the seed: identical configurations reproduce
    the trajectory and the output exactly.
    """
    params = validate(params)
    space = StateSpace.build(params.Z, params.strategies)
    state = _check_config(config, space)
    tables = build_payoff_tables(params)
    ftable = build_fitness_table(params, tables, space.states)

    uniforms = UniformStream(config.seed)
    visits = np.zeros(len(space))
    index_of = space.index_of
    i_s, i_i = state
    burnin, thinning = config.burnin, config.thinning
    for step in range(config.steps):
        i_s, i_i = step_once(i_s, i_i, params, ftable, uniforms)
        if step >= burnin and (step - burnin) % thinning == 0:
            visits[index_of(i_s, i_i)] += 1.0

    samples = int(visits.sum())
    freqs = visits / samples
    return SimResult(space=space, frequencies=freqs,
                     adoption=adoption_rates(freqs, space.states, params.Z),
                     samples=samples, config=config)
