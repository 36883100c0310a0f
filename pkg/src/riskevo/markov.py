"""Finite-population Markov chain over strategy configurations.

A state counts the pool members and insured members, (i_s, i_i); the
rest of the Z individuals are uninsured. Each elementary step moves at
most one individual between strategies, either by pairwise imitation
with a Fermi acceptance probability or by mutation. The resulting
sparse row-stochastic kernel is solved exactly for its stationary
distribution; power iteration is available as an independent
cross-check of the direct solve.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.special import expit

from .fitness import FitnessTable, build_fitness_table
from .params import ModelParams, Strategy, validate
from .payoffs import build_payoff_tables


class SolverError(RuntimeError):
    """Stationary distribution could not be computed reliably."""


class PopulationState(NamedTuple):
    """Counts of pool members and insured members; loners are implied."""

    i_s: int
    i_i: int


def simplex_size(Z: int) -> int:
    """Number of (i_s, i_i) states with i_s + i_i <= Z."""
    return (Z + 1) * (Z + 2) // 2


def state_index(i_s: int, i_i: int, Z: int) -> int:
    """Linear index of a state in the full three-strategy enumeration.

    States are ordered by i_s, then i_i; the inverse is
    :func:`index_to_state`.
    """
    if i_s < 0 or i_i < 0 or i_s + i_i > Z:
        raise ValueError(f"invalid state ({i_s}, {i_i}) for Z={Z}")
    return i_s * (Z + 1) - i_s * (i_s - 1) // 2 + i_i


def index_to_state(idx: int, Z: int) -> PopulationState:
    """Inverse of :func:`state_index`."""
    if not 0 <= idx < simplex_size(Z):
        raise ValueError(f"state index {idx} out of range for Z={Z}")
    i_s = 0
    offset = 0
    while idx - offset > Z - i_s:
        offset += Z + 1 - i_s
        i_s += 1
    return PopulationState(i_s, idx - offset)


@dataclass(frozen=True)
class StateSpace:
    """Enumeration of the reachable states for an active strategy set.

    With all three strategies this is the full discrete simplex of
    (Z+1)(Z+2)/2 states; with two strategies it collapses to the Z+1
    states of one simplex edge.
    """

    Z: int
    strategies: tuple[Strategy, ...]
    states: tuple[PopulationState, ...]

    @classmethod
    def build(cls, Z: int, strategies: tuple[Strategy, ...]) -> "StateSpace":
        active = set(strategies)
        if active == {Strategy.S, Strategy.I, Strategy.A}:
            states = [PopulationState(i_s, i_i)
                      for i_s in range(Z + 1) for i_i in range(Z + 1 - i_s)]
        elif active == {Strategy.S, Strategy.A}:
            states = [PopulationState(i_s, 0) for i_s in range(Z + 1)]
        elif active == {Strategy.I, Strategy.A}:
            states = [PopulationState(0, i_i) for i_i in range(Z + 1)]
        elif active == {Strategy.S, Strategy.I}:
            states = [PopulationState(i_s, Z - i_s) for i_s in range(Z + 1)]
        else:
            raise ValueError(f"unsupported strategy set {strategies}")
        return cls(Z=Z, strategies=tuple(strategies), states=tuple(states))

    def __len__(self) -> int:
        return len(self.states)

    def index_of(self, i_s: int, i_i: int) -> int:
        i_a = self.Z - i_s - i_i
        if i_s < 0 or i_i < 0 or i_a < 0:
            raise ValueError(f"invalid state ({i_s}, {i_i}) for Z={self.Z}")
        active = set(self.strategies)
        if len(active) == 3:
            return state_index(i_s, i_i, self.Z)
        if active == {Strategy.S, Strategy.A}:
            if i_i:
                raise ValueError("state off the S-A edge")
            return i_s
        if active == {Strategy.I, Strategy.A}:
            if i_s:
                raise ValueError("state off the I-A edge")
            return i_i
        if i_a:
            raise ValueError("state off the S-I edge")
        return i_s

    def counts(self) -> np.ndarray:
        """(n_states, 3) array of (i_s, i_i, i_a) counts."""
        arr = np.array(self.states, dtype=float)
        return np.column_stack([arr, self.Z - arr.sum(axis=1)])


def fermi(f_x: float, f_y: float, beta: float) -> float:
    """Probability that an individual with fitness f_x copies one with f_y."""
    return float(expit(beta * (f_y - f_x)))


def transition_prob(state, x: Strategy, y: Strategy, params: ModelParams,
                    ftable: FitnessTable) -> float:
    """One-step probability that some individual switches x -> y.

    Combines imitation (pick an x-player, pick a distinct role model,
    copy with the Fermi probability) and uniform mutation. Both parts
    carry a factor of the x count, so the result is 0 whenever no
    x-player exists and no fitness is evaluated in that case.
    """
    if x is y:
        raise ValueError("source and target strategies must differ")
    i_s, i_i = state
    Z = params.Z
    counts = {Strategy.S: i_s, Strategy.I: i_i, Strategy.A: Z - i_s - i_i}
    i_x, i_y = counts[x], counts[y]
    if i_x == 0:
        return 0.0
    prob = params.mu * i_x / ((params.d - 1) * Z)
    if i_y > 0:
        accept = fermi(ftable.at(i_s, i_i, x), ftable.at(i_s, i_i, y), params.beta)
        prob += (1.0 - params.mu) * (i_x / Z) * (i_y / (Z - 1)) * accept
    return prob


def transition_probs(state, params: ModelParams,
                     ftable: FitnessTable) -> dict[tuple[Strategy, Strategy], float]:
    """All ordered-pair switch probabilities out of one state."""
    return {(x, y): transition_prob(state, x, y, params, ftable)
            for x, y in itertools.permutations(params.strategies, 2)}


def _moved(state: PopulationState, x: Strategy, y: Strategy) -> PopulationState:
    i_s = state[0] - (x is Strategy.S) + (y is Strategy.S)
    i_i = state[1] - (x is Strategy.I) + (y is Strategy.I)
    return PopulationState(i_s, i_i)


@dataclass(frozen=True)
class TransitionModel:
    """Sparse row-stochastic kernel over a state space."""

    space: StateSpace
    kernel: sp.csr_matrix
    params: ModelParams
    ftable: FitnessTable


def build_kernel(params: ModelParams, ftable: FitnessTable,
                 space: StateSpace | None = None) -> TransitionModel:
    """Assemble the transition kernel row by row.

    Each row holds the (at most six) neighbor moves plus the
    complementary self-loop, so rows sum to 1 exactly up to float
    rounding.
    """
    if space is None:
        space = StateSpace.build(params.Z, params.strategies)
    n = len(space)
    rows, cols, vals = [], [], []
    for i, state in enumerate(space.states):
        outflow = 0.0
        for (x, y), prob in transition_probs(state, params, ftable).items():
            if prob == 0.0:
                continue
            j = space.index_of(*_moved(state, x, y))
            rows.append(i)
            cols.append(j)
            vals.append(prob)
            outflow += prob
        stay = 1.0 - outflow
        if stay < -1e-12:
            raise SolverError(f"negative self-loop {stay!r} at state {tuple(state)}")
        rows.append(i)
        cols.append(i)
        vals.append(max(stay, 0.0))
    kernel = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
    kernel.sum_duplicates()
    return TransitionModel(space=space, kernel=kernel, params=params, ftable=ftable)


class StationaryResult(NamedTuple):
    """Stationary probabilities with their derived adoption rates."""

    probs: np.ndarray
    adoption: tuple[float, float, float]  # (p_S, p_I, p_A)
    residual: float
    method: str


def _residual(kernel: sp.csr_matrix, x: np.ndarray) -> float:
    return float(np.max(np.abs(kernel.T @ x - x)))


def _direct_solve(kernel: sp.csr_matrix) -> np.ndarray:
    """Solve x K = x, sum(x) = 1 with one balance row replaced by the
    normalization constraint."""
    n = kernel.shape[0]
    a = (kernel.T - sp.identity(n, format="csr")).tolil()
    a[0, :] = 1.0
    b = np.zeros(n)
    b[0] = 1.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", spla.MatrixRankWarning)
        x = spla.spsolve(a.tocsc(), b)
    return np.asarray(x, dtype=float)


def _power_solve(kernel: sp.csr_matrix, tolerance: float,
                 max_iter: int = 2_000_000) -> np.ndarray:
    kt = kernel.T.tocsr()
    n = kernel.shape[0]
    x = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        x_next = kt @ x
        x_next /= x_next.sum()
        if np.max(np.abs(x_next - x)) < tolerance:
            return x_next
        x = x_next
    raise SolverError(f"power iteration did not converge within {max_iter} steps")


def stationary(model: TransitionModel, tolerance: float = 1e-12,
               method: str = "direct", allow_reducible: bool = False) -> StationaryResult:
    """Stationary distribution of the chain.

    The default direct sparse solve is exact up to linear-solver
    rounding; ``method="power"`` iterates x <- xK until the sup-norm
    update drops below ``tolerance``. Without mutation the chain may be
    reducible and the result depends on initial conditions, so that
    case must be acknowledged with ``allow_reducible=True``.
    """
    if model.params.mu == 0.0 and not allow_reducible:
        raise SolverError("mu = 0: chain may be reducible; "
                          "pass allow_reducible=True to accept absorbing-chain semantics")
    kernel = model.kernel
    if method == "power":
        x = _power_solve(kernel, tolerance)
        used = "power"
    elif method == "direct":
        used = "direct"
        try:
            x = _direct_solve(kernel)
        except Exception:
            x = None
        if x is None or not np.all(np.isfinite(x)) or np.min(x) < -1e-9 \
                or _residual(kernel, x / x.sum()) > 1e-10:
            x = _power_solve(kernel, max(tolerance, 1e-13))
            used = "power-fallback"
    else:
        raise ValueError(f"unknown method {method!r}")
    x = np.clip(x, 0.0, None)
    total = x.sum()
    if not np.isfinite(total) or total <= 0:
        raise SolverError("stationary solve produced a degenerate vector")
    x /= total
    res = _residual(kernel, x)
    adoption = adoption_rates(x, model.space.states, model.space.Z)
    return StationaryResult(probs=x, adoption=adoption, residual=res, method=used)


def gradient_field(model: TransitionModel) -> np.ndarray:
    """Net per-state probability flow toward I and toward S.

    Returns an (n_states, 2) array whose columns are the expected change
    of the insured count and of the pool count in one step: the first
    component sums inflows minus outflows of strategy I, the second the
    same for strategy S.
    """
    params, ftable = model.params, model.ftable
    out = np.zeros((len(model.space), 2))
    for i, state in enumerate(model.space.states):
        t = transition_probs(state, params, ftable)

        def rate(x, y):
            return t.get((x, y), 0.0)

        g_i = (rate(Strategy.S, Strategy.I) + rate(Strategy.A, Strategy.I)
               - rate(Strategy.I, Strategy.S) - rate(Strategy.I, Strategy.A))
        g_s = (rate(Strategy.I, Strategy.S) + rate(Strategy.A, Strategy.S)
               - rate(Strategy.S, Strategy.I) - rate(Strategy.S, Strategy.A))
        out[i] = (g_i, g_s)
    return out


def adoption_rates(probs: np.ndarray, states, Z: int) -> tuple[float, float, float]:
    """Expected strategy frequencies under a distribution over states."""
    arr = np.asarray(states, dtype=float)
    p_s = float(probs @ arr[:, 0]) / Z
    p_i = float(probs @ arr[:, 1]) / Z
    p_a = float(probs @ (Z - arr[:, 0] - arr[:, 1])) / Z
    return p_s, p_i, p_a


def insurer_profit(p_i: float, params: ModelParams) -> float:
    """Expected insurer profit: premium income minus expected payouts
    over the stationary customer base."""
    return p_i * params.Z * (params.c - params.alpha * params.w * params.q)


def solve_stationary(params: ModelParams, tolerance: float = 1e-12,
                     method: str = "direct",
                     allow_reducible: bool = False) -> tuple[TransitionModel, StationaryResult]:
    """Full pipeline: payoff tables, fitness table, kernel, stationary solve."""
    params = validate(params)
    space = StateSpace.build(params.Z, params.strategies)
    tables = build_payoff_tables(params)
    ftable = build_fitness_table(params, tables, space.states)
    model = build_kernel(params, ftable, space)
    result = stationary(model, tolerance=tolerance, method=method,
                        allow_reducible=allow_reducible)
    return model, result
