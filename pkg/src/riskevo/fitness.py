"""State-dependent fitness from hypergeometric group sampling.

An individual's group is formed by drawing N - 1 co-players uniformly
without replacement from the other Z - 1 individuals. Fitness is the
expectation of the group payoff over that draw, so it depends only on
the population composition (i_s, i_i) and the focal strategy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .combin import log_choose, log_choose_table
from .params import ModelParams, Strategy
from .payoffs import PayoffTables


def group_weight(i_s: int, i_i: int, k: int, l: int, Z: int, N: int,
                 focal: Strategy) -> float:
    """Probability that a focal player's N-1 co-players contain exactly
    k pool members and l insured members.

    The focal individual is excluded from the urn, so its own strategy
    count is reduced by one. Requires the focal strategy to be present.
    """
    urn_s = i_s - (focal is Strategy.S)
    urn_i = i_i - (focal is Strategy.I)
    urn_a = Z - i_s - i_i - (focal is Strategy.A)
    if min(urn_s, urn_i, urn_a) < 0:
        raise ValueError("focal strategy absent from the population")
    if k < 0 or l < 0 or k + l > N - 1:
        raise ValueError("co-player counts exceed group size")
    log_w = (log_choose(urn_s, k) + log_choose(urn_i, l)
             + log_choose(urn_a, N - 1 - k - l) - log_choose(Z - 1, N - 1))
    return float(np.exp(log_w))


def _co_player_weights(i_s: int, i_i: int, Z: int, N: int, focal: Strategy,
                       lct: np.ndarray) -> np.ndarray:
    """(N, N) matrix of co-player draw probabilities over (k, l).

    Entry [k, l] is the hypergeometric mass of k pool members and l
    insured members among the N - 1 co-players; impossible cells are 0.
    ``lct`` is a log-choose table covering rows 0..Z-1, columns 0..N-1.
    """
    urn_s = i_s - (focal is Strategy.S)
    urn_i = i_i - (focal is Strategy.I)
    urn_a = Z - i_s - i_i - (focal is Strategy.A)
    m = N - 1
    log_s = lct[urn_s, :m + 1]
    log_i = lct[urn_i, :m + 1]
    log_a = lct[urn_a, :m + 1]
    counts = np.arange(m + 1)
    rest = m - (counts[:, None] + counts[None, :])
    log_rest = np.where(rest >= 0, log_a[np.clip(rest, 0, m)], -np.inf)
    log_w = log_s[:, None] + log_i[None, :] + log_rest - lct[Z - 1, m]
    return np.exp(log_w)


def fitness_at(i_s: int, i_i: int, params: ModelParams, tables: PayoffTables,
               _lct: np.ndarray | None = None) -> tuple[float, float, float]:
    """Fitness of a pool member, an insured member, and a loner at a state.

    Components for strategies with zero count (or inactive ones) are
    NaN; they are never consumed because every transition carries a
    factor of the source strategy's count.
    """
    Z, N = params.Z, params.N
    if i_s < 0 or i_i < 0 or i_s + i_i > Z:
        raise ValueError(f"invalid state ({i_s}, {i_i}) for Z={Z}")
    lct = _lct if _lct is not None else log_choose_table(Z, N)
    f_pool = f_index = np.nan
    if i_s >= 1 and tables.pool is not None:
        w = _co_player_weights(i_s, i_i, Z, N, Strategy.S, lct)
        f_pool = float(w.sum(axis=1) @ tables.pool[1:N + 1])
    if i_i >= 1 and tables.index is not None:
        w = _co_player_weights(i_s, i_i, Z, N, Strategy.I, lct)
        f_index = float(w.sum(axis=0) @ tables.index[1:N + 1])
    return f_pool, f_index, tables.loner


@dataclass(frozen=True)
class FitnessTable:
    """Fitness of each strategy at every population state.

    ``pool[i_s, i_i]`` and ``index[i_s, i_i]`` are (Z+1, Z+1) matrices
    with NaN at states where the strategy is absent or that were not
    requested; the loner fitness is state-independent.
    """

    pool: np.ndarray | None
    index: np.ndarray | None
    loner: float

    def at(self, i_s: int, i_i: int, strategy: Strategy) -> float:
        if strategy is Strategy.S:
            return float(self.pool[i_s, i_i]) if self.pool is not None else np.nan
        if strategy is Strategy.I:
            return float(self.index[i_s, i_i]) if self.index is not None else np.nan
        return self.loner


def build_fitness_table(params: ModelParams, tables: PayoffTables,
                        states) -> FitnessTable:
    """Fill fitness matrices for every state in ``states``.

    ``states`` is an iterable of (i_s, i_i) pairs; construction is a
    pure map over them, so tables for disjoint parameter sets can be
    built concurrently.
    """
    Z, N = params.Z, params.N
    lct = log_choose_table(Z, N)
    f_pool = np.full((Z + 1, Z + 1), np.nan) if tables.pool is not None else None
    f_index = np.full((Z + 1, Z + 1), np.nan) if tables.index is not None else None
    pool_vec = tables.pool[1:N + 1] if tables.pool is not None else None
    index_vec = tables.index[1:N + 1] if tables.index is not None else None
    for i_s, i_i in states:
        if f_pool is not None and i_s >= 1:
            w = _co_player_weights(i_s, i_i, Z, N, Strategy.S, lct)
            f_pool[i_s, i_i] = w.sum(axis=1) @ pool_vec
        if f_index is not None and i_i >= 1:
            w = _co_player_weights(i_s, i_i, Z, N, Strategy.I, lct)
            f_index[i_s, i_i] = w.sum(axis=0) @ index_vec
    return FitnessTable(pool=f_pool, index=f_index, loner=tables.loner)
