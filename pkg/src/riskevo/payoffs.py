"""Single-group expected-utility payoffs of the three strategies.

A group of N individuals contains k pool members, l insured members and
N - k - l uninsured ones. Disasters strike each individual independently
with probability p; for the insured, the four outcomes (compensated
victim, unaffected, falsely compensated, uncompensated victim) occur
independently with probabilities (p - r), (1 - q - r), (q + r - p), r.
Payoffs are expected CRRA utilities per member, so they depend only on
the member count of one's own kind, not on the full group composition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import gammaln, xlogy

from .combin import log_choose
from .params import ModelParams, Strategy


class UtilityDomainError(ValueError):
    """CRRA utility evaluated at non-positive wealth."""


def utility(x, gamma: float):
    """CRRA utility x**(1-gamma) / (1-gamma), with the log limit at gamma = 1.

    Accepts a scalar or an array; raises UtilityDomainError if any
    wealth argument is non-positive.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr <= 0.0):
        bad = float(np.min(arr))
        raise UtilityDomainError(f"utility undefined for wealth {bad!r} <= 0")
    if gamma == 1.0:
        out = np.log(arr)
    else:
        out = arr ** (1.0 - gamma) / (1.0 - gamma)
    return float(out) if arr.ndim == 0 else out


def pool_group_utility(h: int, k: int, params: ModelParams) -> float:
    """Total utility of a k-member sharing pool when h members are struck.

    Victims split the pooled fund k*delta1*w equally; if nobody is
    struck the fund is returned in full.
    """
    if not 0 <= h <= k:
        raise ValueError(f"disaster count {h} outside 0..{k}")
    w, a, d1, g = params.w, params.alpha, params.delta1, params.gamma
    if h == 0:
        return k * utility(w, g)
    victim = (1.0 - a) * w - d1 * w + k * d1 * w / h
    return h * utility(victim, g) + (k - h) * utility(w - d1 * w, g)


def pool_payoff(k: int, params: ModelParams) -> float:
    """Expected per-member payoff of a k-member risk-sharing pool."""
    if k < 1:
        raise ValueError("pool size must be >= 1")
    p = params.p
    total = 0.0
    for h in range(k + 1):
        log_mass = (float(log_choose(k, h))
                    + float(xlogy(h, p)) + float(xlogy(k - h, 1.0 - p)))
        total += math.exp(log_mass) * pool_group_utility(h, k, params)
    return total / k


class OutcomePartition(NamedTuple):
    """Counts of the four insured outcomes within a group, summing to l."""

    u: int  # disaster victims who were compensated
    v: int  # unaffected members without a payout
    m: int  # falsely compensated (payout without a disaster)
    n: int  # disaster victims left uncompensated


def outcome_probability(part: OutcomePartition, l: int, params: ModelParams) -> float:
    """Multinomial probability of an outcome partition among l insured."""
    u, v, m, n = part
    if min(u, v, m, n) < 0 or u + v + m + n != l:
        raise ValueError(f"partition {part} does not sum to {l}")
    pu, pv, pm, pn = params.outcome_probs()
    log_mass = (gammaln(l + 1)
                - gammaln(u + 1) - gammaln(v + 1) - gammaln(m + 1) - gammaln(n + 1)
                + xlogy(u, pu) + xlogy(v, pv) + xlogy(m, pm) + xlogy(n, pn))
    return float(np.exp(log_mass))


def index_group_utility(part: OutcomePartition, l: int, params: ModelParams) -> float:
    """Total utility of l insured members under an outcome partition.

    If nobody is left uncompensated (n = 0) the supplementary pool is
    refunded in full; otherwise the n uncompensated victims split the
    pooled fund l*delta2*w equally.
    """
    u, v, m, n = part
    if min(u, v, m, n) < 0 or u + v + m + n != l:
        raise ValueError(f"partition {part} does not sum to {l}")
    w, a, d2, c, g = params.w, params.alpha, params.delta2, params.c, params.gamma
    if n == 0:
        return (u + v) * utility(w - c, g) + m * utility(w - c + a * w, g)
    covered = (u + v) * utility(w - c - d2 * w, g)
    false_pos = m * utility(w - c + a * w - d2 * w, g)
    uncomp = n * utility((1.0 - a) * w - c - d2 * w + l * d2 * w / n, g)
    return covered + false_pos + uncomp


def index_payoff(l: int, params: ModelParams) -> float:
    """Expected per-member payoff of l index-insurance buyers.

    The four outcome categories are marginalized to three: the group
    utility depends on u and v only through s = u + v, so the sum runs
    over (s, m, n) with the merged probability (p - r) + (1 - q - r).
    """
    if l < 1:
        raise ValueError("insured count must be >= 1")
    pu, pv, pm, pn = params.outcome_probs()
    ps = pu + pv
    w, a, d2, c, g = params.w, params.alpha, params.delta2, params.c, params.gamma

    u_refund = utility(w - c, g)
    u_refund_m = utility(w - c + a * w, g)
    u_kept = utility(w - c - d2 * w, g)
    u_kept_m = utility(w - c + a * w - d2 * w, g)

    # One triangle row per uncompensated count n; n >= 1 rows share the
    # per-victim pool share l*delta2*w/n.
    total = 0.0
    for n in range(l + 1):
        m = np.arange(l - n + 1)
        s = l - n - m
        log_mass = (gammaln(l + 1)
                    - gammaln(s + 1) - gammaln(m + 1) - gammaln(n + 1)
                    + xlogy(s, ps) + xlogy(m, pm) + xlogy(n, pn))
        if n == 0:
            q_tot = s * u_refund + m * u_refund_m
        else:
            u_uncomp = utility((1.0 - a) * w - c - d2 * w + l * d2 * w / n, g)
            q_tot = s * u_kept + m * u_kept_m + n * u_uncomp
        total += float(np.exp(log_mass) @ q_tot)
    return total / l


def index_payoff_quadrinomial(l: int, params: ModelParams) -> float:
    """Reference evaluation of the insured payoff over all (u, v, m, n).

    Slower four-index sum kept as an internal cross-check of the merged
    three-category form used by :func:`index_payoff`.
    """
    total = 0.0
    for u in range(l + 1):
        for v in range(l - u + 1):
            for m in range(l - u - v + 1):
                part = OutcomePartition(u, v, m, l - u - v - m)
                total += (outcome_probability(part, l, params)
                          * index_group_utility(part, l, params))
    return total / l


def loner_payoff(params: ModelParams) -> float:
    """Expected payoff of an uninsured individual."""
    w, a, g = params.w, params.alpha, params.gamma
    return params.p * utility((1.0 - a) * w, g) + (1.0 - params.p) * utility(w, g)


@dataclass(frozen=True)
class PayoffTables:
    """Precomputed per-member payoffs for every own-kind count 1..N.

    ``pool[k]`` and ``index[l]`` are indexed directly by member count
    (entry 0 is NaN); a table is None when its strategy is inactive.
    """

    pool: np.ndarray | None
    index: np.ndarray | None
    loner: float

    def __post_init__(self):
        for tab in (self.pool, self.index):
            if tab is not None and not np.all(np.isfinite(tab[1:])):
                raise ValueError("non-finite payoff table entry")


def build_payoff_tables(params: ModelParams) -> PayoffTables:
    """Evaluate pool and insured payoffs for all counts up to N."""
    n = params.N
    pool = index = None
    if params.has(Strategy.S):
        pool = np.full(n + 1, np.nan)
        pool[1:] = [pool_payoff(k, params) for k in range(1, n + 1)]
    if params.has(Strategy.I):
        index = np.full(n + 1, np.nan)
        index[1:] = [index_payoff(l, params) for l in range(1, n + 1)]
    return PayoffTables(pool=pool, index=index, loner=loner_payoff(params))
