"""Model parameters, strategy labels, and constraint validation."""

from __future__ import annotations

import dataclasses
import enum
from dataclasses import dataclass


class Strategy(enum.Enum):
    """The three ways an individual can manage disaster risk.

    S : member of an informal risk-sharing pool
    I : buyer of index insurance (with its supplementary pool)
    A : no insurance, losses carried alone
    """

    S = "S"
    I = "I"
    A = "A"

    def __repr__(self) -> str:
        return f"Strategy.{self.name}"


#: Canonical ordering used for every serialized artifact.
STRATEGY_ORDER = (Strategy.S, Strategy.I, Strategy.A)


class ParameterError(ValueError):
    """A parameter set violates one or more model constraints."""


def canonical_strategies(strategies) -> tuple[Strategy, ...]:
    """Normalize a strategy collection to the fixed (S, I, A) ordering."""
    chosen = set()
    for s in strategies:
        s = Strategy(s) if not isinstance(s, Strategy) else s
        if s in chosen:
            raise ParameterError(f"duplicate strategy {s.value!r}")
        chosen.add(s)
    return tuple(s for s in STRATEGY_ORDER if s in chosen)


@dataclass(frozen=True)
class ModelParams:
    """All scalar model parameters plus the active strategy set.

    Attributes
    ----------
    w : initial wealth per individual (currency units, > 0).
    p : probability that a disaster hits an individual.
    q : probability that the insurance index triggers a payout.
    r : basis risk, the probability of a disaster that does not trigger
        the index. The four per-individual outcomes then have
        probabilities (p - r), (1 - q - r), (q + r - p) and r.
    alpha : fraction of wealth lost in a disaster, in (0, 1).
    gamma : relative risk aversion of the CRRA utility, >= 0.
    delta1 : wealth fraction contributed to the informal sharing pool.
    delta2 : wealth fraction contributed to the insured members' pool.
    c : insurance premium (currency units).
    beta : selection intensity of the imitation rule, >= 0.
    mu : per-step mutation probability, in [0, 1].
    Z : population size (integer >= 2).
    N : group size offered the insurance plan (integer, 2 <= N <= Z).
    strategies : active strategy set, 2 or 3 of (S, I, A).

    The defaults give the baseline configuration used throughout:
    severe losses (alpha = 0.8), nearly perfect index (r = 0.001) and a
    premium of 0.17 in a population of 50 with groups of 40.
    """

    w: float = 1.0
    p: float = 0.2
    q: float = 0.2
    r: float = 0.001
    alpha: float = 0.8
    gamma: float = 0.8
    delta1: float = 0.1
    delta2: float = 0.05
    c: float = 0.17
    beta: float = 10.0
    mu: float = 0.02
    Z: int = 50
    N: int = 40
    strategies: tuple[Strategy, ...] = STRATEGY_ORDER

    @property
    def d(self) -> int:
        """Number of strategies an individual can choose from."""
        return len(self.strategies)

    def has(self, strategy: Strategy) -> bool:
        return strategy in self.strategies

    def outcome_probs(self) -> tuple[float, float, float, float]:
        """Probabilities of the four insured outcomes (u, v, m, n):
        compensated victim, unaffected non-recipient, falsely
        compensated, uncompensated victim."""
        return (self.p - self.r, 1.0 - self.q - self.r,
                self.q + self.r - self.p, self.r)

    def replace(self, **changes) -> "ModelParams":
        if "strategies" in changes:
            changes["strategies"] = canonical_strategies(changes["strategies"])
        return dataclasses.replace(self, **changes)


def validate(params: ModelParams) -> ModelParams:
    """Return ``params`` unchanged iff every constraint holds.

    Raises
    ------
    ParameterError
        Listing every violated constraint by name, one per line.
    """
    v = []
    pr = params

    if not pr.w > 0:
        v.append("wealth w must be positive")
    if not 0.0 <= pr.p <= 1.0:
        v.append("disaster probability p outside [0, 1]")
    if not 0.0 <= pr.q <= 1.0:
        v.append("trigger probability q outside [0, 1]")
    if pr.r < max(0.0, pr.p - pr.q):
        v.append("r below max(0, p - q): outcome probability q + r - p negative")
    if pr.r > min(pr.p, 1.0 - pr.q):
        v.append("r exceeds min(p, 1 - q): an outcome probability turns negative")
    if not 0.0 < pr.alpha < 1.0:
        v.append("loss fraction alpha outside (0, 1)")
    if not 0.0 <= pr.delta1 < 1.0:
        v.append("pool contribution delta1 outside [0, 1)")
    if not 0.0 <= pr.delta2 < 1.0:
        v.append("index-pool contribution delta2 outside [0, 1)")
    if not pr.gamma >= 0.0:
        v.append("risk aversion gamma must be >= 0")
    if not pr.beta >= 0.0:
        v.append("selection intensity beta must be >= 0")
    if not 0.0 <= pr.mu <= 1.0:
        v.append("mutation probability mu outside [0, 1]")
    if int(pr.Z) != pr.Z or pr.Z < 2:
        v.append("population size Z must be an integer >= 2")
    if int(pr.N) != pr.N or pr.N < 2 or pr.N > pr.Z:
        v.append("group size N must be an integer with 2 <= N <= Z")

    try:
        active = canonical_strategies(pr.strategies)
        if len(active) not in (2, 3):
            v.append("strategy set must contain 2 or 3 strategies")
        elif active != tuple(pr.strategies):
            v.append("strategy set must be ordered (S, I, A)")
    except ParameterError as exc:
        v.append(str(exc))
        active = ()

    # Positivity of every utility argument reachable under the parameters.
    # Pool wealths are covered by alpha < 1 and delta1 < 1; the insured
    # wealths additionally bound the premium.
    if Strategy.I in active:
        if not pr.w - pr.c - pr.delta2 * pr.w > 0:
            v.append("premium plus index-pool contribution leaves no wealth: "
                     "c >= (1 - delta2)*w")
        if not (1.0 - pr.alpha) * pr.w - pr.c > 0:
            v.append("premium exceeds (1 - alpha)*w: an uncompensated insured "
                     "victim would end with non-positive wealth")

    if v:
        raise ParameterError("invalid parameters:\n  " + "\n  ".join(v))
    return params
