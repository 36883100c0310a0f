"""Log-space combinatorics shared by the payoff and fitness machinery.

Everything is evaluated through the log-gamma function and exponentiated
per term, so binomial coefficients stay representable for population
sizes well into the hundreds. Zero-probability categories follow the
0**0 = 1 convention via ``xlogy``.
"""

from __future__ import annotations

import numpy as np
from scipy.special import gammaln


def log_choose(n, k):
    """log C(n, k), elementwise; -inf where k < 0 or k > n."""
    n = np.asarray(n, dtype=float)
    k = np.asarray(k, dtype=float)
    valid = (k >= 0) & (k <= n)
    nn = np.where(valid, n, 1.0)
    kk = np.where(valid, k, 0.0)
    out = gammaln(nn + 1.0) - gammaln(kk + 1.0) - gammaln(nn - kk + 1.0)
    return np.where(valid, out, -np.inf)


def choose(n, k):
    """C(n, k) as float; 0 where the pair is out of range."""
    return np.exp(log_choose(n, k))


def log_choose_table(n_max: int, k_max: int) -> np.ndarray:
    """Table T[n, k] = log C(n, k) for 0 <= n <= n_max, 0 <= k <= k_max."""
    n = np.arange(n_max + 1)[:, None]
    k = np.arange(k_max + 1)[None, :]
    return log_choose(n, k)
