"""Independent reference computations used by the tests.

None of these call into the code paths they check.
"""

import itertools
from fractions import Fraction
from math import comb

import numpy as np


def fit_sinusoid(y, freq, fs):
    """Least-squares amplitude of a known-frequency sinusoid (with offset)."""
    t = np.arange(len(y)) / fs
    a = np.column_stack([np.sin(2 * np.pi * freq * t), np.cos(2 * np.pi * freq * t), np.ones_like(t)])
    c, *_ = np.linalg.lstsq(a, y, rcond=None)
    return float(np.hypot(c[0], c[1]))


def xcorr_peak_lag(x, y, max_lag=50):
    """Lag (samples) maximising the cross-correlation of y against x."""
    lags = range(-max_lag, max_lag + 1)
    n = len(x)
    best, arg = -np.inf, 0
    for lag in lags:
        if lag >= 0:
            v = np.dot(x[:n - lag], y[lag:])
        else:
            v = np.dot(x[-lag:], y[:n + lag])
        if v > best:
            best, arg = v, lag
    return arg


def brute_force_mw_p(a, b):
    """Two-sided permutation p of U by enumerating every group assignment.

    U of an assignment is the count of (mine, other) pairs with mine > other,
    ties counting one half. Returns ``(u, p)`` with p an exact Fraction:
    2 * min(P(U <= u), P(U >= u)), capped at 1.
    """
    pooled = np.asarray(list(a) + list(b), dtype=float)
    n, n1 = pooled.size, len(a)
    wins = (pooled[:, None] > pooled[None, :]) + 0.5 * (pooled[:, None] == pooled[None, :])
    masks = np.zeros((comb(n, n1), n))
    for k, combo in enumerate(itertools.combinations(range(n), n1)):
        masks[k, list(combo)] = 1.0
    # half-integers are exact in binary floating point
    u_all = np.einsum("ki,ij,kj->k", masks, wins, 1.0 - masks)
    own = np.zeros(n)
    own[:n1] = 1.0
    u_obs = float(own @ wins @ (1.0 - own))
    le, ge = int(np.sum(u_all <= u_obs)), int(np.sum(u_all >= u_obs))
    return u_obs, min(Fraction(1), 2 * Fraction(min(le, ge), len(u_all)))


def best_stump_accuracy(x, y):
    """Best training accuracy of any single-threshold split (exhaustive)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y)
    classes = sorted(set(y.tolist()))
    best = 0.0
    for j in range(x.shape[1]):
        vals = np.unique(x[:, j])
        cuts = np.concatenate([[vals[0] - 1], (vals[1:] + vals[:-1]) / 2])
        for c in cuts:
            left = x[:, j] <= c
            for la in classes:
                for ra in classes:
                    pred = np.where(left, la, ra)
                    best = max(best, float(np.mean(pred == y)))
    return best


def trapezoid_on_fine_grid(freqs, values, lo, hi, n=200001):
    """Dense-grid quadrature of the linear interpolant, for cross-checking."""
    f = np.linspace(lo, hi, n)
    return float(np.trapezoid(np.interp(f, freqs, values), f))
