"""Real-coded variation operators: SBX crossover and polynomial mutation."""

from __future__ import annotations

import numpy as np


def sbx_crossover(p1, p2, lows, highs, eta, rate, rng):
    """Simulated binary crossover of two parent vectors within box bounds.

    Returns two children; with probability 1-rate the parents pass through
    unchanged.
    """
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    c1, c2 = p1.copy(), p2.copy()
    if rng.random() > rate:
        return c1, c2
    for i in range(len(p1)):
        if rng.random() > 0.5:
            continue
        x1, x2 = p1[i], p2[i]
        if abs(x1 - x2) < 1e-14:
            continue
        lo, hi = min(x1, x2), max(x1, x2)
        u = rng.random()
        beta = (
            (2.0 * u) ** (1.0 / (eta + 1.0))
            if u <= 0.5
            else (1.0 / (2.0 * (1.0 - u))) ** (1.0 / (eta + 1.0))
        )
        c1[i] = 0.5 * ((1.0 + beta) * lo + (1.0 - beta) * hi)
        c2[i] = 0.5 * ((1.0 - beta) * lo + (1.0 + beta) * hi)
        c1[i] = min(max(c1[i], lows[i]), highs[i])
        c2[i] = min(max(c2[i], lows[i]), highs[i])
    return c1, c2


def polynomial_mutation(x, lows, highs, eta, rate, rng):
    """Polynomial mutation; each variable mutates with probability rate."""
    y = np.asarray(x, dtype=float).copy()
    for i in range(len(y)):
        if rng.random() > rate:
            continue
        lo, hi = lows[i], highs[i]
        span = hi - lo
        if span <= 0:
            continue
        u = rng.random()
        d1 = (y[i] - lo) / span
        d2 = (hi - y[i]) / span
        mpow = 1.0 / (eta + 1.0)
        if u <= 0.5:
            val = 2.0 * u + (1.0 - 2.0 * u) * (1.0 - d1) ** (eta + 1.0)
            delta = val**mpow - 1.0
        else:
            val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - d2) ** (eta + 1.0)
            delta = 1.0 - val**mpow
        y[i] = min(max(y[i] + delta * span, lo), hi)
    return y
