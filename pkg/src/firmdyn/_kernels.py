"""Compiled inner loops for the logistic map.

Every kernel evaluates the map as ``lam * x * (1.0 - x)`` in the same
operation order as :func:`firmdyn.dynamics.step`, so compiled and
interpreted paths agree bit for bit. ``fastmath`` stays off for the same
reason.
"""

import math

import numpy as np
from numba import njit


@njit(cache=True)
def advance(lam, x, n):
    for _ in range(n):
        x = lam * x * (1.0 - x)
    return x


@njit(cache=True)
def record(lam, x, n):
    out = np.empty(n)
    for i in range(n):
        x = lam * x * (1.0 - x)
        out[i] = x
    return out


@njit(cache=True)
def sweep_block(lams, x0, transient, n):
    rows = np.empty((lams.shape[0], n))
    for j in range(lams.shape[0]):
        lam = lams[j]
        x = x0
        for _ in range(transient):
            x = lam * x * (1.0 - x)
        for i in range(n):
            x = lam * x * (1.0 - x)
            rows[j, i] = x
    return rows


@njit(cache=True)
def log_derivative_sum(lam, x, n, floor):
    """Sum of ln|f'(x_i)| over ``n`` iterates starting at ``x``.

    Returns ``(total, floored_count)``; derivatives below ``floor`` are
    replaced by ``floor``.
    """
    total = 0.0
    floored = 0
    log_floor = math.log(floor)
    for _ in range(n):
        d = abs(lam * (1.0 - 2.0 * x))
        if d < floor:
            total += log_floor
            floored += 1
        else:
            total += math.log(d)
        x = lam * x * (1.0 - x)
    return total, floored


@njit(cache=True)
def separation_sum(lam, x, y, delta0, renorm, intervals):
    """Renormalized two-trajectory growth sum.

    Returns ``(total, done, x, y)`` where ``done`` is the number of
    completed intervals; ``done < intervals`` means the separation
    collapsed to exactly zero during interval ``done``.
    """
    total = 0.0
    for k in range(intervals):
        for _ in range(renorm):
            x = lam * x * (1.0 - x)
            y = lam * y * (1.0 - y)
        d = y - x
        if d == 0.0:
            return total, k, x, y
        total += math.log(abs(d) / delta0)
        s = 1.0 if d > 0.0 else -1.0
        y = x + s * delta0
        if y < 0.0 or y > 1.0:
            y = x - s * delta0
    return total, intervals, x, y


@njit(cache=True)
def first_breach(lam, x, y, epsilon, steps):
    """Index of the first step whose separation reaches ``epsilon``, or -1."""
    for i in range(steps):
        x = lam * x * (1.0 - x)
        y = lam * y * (1.0 - y)
        if abs(y - x) >= epsilon:
            return i
    return -1
