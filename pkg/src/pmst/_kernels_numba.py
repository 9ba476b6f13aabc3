"""Numba-compiled implementations of the hot kernels.

Same contracts as ``_kernels_numpy``; the see-saw runs each start in an
explicit loop parallelized over starts, the grid scan parallelizes over
the first angle index.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

ZERO_TOL = 1e-12

STATE_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


@njit(cache=True)
def _seesaw_single(w, col_degenerate, v, m, degenerate, max_sweeps, tol):
    """Run one start in place; returns (value, sweeps, monotone)."""
    n_states, n_meas = w.shape
    value = -np.inf
    monotone = True
    sweeps = 0
    for _ in range(max_sweeps):
        # State response: each state aligns with its weighted sum of the
        # genuine measurement directions (fixed-outcome columns are
        # constants and exert no pull).
        for x in range(n_states):
            ux = 0.0
            uy = 0.0
            uz = 0.0
            for y in range(n_meas):
                if degenerate[y]:
                    continue
                ux += w[x, y] * v[y, 0]
                uy += w[x, y] * v[y, 1]
                uz += w[x, y] * v[y, 2]
            norm = np.sqrt(ux * ux + uy * uy + uz * uz)
            if norm > ZERO_TOL:
                m[x, 0] = ux / norm
                m[x, 1] = uy / norm
                m[x, 2] = uz / norm
            else:
                m[x, 0] = 0.0
                m[x, 1] = 0.0
                m[x, 2] = 1.0
        # Measurement response: each column takes the better of the genuine
        # direction along its weighted state sum and the fixed outcome.
        new_value = 0.0
        for y in range(n_meas):
            bx = 0.0
            by = 0.0
            bz = 0.0
            for x in range(n_states):
                bx += w[x, y] * m[x, 0]
                by += w[x, y] * m[x, 1]
                bz += w[x, y] * m[x, 2]
            norm = np.sqrt(bx * bx + by * by + bz * bz)
            if norm > ZERO_TOL:
                v[y, 0] = bx / norm
                v[y, 1] = by / norm
                v[y, 2] = bz / norm
            degenerate[y] = col_degenerate[y] > norm
            if degenerate[y]:
                new_value += col_degenerate[y]
            else:
                new_value += norm
        noise = 1e-9 * max(1.0, abs(value))
        if new_value < value - noise:
            monotone = False
        delta = new_value - value
        value = new_value
        sweeps += 1
        if delta < tol:
            break
    return value, sweeps, monotone


@njit(cache=True, parallel=True)
def _seesaw_batch(
    w, col_degenerate, v, states, degenerate, values, sweeps, monotone,
    max_sweeps, tol,
):
    for s in prange(v.shape[0]):
        value, n_sweeps, mono = _seesaw_single(
            w, col_degenerate, v[s], states[s], degenerate[s], max_sweeps, tol
        )
        values[s] = value
        sweeps[s] = n_sweeps
        monotone[s] = mono


def seesaw_batch(w, v0, max_sweeps: int = 500, tol: float = 1e-12,
                 allow_degenerate: bool = True):
    """See ``_kernels_numpy.seesaw_batch``."""
    w = np.ascontiguousarray(w, dtype=np.float64)
    v = np.ascontiguousarray(np.array(v0, dtype=np.float64))
    if allow_degenerate:
        col_degenerate = np.abs(w.sum(axis=0))
    else:
        col_degenerate = np.zeros(w.shape[1])
    n_starts = v.shape[0]
    states = np.zeros((n_starts, w.shape[0], 3))
    degenerate = np.zeros((n_starts, w.shape[1]), dtype=np.bool_)
    values = np.empty(n_starts)
    sweeps = np.empty(n_starts, dtype=np.int64)
    monotone = np.empty(n_starts, dtype=np.bool_)
    _seesaw_batch(
        w, col_degenerate, v, states, degenerate, values, sweeps, monotone,
        max_sweeps, tol,
    )
    return values, states, v, degenerate, sweeps, monotone


@njit(cache=True, parallel=True)
def _grid_scan_pair(w_pinned, w_a, w_b, degenerate, cos_t, sin_t, row_best, row_idx):
    n_steps = cos_t.shape[0]
    n_meas = w_pinned.shape[0]
    for i1 in prange(n_steps):
        best = -np.inf
        best_i2 = 0
        for i2 in range(n_steps):
            total = 0.0
            for y in range(n_meas):
                gx = w_pinned[y] + w_a[y] * cos_t[i1] + w_b[y] * cos_t[i2]
                gz = w_a[y] * sin_t[i1] + w_b[y] * sin_t[i2]
                payoff = np.sqrt(gx * gx + gz * gz)
                if degenerate[y] > payoff:
                    payoff = degenerate[y]
                total += payoff
            if total > best:
                best = total
                best_i2 = i2
        row_best[i1] = best
        row_idx[i1] = best_i2


def real_grid_scan(w, n_steps: int):
    """See ``_kernels_numpy.real_grid_scan``."""
    w = np.ascontiguousarray(w, dtype=np.float64)
    if w.shape[0] != 4:
        raise ValueError("the coincidence scan expects exactly four states")
    angles = np.arange(n_steps) * (2.0 * np.pi / n_steps)
    cos_t, sin_t = np.cos(angles), np.sin(angles)
    degenerate = np.abs(w.sum(axis=0))

    row_best = np.empty(n_steps)
    row_idx = np.empty(n_steps, dtype=np.int64)
    best_value = -np.inf
    best_index = (0, 0, 0)
    for p, (i, j) in enumerate(STATE_PAIRS):
        rest = [x for x in range(4) if x not in (i, j)]
        _grid_scan_pair(
            np.ascontiguousarray(w[i] + w[j]),
            np.ascontiguousarray(w[rest[0]]),
            np.ascontiguousarray(w[rest[1]]),
            degenerate,
            cos_t,
            sin_t,
            row_best,
            row_idx,
        )
        i1 = int(np.argmax(row_best))
        if row_best[i1] > best_value:
            best_value = float(row_best[i1])
            best_index = (p, i1, int(row_idx[i1]))
    return best_value, best_index[0], best_index[1], best_index[2]
