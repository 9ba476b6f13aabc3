"""Pure-numpy implementations of the hot kernels.

Semantics are shared with ``_kernels_numba``; this module is the reference
and the fallback selected by ``PMST_BACKEND=numpy``.  Starts are batched
through array operations, but each start follows exactly the same update
sequence as the per-start loops of the compiled twin.
"""

from __future__ import annotations

import numpy as np

ZERO_TOL = 1e-12
DEFAULT_DIRECTION = np.array([0.0, 0.0, 1.0])

# Unordered index pairs of four states used by the coincidence-ansatz scan.
STATE_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


def seesaw_batch(w, v0, max_sweeps: int = 500, tol: float = 1e-12,
                 allow_degenerate: bool = True):
    """Alternating best-response maximization from a batch of starts.

    Each sweep sets every state to its exact best response (align with the
    weighted sum of the genuine measurement directions) and every column to
    its exact best measurement: the genuine direction along the weighted
    state sum, or the better fixed-outcome option when the absolute column
    sum exceeds the genuine payoff.  Both half-steps are exact conditional
    maximizers, so the value never decreases.  With
    ``allow_degenerate=False`` columns are restricted to genuine
    measurements and the value is the projective-measurement maximum.

    Parameters
    ----------
    w : (M, V) array
        Witness coefficient matrix.
    v0 : (S, V, 3) array
        Initial unit measurement directions, one set per start.
    max_sweeps, tol
        A start stops after ``max_sweeps`` sweeps or when the value gain
        of a sweep drops below ``tol``.

    Returns
    -------
    values : (S,) array
        Converged witness value per start (fixed-outcome columns counted
        at their absolute column sum).
    states : (S, M, 3) array
    directions : (S, V, 3) array
    degenerate : (S, V) bool array
        Columns served by a fixed-outcome measurement at convergence.
    sweeps : (S,) int array
    monotone : (S,) bool array
        False where a sweep decreased the value beyond numerical noise.
    """
    w = np.asarray(w, dtype=float)
    v = np.array(v0, dtype=float)
    n_starts = v.shape[0]
    n_states, n_meas = w.shape
    col_degenerate = np.abs(w.sum(axis=0)) if allow_degenerate else np.zeros(n_meas)

    states = np.zeros((n_starts, n_states, 3))
    degenerate = np.zeros((n_starts, n_meas), dtype=bool)
    values = np.full(n_starts, -np.inf)
    sweeps = np.zeros(n_starts, dtype=np.int64)
    monotone = np.ones(n_starts, dtype=bool)
    active = np.arange(n_starts)

    for _ in range(max_sweeps):
        if active.size == 0:
            break
        v_act = v[active]
        genuine_mask = ~degenerate[active]
        u = np.matmul(w, v_act * genuine_mask[..., None])
        u_norm = np.linalg.norm(u, axis=2)
        u_ok = u_norm > ZERO_TOL
        m_act = np.where(
            u_ok[..., None],
            u / np.where(u_ok, u_norm, 1.0)[..., None],
            DEFAULT_DIRECTION,
        )
        b = np.matmul(w.T, m_act)
        b_norm = np.linalg.norm(b, axis=2)
        b_ok = b_norm > ZERO_TOL
        v_act = np.where(
            b_ok[..., None], b / np.where(b_ok, b_norm, 1.0)[..., None], v_act
        )
        deg_act = col_degenerate[None, :] > b_norm
        new_values = np.maximum(b_norm, col_degenerate[None, :]).sum(axis=1)

        old_values = values[active]
        noise = 1e-9 * np.maximum(1.0, np.abs(old_values))
        monotone[active[new_values < old_values - noise]] = False

        states[active] = m_act
        v[active] = v_act
        degenerate[active] = deg_act
        values[active] = new_values
        sweeps[active] += 1
        active = active[~(new_values - old_values < tol)]

    return values, states, v, degenerate, sweeps, monotone


def real_grid_scan(w, n_steps: int):
    """Dense relative-angle scan of coplanar four-state configurations.

    For every unordered pair of states pinned to a common in-plane angle 0,
    the remaining two states sweep an ``n_steps`` grid of angles; each
    column contributes the better of its best genuine payoff and its
    degenerate payoff.  Returns the best value found together with the
    (pair index, angle index, angle index) that realizes it.
    """
    w = np.asarray(w, dtype=float)
    if w.shape[0] != 4:
        raise ValueError("the coincidence scan expects exactly four states")
    angles = np.arange(n_steps) * (2.0 * np.pi / n_steps)
    cos_t, sin_t = np.cos(angles), np.sin(angles)
    degenerate = np.abs(w.sum(axis=0))

    best_value = -np.inf
    best_index = (0, 0, 0)
    for p, (i, j) in enumerate(STATE_PAIRS):
        rest = [x for x in range(4) if x not in (i, j)]
        w_pinned = w[i] + w[j]
        w_a, w_b = w[rest[0]], w[rest[1]]
        for i1 in range(n_steps):
            gx = (
                w_pinned[None, :]
                + w_a[None, :] * cos_t[i1]
                + w_b[None, :] * cos_t[:, None]
            )
            gz = w_a[None, :] * sin_t[i1] + w_b[None, :] * sin_t[:, None]
            payoff = np.maximum(np.hypot(gx, gz), degenerate[None, :]).sum(axis=1)
            i2 = int(np.argmax(payoff))
            if payoff[i2] > best_value:
                best_value = float(payoff[i2])
                best_index = (p, i1, i2)
    return best_value, best_index[0], best_index[1], best_index[2]
