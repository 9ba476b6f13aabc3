"""Classical, real-qubit and complex-qubit witness maxima.

* ``classical_bound``: exact maximum over deterministic bit strategies by
  exhaustive enumeration.
* ``quantum_bound``: multi-start alternating maximization over unit Bloch
  vectors (isotropic starts) or coplanar ones (in-plane starts), followed
  by a per-column comparison against the fixed-outcome options.
* ``real_family`` / ``real_family_value``: the analytic coplanar
  configurations conjectured optimal for the umbrella witness.
* ``verify_selftest``: numerical uniqueness check of the optimum through
  joint Gram matrices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _backend
from ._kernels_numpy import STATE_PAIRS
from .core import joint_gram
from .errors import OutOfRange, SizeLimit, TargetSuboptimal
from .witness import (
    PMScenario,
    _coeffs,
    best_measurements,
    best_states,
    eval_witness,
)

CLASSICAL = "classical"
REAL_QUBIT = "real_qubit"
COMPLEX_QUBIT = "complex_qubit"

_MODEL_ALIASES = {
    "classical": CLASSICAL,
    "real": REAL_QUBIT,
    "real_qubit": REAL_QUBIT,
    "complex": COMPLEX_QUBIT,
    "complex_qubit": COMPLEX_QUBIT,
}
_DEFAULT_STARTS = {COMPLEX_QUBIT: 64, REAL_QUBIT: 256}

MAX_SWEEPS = 500
SWEEP_TOL = 1e-12
ENUMERATION_LIMIT = 26  # cap on M_m + 2 * M_v for the classical enumeration


@dataclass(frozen=True)
class BoundResult:
    """Maximum found for one model, along with the attaining scenario.

    ``converged_fraction`` is the share of starts whose final value lies
    within 1e-9 of the best; the recorded seed fully determines all starts.
    """

    value: float
    model: str
    argmax: PMScenario
    starts_used: int
    converged_fraction: float
    seed: int | None = None


@dataclass(frozen=True)
class RealFamilyConfig:
    """Coplanar four-state configuration of the umbrella real-qubit family."""

    c: float
    branch: str
    angles: dict
    states: np.ndarray


@dataclass(frozen=True)
class SelfTestReport:
    """Outcome of the numerical uniqueness check.

    Every start reaching the bound must reproduce the target's joint Gram
    matrix of states and measurement directions (orthogonal transformations
    leave exactly that invariant).
    """

    passed: bool
    bound: float
    target_value: float
    n_optimal: int
    trials: int
    worst_deviation: float
    gram_tol: float
    value_tol: float


def canonical_model(model: str) -> str:
    try:
        return _MODEL_ALIASES[model]
    except KeyError:
        raise ValueError(f"unknown model {model!r}") from None


def classical_bound(witness) -> BoundResult:
    """Exact classical maximum by deterministic-strategy enumeration.

    Alice's deterministic bit strategies reduce to sign vectors over the
    states on a fixed axis; for each, every column independently takes the
    better of its signed column sum (genuine response) and its absolute
    column sum (fixed-outcome response).  Shared randomness cannot help a
    linear functional, so this enumeration is exact.
    """
    w = _coeffs(witness)
    n_states, n_meas = w.shape
    if n_states + 2 * n_meas > ENUMERATION_LIMIT:
        raise SizeLimit(
            f"{n_states} states and {n_meas} measurements exceed the "
            f"enumeration cap ({ENUMERATION_LIMIT})"
        )
    col_abs = np.abs(w.sum(axis=0))

    best_value = -np.inf
    best_signs = None
    total = 1 << n_states
    chunk = 1 << 16
    bit_index = np.arange(n_states)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        signs = 1.0 - 2.0 * ((idx[:, None] >> bit_index[None, :]) & 1)
        values = np.maximum(np.abs(signs @ w), col_abs[None, :]).sum(axis=1)
        k = int(np.argmax(values))
        if values[k] > best_value:
            best_value = float(values[k])
            best_signs = signs[k]

    axis = np.array([0.0, 0.0, 1.0])
    states = best_signs[:, None] * axis
    signed_cols = best_signs @ w
    genuine_wins = np.abs(signed_cols) >= col_abs
    col_sums = w.sum(axis=0)
    directions = np.where(
        genuine_wins[:, None],
        np.where(signed_cols >= 0, 1.0, -1.0)[:, None] * axis,
        axis,
    )
    biases = np.where(genuine_wins, 0.0, np.where(col_sums >= 0, 1.0, -1.0))
    argmax = PMScenario(states=states, directions=directions, biases=biases)
    return BoundResult(
        value=best_value,
        model=CLASSICAL,
        argmax=argmax,
        starts_used=total,
        converged_fraction=1.0,
    )


def _random_unit_starts(
    rng: np.random.Generator, n_starts: int, n_meas: int, in_plane: bool
) -> np.ndarray:
    v = rng.normal(size=(n_starts, n_meas, 3))
    if in_plane:
        v[:, :, 1] = 0.0
    norms = np.linalg.norm(v, axis=2, keepdims=True)
    np.copyto(norms, 1.0, where=norms < 1e-12)
    v /= norms
    return v


def _seesaw_all_starts(
    w: np.ndarray, model: str, starts: int, seed: int,
    allow_degenerate: bool = True,
):
    """Run the see-saw from random starts.

    Returns (values, states, directions, degenerate) where
    ``degenerate[s, y]`` marks columns served by a fixed-outcome
    measurement at the converged configuration of start ``s``.
    """
    rng = np.random.default_rng(seed)
    v0 = _random_unit_starts(rng, starts, w.shape[1], in_plane=(model == REAL_QUBIT))
    values, states, directions, degenerate, _, monotone = _backend.seesaw_batch(
        w, v0, MAX_SWEEPS, SWEEP_TOL, allow_degenerate
    )
    if not monotone.all():
        raise RuntimeError("see-saw sweep decreased the witness value")
    return values, states, directions, degenerate


def quantum_bound(witness, model: str = COMPLEX_QUBIT, starts: int | None = None,
                  seed: int = 0, allow_degenerate: bool = True) -> BoundResult:
    """Multi-start see-saw maximum over qubit (or coplanar-qubit) strategies.

    Starts are isotropically random unit directions (``complex_qubit``) or
    random directions in the xz-plane (``real_qubit``); the alternation
    stops when a sweep gains less than 1e-12 or after 500 sweeps, with each
    column taking the better of its genuine and fixed-outcome options.  The
    best start wins (ties broken toward the lowest start index) and is
    polished to machine precision of its local optimum; the exact classical
    maximum enters as one extra candidate (a classical strategy is a valid
    scenario in either quantum model), which hard-wires the model ordering.

    ``allow_degenerate=False`` restricts every column to a genuine
    projective measurement, i.e. maximizes the dot-product form of the
    witness only.
    """
    model = canonical_model(model)
    if model == CLASSICAL:
        return classical_bound(witness)
    if starts is None:
        starts = _DEFAULT_STARTS[model]
    if starts < 1:
        raise ValueError("starts must be at least 1")
    w = _coeffs(witness)
    final, states, directions, degenerate = _seesaw_all_starts(
        w, model, starts, seed, allow_degenerate
    )
    best = int(np.argmax(final))
    converged_fraction = float(np.mean(final >= final[best] - 1e-9))

    value = float(final[best])
    best_states_arr, best_dirs, best_deg = (
        states[best], directions[best], degenerate[best],
    )
    p_value, p_states, p_dirs, p_deg = _polish_start(
        w, directions[best], degenerate[best],
        in_plane=(model == REAL_QUBIT), allow_degenerate=allow_degenerate,
    )
    if p_value > value:
        value, best_states_arr, best_dirs, best_deg = (
            p_value, p_states, p_dirs, p_deg,
        )
    col_sums = w.sum(axis=0)
    biases = np.where(best_deg, np.where(col_sums >= 0, 1.0, -1.0), 0.0)
    argmax = PMScenario(states=best_states_arr, directions=best_dirs, biases=biases)

    if allow_degenerate and w.shape[0] + 2 * w.shape[1] <= ENUMERATION_LIMIT:
        classical = classical_bound(w)
        if classical.value > value:
            value, argmax = classical.value, classical.argmax
    return BoundResult(
        value=value,
        model=model,
        argmax=argmax,
        starts_used=int(starts),
        converged_fraction=converged_fraction,
        seed=seed,
    )


def umbrella_classical_value(c: float) -> float:
    """Closed-form classical maximum of the umbrella witness."""
    if not 0.0 <= c <= 3.0:
        raise OutOfRange(f"family parameter must lie in [0, 3], got {c}")
    if c <= 1.0:
        return (c + 5.0) / np.sqrt(3.0 * (3.0 + c * c))
    return (c + 1.0) * np.sqrt(3.0 / (3.0 + c * c))


def real_family(c: float, branch: str | None = None) -> RealFamilyConfig:
    """Coplanar four-state family conjectured to reach the real-qubit bound.

    Two analytic branches exist, for ``c <= 1`` ("low": the apex state
    coincides with the fourth) and ``c >= 1`` ("high": the last two states
    coincide); at ``c = 1`` they agree up to relabeling the inputs.
    """
    if not 0.0 <= c <= 3.0:
        raise OutOfRange(f"family parameter must lie in [0, 3], got {c}")
    if branch is None:
        branch = "low" if c <= 1.0 else "high"
    if branch == "low":
        if c > 1.0:
            raise OutOfRange(f"low branch is defined for c <= 1, got {c}")
        quad = c * c - 2.0 * c
        f = (quad + 25.0) / (15.0 - quad) + 4.0 * np.sqrt(5.0) * np.sqrt(
            quad + 5.0
        ) / abs(quad - 15.0)
        alpha = 2.0 * np.arctan(np.sqrt(f))
        states = np.array(
            [
                [1.0, 0.0, 0.0],
                [np.cos(alpha), 0.0, np.sin(alpha)],
                [np.cos(alpha), 0.0, -np.sin(alpha)],
                [1.0, 0.0, 0.0],
            ]
        )
        return RealFamilyConfig(c=c, branch=branch, angles={"alpha": alpha}, states=states)
    if branch != "high":
        raise ValueError(f"branch must be 'low' or 'high', got {branch!r}")
    if c < 1.0:
        raise OutOfRange(f"high branch is defined for c >= 1, got {c}")
    root = np.sqrt(max(-9.0 + 82.0 * c * c - 9.0 * c**4, 0.0))
    beta = 0.5 * np.pi + np.arctan2(7.0 * c * c - 3.0, root)
    gamma = 0.5 * np.pi - np.arctan2(3.0 * c * c - 7.0, root)
    states = np.array(
        [
            [np.cos(beta), 0.0, np.sin(beta)],
            [np.cos(gamma), 0.0, -np.sin(gamma)],
            [1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
        ]
    )
    return RealFamilyConfig(
        c=c, branch=branch, angles={"beta": beta, "gamma": gamma}, states=states
    )


def real_family_value(c: float, branch: str | None = None) -> float:
    """Umbrella witness value of the analytic coplanar family.

    Uses the best-response measurement for every column, i.e. the sum of
    the norms of the weighted state combinations.  Equals 2 at the
    endpoints c = 0 and c = 3 and stays below 2 strictly inside.
    """
    from .builder import umbrella

    witness, _, _ = umbrella(c)
    config = real_family(c, branch)
    return float(np.linalg.norm(witness.w.T @ config.states, axis=1).sum())


def _pairs(n: int):
    return ((a, b) for a in range(n) for b in range(a + 1, n))


def _polish_gram_newton(w: np.ndarray, v_init: np.ndarray):
    """Sharpen one converged start by Newton steps on the Gram entries.

    For at most three measurements the genuine-measurement value depends on
    the directions only through their Gram matrix: it is a concave sum of
    square roots of linear functions of the off-diagonal entries, so Newton
    converges quadratically where the see-saw (a linear fixed-point
    iteration) crawls along flat directions.  Returns the polished
    (value, states, directions).
    """
    n_meas = w.shape[1]
    pairs = list(_pairs(n_meas))
    row_sq = np.einsum("xy,xy->x", w, w)
    if pairs:
        t = np.column_stack([w[:, a] * w[:, b] for a, b in pairs])
    else:
        t = np.zeros((w.shape[0], 0))
    gram = v_init @ v_init.T
    gamma = np.array([gram[a, b] for a, b in pairs])

    def norms_sq(g):
        return row_sq + 2.0 * (t @ g)

    def value(g):
        return float(np.sqrt(np.clip(norms_sq(g), 0.0, None)).sum())

    current = value(gamma)
    for _ in range(60 if pairs else 0):
        q = norms_sq(gamma)
        active = q > 1e-20
        u = np.sqrt(q[active])
        t_act = t[active]
        grad = t_act.T @ (1.0 / u)
        if np.max(np.abs(grad)) < 1e-13:
            break
        hess = -(t_act / (u**3)[:, None]).T @ t_act
        try:
            step = np.linalg.solve(hess, -grad)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(hess, -grad, rcond=None)[0]
        scale = 1.0
        while scale > 1e-12:
            candidate = gamma + scale * step
            if np.all(norms_sq(candidate) > -1e-18) and value(candidate) >= current:
                break
            scale *= 0.5
        else:
            break
        gamma = gamma + scale * step
        new = value(gamma)
        if new - current < 1e-15:
            current = new
            break
        current = new

    gram = np.eye(n_meas)
    for (a, b), g in zip(pairs, gamma):
        gram[a, b] = gram[b, a] = g
    evals, evecs = np.linalg.eigh(gram)
    evals = np.clip(evals, 0.0, None)
    factors = evecs * np.sqrt(evals)
    directions = np.zeros((n_meas, 3))
    directions[:, : min(3, n_meas)] = factors[:, ::-1][:, :3]
    norms = np.linalg.norm(directions, axis=1, keepdims=True)
    np.copyto(norms, 1.0, where=norms < 1e-12)
    directions /= norms
    states, _, polished_value = best_states(w, directions)
    return polished_value, states, directions


def _polish_start(
    w: np.ndarray, v_init: np.ndarray, deg_init: np.ndarray,
    in_plane: bool = False, allow_degenerate: bool = True,
):
    """Drive one converged start to machine precision of its local optimum.

    Newton on the Gram entries of the genuine columns when at most three of
    them remain in the unrestricted model; extended see-saw sweeps
    otherwise (the coplanar model must not leave the plane, which Gram
    steps could).  Returns (value, states, directions, degenerate) with the
    per-column fixed-outcome choice applied.
    """
    n_meas = w.shape[1]
    col_degenerate = (
        np.abs(w.sum(axis=0)) if allow_degenerate else np.zeros(n_meas)
    )
    deg = np.array(deg_init, dtype=bool)
    if in_plane or int((~deg).sum()) > 3:
        values, states_b, dirs_b, deg_b, _, _ = _backend.seesaw_batch(
            w, v_init[None, :, :], 8000, 1e-16, allow_degenerate
        )
        return float(values[0]), states_b[0], dirs_b[0], deg_b[0]

    directions = np.array(v_init, dtype=float)
    states = None
    value = -np.inf
    for _ in range(3):
        genuine = ~deg
        if not genuine.any():
            states = np.tile(np.array([0.0, 0.0, 1.0]), (w.shape[0], 1))
            value = float(col_degenerate.sum())
            break
        _, states, sub_dirs = _polish_gram_newton(w[:, genuine], directions[genuine])
        directions[genuine] = sub_dirs
        payoff = np.linalg.norm(w.T @ states, axis=1)
        new_deg = col_degenerate > payoff
        value = float(np.maximum(payoff, col_degenerate).sum())
        if np.array_equal(new_deg, deg):
            break
        deg = new_deg
    return value, states, directions, deg


def verify_selftest(
    witness,
    target: PMScenario,
    trials: int = 64,
    seed: int = 0,
    gram_tol: float = 1e-5,
    value_tol: float = 1e-7,
    allow_degenerate: bool = True,
) -> SelfTestReport:
    """Numerically check that the witness maximum pins down the target.

    Reruns the complex-qubit see-saw from ``trials`` random starts and
    polishes every near-optimal start to machine precision (Newton on the
    Gram entries for up to three measurements, extended sweeps otherwise).
    Every start reaching the bound within ``value_tol`` must reproduce the
    joint Gram matrix of the target's states and directions within
    ``gram_tol``.  Raises ``TargetSuboptimal`` when the target value lies
    below the optimized bound.

    With ``allow_degenerate=False`` the optimization is restricted to
    genuine projective measurements, which checks optimality and
    uniqueness of the dot-product form of the witness even when the full
    witness would favor a fixed-outcome strategy somewhere.
    """
    w = _coeffs(witness)
    target_value = eval_witness(w, target)
    final, states, directions, degenerate = _seesaw_all_starts(
        w, COMPLEX_QUBIT, trials, seed, allow_degenerate
    )

    # Polish everything close enough to matter for the bound or the
    # uniqueness comparison; 4 orders looser than value_tol is generous.
    candidates = np.flatnonzero(final >= final.max() - max(1e-3, value_tol))
    for s in candidates:
        final[s], states[s], directions[s], degenerate[s] = _polish_start(
            w, directions[s], degenerate[s], allow_degenerate=allow_degenerate
        )

    seesaw_best = float(final.max())
    if target_value < seesaw_best - value_tol:
        raise TargetSuboptimal(
            f"target value {target_value} is below the optimized bound {seesaw_best}"
        )
    bound = max(seesaw_best, target_value)
    gram_target = joint_gram(target.states, target.directions)

    n_optimal = 0
    worst = 0.0
    for s in np.flatnonzero(final >= bound - value_tol):
        n_optimal += 1
        if degenerate[s].any():
            worst = np.inf
            continue
        deviation = float(
            np.max(np.abs(joint_gram(states[s], directions[s]) - gram_target))
        )
        worst = max(worst, deviation)
    passed = n_optimal > 0 and worst < gram_tol
    return SelfTestReport(
        passed=passed,
        bound=bound,
        target_value=float(target_value),
        n_optimal=n_optimal,
        trials=int(trials),
        worst_deviation=worst,
        gram_tol=gram_tol,
        value_tol=value_tol,
    )


def real_scan_bound(
    witness, resolution: float = 1e-3, seed: int = 0, polish_starts: int = 8
) -> float:
    """Heuristic dense-grid cross-check of the coplanar maximum.

    Scans all four-state configurations in which some pair of states
    coincides, on an angle grid of the given resolution, then polishes the
    best grid point (plus a few random coplanar starts) with the see-saw.
    Complements ``quantum_bound(..., "real_qubit")``; this is a search
    heuristic, not a certified upper bound.
    """
    w = _coeffs(witness)
    if w.shape[0] != 4:
        raise ValueError("the coincidence scan expects exactly four states")
    n_steps = max(8, int(np.ceil(2.0 * np.pi / resolution)))
    grid_value, pair_idx, i1, i2 = _backend.real_grid_scan(w, n_steps)

    step = 2.0 * np.pi / n_steps
    pinned = STATE_PAIRS[pair_idx]
    rest = [x for x in range(4) if x not in pinned]
    angles = np.zeros(4)
    angles[rest[0]] = i1 * step
    angles[rest[1]] = i2 * step
    states = np.column_stack(
        [np.cos(angles), np.zeros(4), np.sin(angles)]
    )

    directions, _ = best_measurements(w, states)
    rng = np.random.default_rng(seed)
    v0 = np.concatenate(
        [
            directions[None, :, :],
            _random_unit_starts(rng, polish_starts, w.shape[1], in_plane=True),
        ]
    )
    values, _, _, _, _, monotone = _backend.seesaw_batch(w, v0, 8000, 1e-16)
    if not monotone.all():
        raise RuntimeError("see-saw sweep decreased the witness value")
    return max(float(grid_value), float(values.max()))
