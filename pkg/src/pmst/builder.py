"""Witness-matrix constructions and their ideal optimal configurations.

Three constructions are provided, each returning the coefficient matrix
together with its construction parameters and the measurement directions
that (with the given states) attain the documented maximum:

* ``build_4x3``: four states, three measurements, rank-one-plus-signs
  coefficient structure; maximum 2.
* ``build_general``: any number of states, one measurement per spanned
  dimension, coefficients from the eigenbasis of the weighted second
  moment of the states; maximum ``sum(r)``.
* ``build_4x6``: one measurement per pair of states, repulsion-equilibrium
  coefficients; maximum ``sum F_ij |m_i - m_j|``.

``umbrella`` instantiates the one-parameter 4x3 family used for
certification experiments.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .core import (
    Povm,
    null_combinations,
    povm_from_bloch,
    rank_of_span,
    unit_rows,
)
from .errors import (
    CoincidentVectors,
    CoplanarStates,
    DegenerateAdvantage,
    IllegitimateGram,
    NonExtremal,
    NoValidWeights,
    OutOfRange,
    RankConditionWarning,
    RankDeficient,
    ZeroSum,
)
from .witness import WitnessMatrix, best_measurements, degenerate_check

# Sign pattern of the 4x3 construction: row x, column y carries
# SIGN_PATTERN_4X3[x, y] * p[x] * q[y].
SIGN_PATTERN_4X3 = np.array(
    [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float
)

_COLUMN_PAIRS_3 = ((0, 1), (0, 2), (1, 2))


@dataclass(frozen=True)
class FourByThreeParams:
    """Parameters (p, q) of the 4x3 construction; both are unit vectors
    and every q entry is positive."""

    p: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        q = np.array(self.q, dtype=float)
        if p.shape != (4,) or q.shape != (3,):
            raise ValueError("expected 4 state and 3 measurement coefficients")
        if abs(p @ p - 1.0) > 1e-12 or abs(q @ q - 1.0) > 1e-12:
            raise ValueError("coefficient vectors must be normalized")
        if np.any(q <= 0.0):
            raise ValueError(f"q entries must be positive, got {q}")
        p.setflags(write=False)
        q.setflags(write=False)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)


@dataclass(frozen=True)
class GeneralParams:
    """Parameters of the general construction: positive row scales ``r``
    and the unit-norm state coordinates ``mu`` in the measurement frame."""

    r: np.ndarray
    mu: np.ndarray

    def __post_init__(self):
        r = np.array(self.r, dtype=float)
        mu = np.array(self.mu, dtype=float)
        if mu.ndim != 2 or mu.shape[0] != r.shape[0]:
            raise ValueError("r and mu must have matching row counts")
        if np.any(r <= 0.0):
            raise ValueError(f"row scales must be positive, got {r}")
        row_norms = np.einsum("xy,xy->x", mu, mu)
        if np.any(np.abs(row_norms - 1.0) > 1e-12):
            raise ValueError(f"mu rows must have unit norm, got {row_norms}")
        n_meas = mu.shape[1]
        for y1 in range(n_meas):
            for y2 in range(y1 + 1, n_meas):
                cross = float(np.sum(r * mu[:, y1] * mu[:, y2]))
                if abs(cross) > 1e-10:
                    raise ValueError(
                        f"weighted cross terms must vanish, got {cross} "
                        f"for columns ({y1}, {y2})"
                    )
        r.setflags(write=False)
        mu.setflags(write=False)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "mu", mu)


@dataclass(frozen=True)
class PairwiseParams:
    """Pair strengths F (symmetric, nonnegative, zero diagonal) and the
    equilibrium multipliers tau of the pairwise construction."""

    F: np.ndarray
    tau: np.ndarray

    def __post_init__(self):
        f = np.array(self.F, dtype=float)
        tau = np.array(self.tau, dtype=float)
        n = f.shape[0]
        if f.shape != (n, n) or tau.shape != (n,):
            raise ValueError("F must be square with one tau entry per state")
        if not np.allclose(f, f.T, atol=1e-12):
            raise ValueError("F must be symmetric")
        if np.any(f < 0.0) or np.any(np.abs(np.diag(f)) > 0.0):
            raise ValueError("F must be nonnegative with zero diagonal")
        f.setflags(write=False)
        tau.setflags(write=False)
        object.__setattr__(self, "F", f)
        object.__setattr__(self, "tau", tau)


def _fix_sign(vector: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Flip the sign so the first component above tolerance is positive."""
    for component in vector:
        if abs(component) > tol:
            return vector if component > 0 else -vector
    return vector


def _canonical_eigh(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition with deterministic output.

    Eigenvalues come in descending order.  Within clusters of (numerically)
    equal eigenvalues the basis is rebuilt by Gram-Schmidt on the projected
    standard basis vectors, so it depends only on the eigenspace; every
    eigenvector's sign makes its first significant component positive.
    """
    evals, evecs = np.linalg.eigh(matrix)
    order = np.argsort(evals)[::-1]
    evals, evecs = evals[order], evecs[:, order]
    scale = max(abs(evals[0]), 1.0) if evals.size else 1.0

    start = 0
    for end in range(1, evals.size + 1):
        if end < evals.size and abs(evals[end] - evals[start]) <= 1e-12 * scale:
            continue
        if end - start > 1:
            projector = evecs[:, start:end] @ evecs[:, start:end].T
            basis: list[np.ndarray] = []
            for seed in np.eye(matrix.shape[0]):
                candidate = projector @ seed
                for chosen in basis:
                    candidate = candidate - (chosen @ candidate) * chosen
                norm = np.linalg.norm(candidate)
                if norm > 1e-9:
                    basis.append(candidate / norm)
                if len(basis) == end - start:
                    break
            evecs[:, start:end] = np.column_stack(basis)
        start = end

    for col in range(evecs.shape[1]):
        evecs[:, col] = _fix_sign(evecs[:, col])
    return evals, evecs


def state_moment_matrix(states, r) -> np.ndarray:
    """Weighted second moment sum_x r_x m_x (outer) m_x of the states."""
    m = np.asarray(states, dtype=float)
    weights = np.asarray(r, dtype=float)
    return (m.T * weights) @ m


def _target_povm(states) -> Povm | None:
    """POVM anti-aligned with the states, when one exists."""
    try:
        return povm_from_bloch(-np.asarray(states, dtype=float))
    except (NoValidWeights, NonExtremal, ValueError):
        return None


def _reject_degenerate_advantage(w: np.ndarray, states: np.ndarray) -> None:
    for check in degenerate_check(w, states):
        if check.margin < -1e-12:
            raise DegenerateAdvantage(
                f"fixed-outcome measurement beats column {check.column} "
                f"by {-check.margin}; double the rows and states"
            )


def build_4x3(states, p=None, *, k: float = 1.0, check_degenerate: bool = True):
    """4x3 witness self-testing four states (three binary measurements).

    Parameters
    ----------
    states : (4, 3) array of unit Bloch vectors.
    p : optional (4,) array
        Coefficients with ``sum_x p_x m_x = 0``.  Computed from the null
        combination when omitted, which requires the states to span three
        dimensions; for coplanar states pass any valid choice explicitly.
    k : penalty weight attached when the states define a POVM target.
    check_degenerate : bool
        Verify no fixed-outcome measurement beats a genuine one at the
        target; disable to build a matrix destined for ``double_rows``.

    Returns
    -------
    (WitnessMatrix, FourByThreeParams, directions)
        ``directions`` are the measurement Bloch vectors attaining the
        maximum value 2 together with ``states``.
    """
    m = unit_rows(states, "states")
    if m.shape[0] != 4:
        raise ValueError(f"expected 4 states, got {m.shape[0]}")
    if p is None:
        null = null_combinations(m)
        if null.shape[0] != 1:
            raise CoplanarStates(
                "states span less than 3 dimensions; supply the coefficients "
                "p explicitly"
            )
        p_vec = null[0]
    else:
        p_vec = np.asarray(p, dtype=float)
        if p_vec.shape != (4,):
            raise ValueError("p must have one entry per state")
        if np.linalg.norm(p_vec @ m) > 1e-9 * np.linalg.norm(p_vec):
            raise ValueError("p is not a null combination of the states")
        p_vec = p_vec / np.linalg.norm(p_vec)
    if p_vec.sum() < 0.0:
        p_vec = -p_vec
    elif p_vec.sum() == 0.0:
        p_vec = _fix_sign(p_vec)

    q_vec = np.array(
        [np.linalg.norm(p_vec[0] * m[0] + p_vec[y + 1] * m[y + 1]) for y in range(3)]
    )
    if abs(q_vec @ q_vec - 1.0) > 1e-9:
        raise IllegitimateGram(
            f"column coefficients fail normalization (sum of squares "
            f"{q_vec @ q_vec})"
        )
    if np.any(q_vec <= 1e-12):
        raise IllegitimateGram("a column coefficient vanishes; construction breaks down")

    params = FourByThreeParams(p=p_vec, q=q_vec)
    w = SIGN_PATTERN_4X3 * np.outer(p_vec, q_vec)

    gram = optimal_gram_4x3(params)
    if np.linalg.eigvalsh(gram)[0] < -1e-9:
        raise IllegitimateGram(
            "the optimality conditions give a non-positive-semidefinite Gram matrix"
        )

    directions, determined = best_measurements(w, m)
    if not determined.all():
        raise IllegitimateGram("a measurement direction is undetermined")
    if check_degenerate:
        _reject_degenerate_advantage(w, m)

    target = _target_povm(m)
    witness = WitnessMatrix(w, k=k if target is not None else None, target_povm=target)
    return witness, params, directions


def optimal_gram_4x3(params: FourByThreeParams) -> np.ndarray:
    """Measurement Gram matrix at the optimum of the 4x3 construction."""
    p, q = params.p, params.q
    p2 = p * p
    gram = np.eye(3)
    gram[0, 1] = gram[1, 0] = (p2[0] + p2[3] - 0.5) / (q[0] * q[1])
    gram[0, 2] = gram[2, 0] = (p2[0] + p2[2] - 0.5) / (q[0] * q[2])
    gram[1, 2] = gram[2, 1] = (p2[0] + p2[1] - 0.5) / (q[1] * q[2])
    return gram


def stationarity_residual(params: FourByThreeParams, gram) -> float:
    """Largest stationarity violation of the 4x3 value at a Gram matrix.

    Evaluates the response norms from the Gram matrix alone and returns the
    maximum absolute derivative of the conditional maximum with respect to
    the off-diagonal Gram entries (up to the positive factor q_y q_y').
    Vanishes (within 1e-10) exactly at ``optimal_gram_4x3``.
    """
    p, q = params.p, params.q
    g = np.asarray(gram, dtype=float)
    signs = SIGN_PATTERN_4X3
    cross = np.zeros(4)
    for y1, y2 in _COLUMN_PAIRS_3:
        cross += 2.0 * signs[:, y1] * signs[:, y2] * q[y1] * q[y2] * g[y1, y2]
    u = np.abs(p) * np.sqrt(np.clip(1.0 + cross, 0.0, None))
    if np.any(u <= 1e-15):
        return np.inf
    ratio = p * p / u
    residual = 0.0
    for y1, y2 in _COLUMN_PAIRS_3:
        residual = max(residual, abs(float(np.sum(signs[:, y1] * signs[:, y2] * ratio))))
    return residual


def double_rows(witness, states) -> tuple[WitnessMatrix, np.ndarray]:
    """Append sign-flipped rows and antipodal states.

    The output has exactly zero column sums, so no fixed-outcome
    measurement can ever contribute; the penalty extension is dropped
    because outcome labels no longer index the doubled state list.
    """
    w = witness.w if isinstance(witness, WitnessMatrix) else np.asarray(witness, float)
    m = np.asarray(states, dtype=float)
    if m.shape[0] != w.shape[0]:
        raise ValueError("states and witness rows must match")
    return WitnessMatrix(np.vstack([w, -w])), np.vstack([m, -m])


def build_general(states, r, *, k: float = 1.0, check_degenerate: bool = True):
    """Witness for any states, one measurement per spanned dimension.

    The measurement directions are the eigenvectors of the weighted second
    moment ``sum_x r_x m_x (outer) m_x`` restricted to the span of the
    states; the coefficients are ``w[x, y] = r_x * (m_x . v_y)``.  The
    maximum value is ``sum(r)``, attained at the input states.

    Raises
    ------
    RankDeficient
        If the second-order uniqueness condition fails; choose different
        row scales or add a state.
    DegenerateAdvantage
        If a fixed-outcome measurement beats a genuine one at the target
        (cannot happen when ``sum_x r_x m_x = 0``).
    """
    m = unit_rows(states, "states")
    r_vec = np.asarray(r, dtype=float)
    if r_vec.shape != (m.shape[0],):
        raise ValueError("r must have one entry per state")
    if np.any(r_vec <= 0.0):
        raise ValueError(f"row scales must be positive, got {r_vec}")

    n_meas = rank_of_span(m)
    n_pairs = n_meas * (n_meas - 1) // 2
    if m.shape[0] < n_pairs + 1:
        warnings.warn(
            f"{m.shape[0]} states cannot satisfy the uniqueness rank "
            f"condition ({n_pairs + 1} needed for {n_meas} measurements)",
            RankConditionWarning,
            stacklevel=2,
        )

    moment = state_moment_matrix(m, r_vec)
    evals, evecs = _canonical_eigh(moment)
    directions = evecs[:, :n_meas].T
    mu = m @ directions.T
    w = r_vec[:, None] * mu

    params = GeneralParams(r=r_vec, mu=mu)

    if n_pairs > 0:
        t = np.column_stack(
            [r_vec**2 * mu[:, y1] * mu[:, y2] for y1, y2 in _pairs(n_meas)]
        )
        s = np.linalg.svd(t, compute_uv=False)
        rank_t = int(np.sum(s >= 1e-8 * s[0])) if s[0] > 0 else 0
        if rank_t < n_pairs:
            raise RankDeficient(
                f"second-order check has rank {rank_t} < {n_pairs}; choose "
                "different row scales or add a state"
            )
    if check_degenerate:
        _reject_degenerate_advantage(w, m)

    target = _target_povm(m) if m.shape[0] in (3, 4) else None
    witness = WitnessMatrix(w, k=k if target is not None else None, target_povm=target)
    return witness, params, directions


def _pairs(n: int):
    return ((y1, y2) for y1 in range(n) for y2 in range(y1 + 1, n))


def augment_state(states, r_prime) -> np.ndarray:
    """Auxiliary state completing an all-positive null combination.

    Returns ``-sum_x r'_x m_x`` normalized; appending it lets the zero
    vector be combined from the set with positive coefficients.
    """
    m = unit_rows(states, "states")
    r_vec = np.asarray(r_prime, dtype=float)
    if np.any(r_vec <= 0.0):
        raise ValueError("r' entries must be positive")
    total = -(r_vec @ m)
    norm = np.linalg.norm(total)
    if norm <= 1e-12:
        raise ZeroSum("the weighted state sum already vanishes")
    return total / norm


def _pairwise_witness(weights: np.ndarray, m: np.ndarray):
    """Raw pairwise construction on states ``m`` with weights summing the
    states to zero.  Pairs of coincident states get strength zero and their
    column is dropped with a ``CoincidentVectors`` warning."""
    n = m.shape[0]
    dist = np.linalg.norm(m[:, None, :] - m[None, :, :], axis=2)
    f = np.zeros((n, n))
    columns = []
    directions = []
    pair_columns = []
    for i, j in _pairs(n):
        if dist[i, j] <= 1e-12:
            warnings.warn(
                f"states {i} and {j} coincide; dropping their pair column",
                CoincidentVectors,
                stacklevel=3,
            )
            continue
        f[i, j] = f[j, i] = weights[i] * weights[j] * dist[i, j]
        column = np.zeros(n)
        column[i] = f[i, j]
        column[j] = -f[i, j]
        columns.append(column)
        directions.append((m[i] - m[j]) / dist[i, j])
        pair_columns.append((i, j))
    w = np.column_stack(columns)
    directions = np.array(directions)

    # Equilibrium of the pair repulsions: the net force on every state
    # points along the state itself.
    tau = np.zeros(n)
    worst = 0.0
    for i in range(n):
        force = np.zeros(3)
        for j in range(n):
            if j == i or dist[i, j] <= 1e-12:
                continue
            force += f[i, j] * (m[i] - m[j]) / dist[i, j]
            tau[i] += f[i, j] * (1.0 - m[i] @ m[j]) / dist[i, j]
        worst = max(worst, float(np.linalg.norm(force - tau[i] * m[i])))
    if worst > 1e-9:
        raise NonExtremal(f"equilibrium residual {worst} exceeds 1e-9")
    return w, PairwiseParams(F=f, tau=tau), directions, pair_columns


def build_4x6(povm: Povm, *, k: float = 1.0):
    """Pairwise witness self-testing an extremal POVM, one measurement
    per pair of states.

    States are the anti-aligned POVM vectors; column (i, j) carries
    ``F_ij = w_i w_j |n_i - n_j|`` on rows i (positive) and j (negative),
    with the optimal direction along ``m_i - m_j``.  Pair columns are
    ordered lexicographically.
    """
    w, params, directions, pair_columns = _pairwise_witness(
        povm.weights, -povm.vectors
    )
    witness = WitnessMatrix(w, k=k, target_povm=povm)
    return witness, params, directions, pair_columns


def equilibrium_residual(params: PairwiseParams, states) -> float:
    """Largest net tangential force on any state for given pair strengths."""
    m = np.asarray(states, dtype=float)
    f = params.F
    n = m.shape[0]
    worst = 0.0
    for i in range(n):
        force = np.zeros(3)
        tau = 0.0
        for j in range(n):
            if j == i:
                continue
            d = m[i] - m[j]
            dn = np.linalg.norm(d)
            if dn <= 1e-12 or f[i, j] == 0.0:
                continue
            force += f[i, j] * d / dn
            tau += f[i, j] * (1.0 - m[i] @ m[j]) / dn
        worst = max(worst, float(np.linalg.norm(force - tau * m[i])))
    return worst


def build_4x6_from_states(states, *, allow_sign_flip: bool = False, k: float = 1.0):
    """Pairwise witness for unit states that need not define a POVM.

    When the unique null combination of the states has mixed signs, the
    rows of the matrix built for the sign-corrected set are flipped back
    (``allow_sign_flip=True`` required); the returned ``signs`` record the
    flips.  All-positive combinations reduce to ``build_4x6``.
    """
    m = unit_rows(states, "states")
    null = null_combinations(m)
    if null.shape[0] != 1:
        raise NonExtremal(
            f"null space has dimension {null.shape[0]}, need exactly 1"
        )
    coeffs = _fix_sign(null[0], tol=1e-12)
    if np.any(np.abs(coeffs) <= 1e-12):
        raise NoValidWeights("a null-combination coefficient vanishes")
    signs = np.sign(coeffs)
    if np.all(signs > 0):
        witness, params, directions, pair_columns = build_4x6(
            Povm(weights=coeffs / coeffs.sum(), vectors=-m), k=k
        )
        return witness, params, directions, pair_columns, signs
    if not allow_sign_flip:
        raise NoValidWeights(
            "the null combination has mixed signs; pass allow_sign_flip=True"
        )
    flipped = signs[:, None] * m
    povm = Povm(weights=np.abs(coeffs) / np.abs(coeffs).sum(), vectors=-flipped)
    base, params, directions, pair_columns = build_4x6(povm, k=k)
    witness = WitnessMatrix(signs[:, None] * base.w)
    return witness, params, directions, pair_columns, signs


def umbrella(c: float, *, k: float = 1.0):
    """One-parameter 4x3 family: one apex state against three symmetric ones.

    Returns ``(WitnessMatrix, states, directions)``; the witness evaluates
    to 2 at the returned configuration for every ``c`` in [0, 3].
    """
    if not 0.0 <= c <= 3.0:
        raise OutOfRange(f"family parameter must lie in [0, 3], got {c}")
    scale = 1.0 / np.sqrt(9.0 + 3.0 * c * c)
    w = scale * np.array(
        [
            [c, c, c],
            [1.0, -1.0, -1.0],
            [-1.0, 1.0, -1.0],
            [-1.0, -1.0, 1.0],
        ]
    )
    rim = np.sqrt(max(9.0 - c * c, 0.0))
    states = np.array(
        [
            [0.0, 0.0, -1.0],
            [-rim / 3.0, 0.0, c / 3.0],
            [rim / 6.0, rim / (2.0 * np.sqrt(3.0)), c / 3.0],
            [rim / 6.0, -rim / (2.0 * np.sqrt(3.0)), c / 3.0],
        ]
    )
    norm = 0.5 * scale
    directions = norm * np.array(
        [
            [-2.0 * rim, 0.0, -4.0 * c],
            [rim, np.sqrt(3.0) * rim, -4.0 * c],
            [rim, -np.sqrt(3.0) * rim, -4.0 * c],
        ]
    )
    target = _target_povm(states)
    witness = WitnessMatrix(w, k=k if target is not None else None, target_povm=target)
    return witness, states, directions


def umbrella_params(c: float) -> FourByThreeParams:
    """The (p, q) parameters of the umbrella witness."""
    if not 0.0 <= c <= 3.0:
        raise OutOfRange(f"family parameter must lie in [0, 3], got {c}")
    denom = np.sqrt(3.0 + c * c)
    p = np.array([c, 1.0, 1.0, 1.0]) / denom
    q = np.full(3, 1.0 / np.sqrt(3.0))
    return FourByThreeParams(p=p, q=q)


@dataclass(frozen=True)
class WitnessBundle:
    """A constructed witness together with its ideal configuration.

    ``params`` holds JSON-ready construction-specific data, always
    including ``max_value`` (the witness value at the ideal configuration)
    and ``povm_weights`` (the target POVM weights, or None).
    """

    construction: str
    witness: WitnessMatrix
    states: np.ndarray
    directions: np.ndarray
    params: dict

    def __post_init__(self):
        if self.construction not in ("4x3", "general", "4x6", "umbrella"):
            raise ValueError(f"unknown construction {self.construction!r}")

    @property
    def max_value(self) -> float:
        return float(self.params["max_value"])


def _bundle(construction, witness, states, directions, params) -> WitnessBundle:
    from .witness import PMScenario, eval_witness

    params = dict(params)
    params["max_value"] = eval_witness(
        witness, PMScenario(states=states, directions=directions)
    )
    target = witness.target_povm
    params["povm_weights"] = None if target is None else target.weights.tolist()
    return WitnessBundle(
        construction=construction,
        witness=witness,
        states=np.asarray(states, dtype=float),
        directions=np.asarray(directions, dtype=float),
        params=params,
    )


def construct_bundle(
    method: str,
    states=None,
    *,
    r=None,
    p=None,
    c: float | None = None,
    k: float = 1.0,
    double: bool = False,
    allow_sign_flip: bool = False,
) -> WitnessBundle:
    """Build any construction into a serializable bundle.

    ``double`` applies only to the 4x3 construction and appends the
    sign-flipped rows and antipodal states.  For ``general`` without an
    explicit ``r``, the all-positive null combination of the states is
    used when it exists.
    """
    if method == "umbrella":
        if c is None:
            raise ValueError("the umbrella construction needs the parameter c")
        witness, m, directions = umbrella(c, k=k)
        pq = umbrella_params(c)
        return _bundle(
            "umbrella", witness, m, directions,
            {"c": float(c), "p": pq.p.tolist(), "q": pq.q.tolist()},
        )
    if states is None:
        raise ValueError(f"the {method} construction needs states")
    m = unit_rows(states, "states")

    if method == "4x3":
        witness, params, directions = build_4x3(
            m, p=p, k=k, check_degenerate=not double
        )
        payload = {"p": params.p.tolist(), "q": params.q.tolist(), "doubled": double}
        if double:
            witness, m = double_rows(witness, m)
        return _bundle("4x3", witness, m, directions, payload)

    if method == "general":
        if r is None:
            null = null_combinations(m)
            if null.shape[0] != 1:
                raise ValueError(
                    "states have no unique null combination; supply r explicitly"
                )
            r = _fix_sign(null[0], tol=1e-12)
            if np.any(r <= 0.0):
                raise ValueError(
                    "the null combination has mixed signs; supply r explicitly"
                )
        witness, params, directions = build_general(m, r, k=k)
        evals, _ = _canonical_eigh(state_moment_matrix(m, params.r))
        return _bundle(
            "general", witness, m, directions,
            {
                "r": params.r.tolist(),
                "mu": params.mu.tolist(),
                "eigenvalues": evals.tolist(),
            },
        )

    if method == "4x6":
        witness, params, directions, pair_columns, signs = build_4x6_from_states(
            m, allow_sign_flip=allow_sign_flip, k=k
        )
        return _bundle(
            "4x6", witness, m, directions,
            {
                "F": params.F.tolist(),
                "tau": params.tau.tolist(),
                "pairs": [[i + 1, j + 1] for i, j in pair_columns],
                "signs": signs.tolist(),
            },
        )

    raise ValueError(f"unknown construction {method!r}")


def bundle_to_dict(bundle: WitnessBundle) -> dict:
    """Serializable form: {construction, w, k, states, measurements, params}."""
    witness = bundle.witness
    return {
        "construction": bundle.construction,
        "w": witness.w.tolist(),
        "k": witness.k,
        "states": bundle.states.tolist(),
        "measurements": bundle.directions.tolist(),
        "params": bundle.params,
    }


def bundle_from_dict(data: dict) -> WitnessBundle:
    """Inverse of ``bundle_to_dict``; rebuilds the target POVM from the
    stored weights and the anti-aligned states."""
    states = np.asarray(data["states"], dtype=float)
    params = dict(data["params"])
    k = data.get("k")
    weights = params.get("povm_weights")
    target = None
    if k is not None and weights is not None:
        target = Povm(weights=np.asarray(weights, float), vectors=-states)
    witness = WitnessMatrix(
        np.asarray(data["w"], dtype=float), k=k, target_povm=target
    )
    return WitnessBundle(
        construction=data["construction"],
        witness=witness,
        states=states,
        directions=np.asarray(data["measurements"], dtype=float),
        params=params,
    )
