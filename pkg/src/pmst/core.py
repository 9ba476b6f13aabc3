"""Bloch-vector value types and Born-rule evaluation.

States, binary measurements and POVMs on a qubit are represented through
their Bloch vectors: plain ``(3,)`` float arrays for states and directions,
small frozen dataclasses where weights or biases belong to the object.
All probabilities come from the Born rule written directly in Bloch form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonExtremal, NotUnit, NoValidWeights

UNIT_TOL = 1e-9          # |norm - 1| tolerance for unit Bloch vectors
STATE_NORM_TOL = 1e-12   # excess over 1 tolerated for (possibly mixed) states
BARYCENTER_TOL = 1e-10   # tolerance on the weighted sum of POVM Bloch vectors
WEIGHT_SUM_TOL = 1e-10   # tolerance on the sum of POVM weights
RANK_RTOL = 1e-8         # singular values below RANK_RTOL * s_max count as zero

# Stand-in direction used whenever the optimum does not constrain a vector.
DEFAULT_DIRECTION = np.array([0.0, 0.0, 1.0])


def bloch_state(v) -> np.ndarray:
    """Validate a state Bloch vector (norm at most 1) and return a copy."""
    arr = np.array(v, dtype=float)
    if arr.shape != (3,):
        raise ValueError(f"Bloch vector must have shape (3,), got {arr.shape}")
    if np.linalg.norm(arr) > 1.0 + STATE_NORM_TOL:
        raise ValueError(f"state Bloch vector has norm {np.linalg.norm(arr)} > 1")
    return arr


def unit_bloch(v, name: str = "Bloch vector") -> np.ndarray:
    """Validate a unit Bloch vector and return a copy."""
    arr = np.array(v, dtype=float)
    if arr.shape != (3,):
        raise ValueError(f"{name} must have shape (3,), got {arr.shape}")
    norm = np.linalg.norm(arr)
    if abs(norm - 1.0) > UNIT_TOL:
        raise NotUnit(f"{name} has norm {norm}, expected 1")
    return arr


def unit_rows(vectors, name: str = "vectors") -> np.ndarray:
    """Validate an (n, 3) array of unit Bloch vectors."""
    arr = np.array(vectors, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ValueError(f"{name} must have shape (n, 3), got {arr.shape}")
    norms = np.linalg.norm(arr, axis=1)
    if np.any(np.abs(norms - 1.0) > UNIT_TOL):
        raise NotUnit(f"{name} contains a non-unit row (norms {norms})")
    return arr


def rank_of_span(vectors) -> int:
    """Dimension of the linear span of the given Bloch vectors."""
    arr = np.atleast_2d(np.asarray(vectors, dtype=float))
    s = np.linalg.svd(arr, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s >= RANK_RTOL * s[0]))


def null_combinations(vectors) -> np.ndarray:
    """Orthonormal basis of coefficient vectors c with sum_i c_i * vec_i = 0.

    Returns an array of shape (nullity, n); each row is one basis vector of
    the null space of the stacked (3, n) matrix.
    """
    arr = np.asarray(vectors, dtype=float)
    n = arr.shape[0]
    _, s, vt = np.linalg.svd(arr.T)
    tol = RANK_RTOL * (s[0] if s.size else 0.0)
    rank = int(np.sum(s >= tol))
    return vt[rank:n]


@dataclass(frozen=True)
class BinaryMeasurement:
    """Two-outcome qubit measurement: unit direction plus outcome bias.

    ``bias`` interpolates between a genuine von Neumann measurement
    (bias 0) and the degenerate fixed-outcome measurements (bias +-1).
    """

    direction: np.ndarray
    bias: float = 0.0

    def __post_init__(self):
        direction = unit_bloch(self.direction, "measurement direction")
        direction.setflags(write=False)
        object.__setattr__(self, "direction", direction)
        bias = float(self.bias)
        if not -1.0 <= bias <= 1.0:
            raise ValueError(f"bias must lie in [-1, 1], got {bias}")
        object.__setattr__(self, "bias", bias)

    @property
    def is_degenerate(self) -> bool:
        return abs(self.bias) == 1.0


@dataclass(frozen=True)
class Povm:
    """Extremal 3- or 4-outcome qubit POVM in Bloch form.

    ``weights[b] * (identity + vectors[b] . sigma)`` are the elements; the
    weights are positive, sum to one, and the weighted vectors sum to zero.
    Extremality requires unit vectors spanning 3 dimensions (4 outcomes)
    or exactly a plane (3 outcomes).
    """

    weights: np.ndarray
    vectors: np.ndarray

    def __post_init__(self):
        weights = np.array(self.weights, dtype=float)
        vectors = unit_rows(self.vectors, "POVM Bloch vectors")
        if weights.ndim != 1 or weights.shape[0] != vectors.shape[0]:
            raise ValueError("weights and vectors must have matching lengths")
        n = weights.shape[0]
        if n not in (3, 4):
            raise ValueError(f"POVM must have 3 or 4 outcomes, got {n}")
        if np.any(weights <= 0.0):
            raise ValueError(f"POVM weights must be positive, got {weights}")
        if abs(weights.sum() - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"POVM weights sum to {weights.sum()}, expected 1")
        barycenter = weights @ vectors
        if np.linalg.norm(barycenter) > BARYCENTER_TOL:
            raise ValueError(
                f"weighted Bloch vectors must sum to zero, got norm "
                f"{np.linalg.norm(barycenter)}"
            )
        rank = rank_of_span(vectors)
        if n == 4 and rank != 3:
            raise NonExtremal(
                f"four-outcome POVM vectors span {rank} dimensions, need 3"
            )
        if n == 3 and rank != 2:
            raise NonExtremal(
                f"three-outcome POVM vectors span {rank} dimensions, need exactly 2"
            )
        weights.setflags(write=False)
        vectors.setflags(write=False)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "vectors", vectors)

    @property
    def outcomes(self) -> int:
        return self.weights.shape[0]

    @property
    def elements(self) -> list[tuple[float, np.ndarray]]:
        """List of (weight, Bloch vector) pairs, one per outcome."""
        return [(float(w), v) for w, v in zip(self.weights, self.vectors)]


def born_binary(state, measurement: BinaryMeasurement) -> tuple[float, float]:
    """Outcome probabilities of a binary measurement on a qubit state.

    P(0) - P(1) = bias + (1 - |bias|) * m.v and P(0) + P(1) = 1; the pair
    is clamped to [0, 1] to absorb one-ulp excursions.
    """
    m = bloch_state(state)
    mu = measurement.bias
    diff = mu + (1.0 - abs(mu)) * float(m @ measurement.direction)
    p0 = min(max(0.5 * (1.0 + diff), 0.0), 1.0)
    return p0, 1.0 - p0


def born_povm(state, povm: Povm) -> np.ndarray:
    """Outcome probabilities P(b) = w_b * (1 + m.n_b) of a POVM."""
    m = bloch_state(state)
    p = povm.weights * (1.0 + povm.vectors @ m)
    return np.clip(p, 0.0, 1.0)


def povm_from_bloch(vectors) -> Povm:
    """Recover the unique POVM weights for the given unit Bloch vectors.

    Solves sum_b w_b * n_b = 0 with sum_b w_b = 1 and all w_b > 0 through
    the null space of the stacked vector matrix.  The null-space vector is
    normalized so its first nonzero coefficient is positive before the
    all-positive test, which makes the sign choice deterministic.

    Raises
    ------
    NonExtremal
        If the null space has dimension > 1 (e.g. four coplanar vectors)
        so the weights are not unique.
    NoValidWeights
        If no null combination exists or it cannot be scaled all-positive.
    """
    arr = unit_rows(vectors, "POVM Bloch vectors")
    null = null_combinations(arr)
    if null.shape[0] == 0:
        raise NoValidWeights("vectors admit no null combination")
    if null.shape[0] > 1:
        raise NonExtremal(
            "null space has dimension > 1; infinitely many weight choices"
        )
    coeffs = null[0]
    for c in coeffs:
        if abs(c) > 1e-12:
            coeffs = coeffs * np.sign(c)
            break
    if np.any(coeffs <= 1e-12):
        raise NoValidWeights(
            f"null combination {coeffs} cannot be scaled all-positive"
        )
    return Povm(weights=coeffs / coeffs.sum(), vectors=arr)


def gram_matrix(vectors) -> np.ndarray:
    """Gram matrix of pairwise dot products of the given vectors."""
    arr = np.asarray(vectors, dtype=float)
    return arr @ arr.T


def joint_gram(states, directions) -> np.ndarray:
    """Gram matrix of the combined state and measurement vector set."""
    stacked = np.vstack([np.asarray(states, float), np.asarray(directions, float)])
    return stacked @ stacked.T


def is_legitimate_gram(gram, tol: float = 1e-9) -> bool:
    """Whether a symmetric unit-diagonal matrix is a legitimate Gram matrix.

    Legitimate means positive semidefinite within ``-tol`` on the smallest
    eigenvalue; exactly then does a set of unit vectors realizing it exist.
    """
    g = np.asarray(gram, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        return False
    if not np.allclose(g, g.T, atol=1e-12):
        return False
    if not np.allclose(np.diag(g), 1.0, atol=1e-9):
        return False
    return bool(np.linalg.eigvalsh(g)[0] >= -tol)


def factor_gram(gram, tol: float = 1e-9) -> np.ndarray:
    """Factor a legitimate Gram matrix into vectors realizing it.

    Returns an (n, rank) array of row vectors whose Gram matrix reproduces
    the input (within numerical error).  Eigenvalues in [-tol, 0) are
    treated as zero.
    """
    g = np.asarray(gram, dtype=float)
    evals, evecs = np.linalg.eigh(g)
    if evals[0] < -tol:
        raise ValueError(f"matrix is not positive semidefinite ({evals[0]})")
    evals = np.clip(evals, 0.0, None)
    order = np.argsort(evals)[::-1]
    evals, evecs = evals[order], evecs[:, order]
    rank = int(np.sum(evals > tol * max(evals[0], 1.0)))
    rank = max(rank, 1)
    return evecs[:, :rank] * np.sqrt(evals[:rank])


def random_extremal_povm(rng: np.random.Generator, outcomes: int = 4) -> Povm:
    """Sample a random extremal POVM by rejection.

    Unit vectors are drawn isotropically (four outcomes) or on a random
    great circle (three outcomes) until they admit an all-positive null
    combination.
    """
    if outcomes not in (3, 4):
        raise ValueError(f"outcomes must be 3 or 4, got {outcomes}")
    while True:
        if outcomes == 4:
            raw = rng.normal(size=(4, 3))
            vecs = raw / np.linalg.norm(raw, axis=1, keepdims=True)
        else:
            basis, _ = np.linalg.qr(rng.normal(size=(3, 3)))
            angles = rng.uniform(0.0, 2.0 * np.pi, size=3)
            vecs = np.outer(np.cos(angles), basis[:, 0]) + np.outer(
                np.sin(angles), basis[:, 1]
            )
        try:
            return povm_from_bloch(vecs)
        except (NoValidWeights, NonExtremal):
            continue


def sic_povm() -> Povm:
    """The qubit SIC POVM: equal weights 1/4 on tetrahedral Bloch vectors."""
    s = 1.0 / np.sqrt(3.0)
    vectors = np.array(
        [[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]]
    )
    return Povm(weights=np.full(4, 0.25), vectors=vectors)
