"""Linear witness evaluation over prepare-and-measure configurations.

The witness value of a coefficient matrix ``w`` on states ``m_x`` and
binary measurements ``(bias_y, v_y)`` is

    sum_y sum_x w[x, y] * (bias_y + (1 - |bias_y|) * m_x . v_y),

which reduces to ``sum_xy w[x, y] * m_x . v_y`` for genuine (bias 0)
measurements.  This module also provides the closed-form best-response
maps used by the alternating maximization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    DEFAULT_DIRECTION,
    BinaryMeasurement,
    Povm,
    born_povm,
    unit_rows,
)
from .errors import DimensionMismatch, InvalidK, MissingPovm

ZERO_TOL = 1e-12  # below this, a response vector is considered unconstrained


@dataclass(frozen=True)
class WitnessMatrix:
    """Real witness coefficient matrix, optionally extended by a POVM penalty.

    When ``k`` is set, the full witness subtracts ``k`` times the total
    probability of the target POVM reproducing the state label, so ``k``
    requires ``target_povm`` and must be positive.
    """

    w: np.ndarray
    k: float | None = None
    target_povm: Povm | None = None

    def __post_init__(self):
        w = np.array(self.w, dtype=float)
        if w.ndim != 2:
            raise ValueError(f"witness matrix must be 2-D, got shape {w.shape}")
        w.setflags(write=False)
        object.__setattr__(self, "w", w)
        if self.k is not None:
            if self.target_povm is None:
                raise MissingPovm("penalty weight k given without a target POVM")
            k = float(self.k)
            if k <= 0.0:
                raise InvalidK(f"penalty weight k must be positive, got {k}")
            object.__setattr__(self, "k", k)

    @property
    def shape(self) -> tuple[int, int]:
        return self.w.shape


@dataclass(frozen=True)
class PMScenario:
    """Concrete prepare-and-measure configuration.

    ``states`` holds the preparation Bloch vectors (norm at most 1, so
    noisy preparations are representable), ``directions`` and ``biases``
    the binary measurements.
    """

    states: np.ndarray
    directions: np.ndarray
    biases: np.ndarray = None
    target_povm: Povm | None = None

    def __post_init__(self):
        states = np.array(self.states, dtype=float)
        if states.ndim != 2 or states.shape[1] != 3:
            raise ValueError(f"states must have shape (n, 3), got {states.shape}")
        norms = np.linalg.norm(states, axis=1)
        if np.any(norms > 1.0 + 1e-12):
            raise ValueError(f"state Bloch vectors must have norm <= 1, got {norms}")
        directions = unit_rows(self.directions, "measurement directions")
        if self.biases is None:
            biases = np.zeros(directions.shape[0])
        else:
            biases = np.array(self.biases, dtype=float)
        if biases.shape != (directions.shape[0],):
            raise ValueError("biases must have one entry per measurement")
        if np.any(np.abs(biases) > 1.0):
            raise ValueError("biases must lie in [-1, 1]")
        for arr in (states, directions, biases):
            arr.setflags(write=False)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "directions", directions)
        object.__setattr__(self, "biases", biases)

    @property
    def measurements(self) -> tuple[BinaryMeasurement, ...]:
        return tuple(
            BinaryMeasurement(direction=v, bias=mu)
            for v, mu in zip(self.directions, self.biases)
        )


@dataclass(frozen=True)
class UVectors:
    """Per-state response vectors u_x = sum_y w[x, y] v_y and their norms."""

    vectors: np.ndarray
    norms: np.ndarray


@dataclass(frozen=True)
class ColumnCheck:
    """Comparison of genuine versus degenerate payoff for one column.

    ``margin`` is genuine minus degenerate; ties count as genuine-preferred
    because a zero-contribution degenerate option never helps.
    """

    column: int
    genuine: float
    degenerate: float
    margin: float
    genuine_preferred: bool


def _coeffs(witness) -> np.ndarray:
    if isinstance(witness, WitnessMatrix):
        return witness.w
    arr = np.asarray(witness, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"witness matrix must be 2-D, got shape {arr.shape}")
    return arr


def eval_witness(witness, scenario: PMScenario) -> float:
    """Witness value of a scenario, including degenerate-measurement terms."""
    w = _coeffs(witness)
    if scenario.states.shape[0] != w.shape[0] or scenario.directions.shape[0] != w.shape[1]:
        raise DimensionMismatch(
            f"witness {w.shape} does not match scenario with "
            f"{scenario.states.shape[0]} states and "
            f"{scenario.directions.shape[0]} measurements"
        )
    mu = scenario.biases
    col_sums = w.sum(axis=0)
    genuine_cols = np.einsum("xy,xy->y", w, scenario.states @ scenario.directions.T)
    return float(np.sum(mu * col_sums + (1.0 - np.abs(mu)) * genuine_cols))


def eval_full_witness(witness: WitnessMatrix, scenario: PMScenario) -> float:
    """Witness value minus the POVM penalty term.

    The penalty is ``k * sum_x P(b=x | state x, target POVM)``; it vanishes
    exactly when every state is anti-aligned with its POVM vector.
    """
    if not isinstance(witness, WitnessMatrix) or witness.target_povm is None:
        raise MissingPovm("full witness evaluation needs a target POVM")
    if witness.k is None:
        raise InvalidK("full witness evaluation needs a positive penalty weight k")
    povm = witness.target_povm
    if scenario.states.shape[0] != povm.outcomes:
        raise DimensionMismatch(
            f"{scenario.states.shape[0]} states cannot index a "
            f"{povm.outcomes}-outcome POVM"
        )
    penalty = sum(
        born_povm(state, povm)[x] for x, state in enumerate(scenario.states)
    )
    return eval_witness(witness, scenario) - witness.k * float(penalty)


def best_states(witness, directions) -> tuple[np.ndarray, UVectors, float]:
    """Optimal states for given genuine measurement directions.

    Each state is ``u_x / |u_x|``; rows with ``|u_x|`` below tolerance get
    the fixed default direction since any choice is then optimal.  Also
    returns the conditional maximum ``Q_v = sum_x |u_x|``.
    """
    w = _coeffs(witness)
    dirs = np.asarray(directions, dtype=float)
    if dirs.shape != (w.shape[1], 3):
        raise DimensionMismatch(
            f"expected {w.shape[1]} directions, got shape {dirs.shape}"
        )
    u = w @ dirs
    norms = np.linalg.norm(u, axis=1)
    states = np.where(
        (norms > ZERO_TOL)[:, None], u / np.where(norms > ZERO_TOL, norms, 1.0)[:, None],
        DEFAULT_DIRECTION,
    )
    return states, UVectors(vectors=u, norms=norms), float(norms.sum())


def best_measurements(witness, states) -> tuple[np.ndarray, np.ndarray]:
    """Optimal genuine measurement directions for given states.

    Returns ``(directions, determined)``.  A column whose weighted state
    sum vanishes leaves the direction undetermined: the default direction
    is returned there with ``determined`` False, and the caller must choose.
    """
    w = _coeffs(witness)
    m = np.asarray(states, dtype=float)
    if m.shape != (w.shape[0], 3):
        raise DimensionMismatch(f"expected {w.shape[0]} states, got shape {m.shape}")
    b = w.T @ m
    norms = np.linalg.norm(b, axis=1)
    determined = norms > ZERO_TOL
    directions = np.where(
        determined[:, None], b / np.where(determined, norms, 1.0)[:, None],
        DEFAULT_DIRECTION,
    )
    return directions, determined


def degenerate_check(witness, states) -> list[ColumnCheck]:
    """Compare genuine and degenerate payoffs column by column.

    For states fixed, column y pays ``|sum_x w[x, y] m_x|`` with the best
    genuine measurement and ``|sum_x w[x, y]|`` with the best fixed-outcome
    one; a witness is unusable when the latter wins anywhere.
    """
    w = _coeffs(witness)
    m = np.asarray(states, dtype=float)
    genuine = np.linalg.norm(w.T @ m, axis=1)
    degenerate = np.abs(w.sum(axis=0))
    return [
        ColumnCheck(
            column=y,
            genuine=float(g),
            degenerate=float(d),
            margin=float(g - d),
            genuine_preferred=bool(g >= d),
        )
        for y, (g, d) in enumerate(zip(genuine, degenerate))
    ]


def u_norms_from_gram(witness, gram) -> np.ndarray:
    """Norms |u_x| computed from the measurement Gram matrix alone.

    ``|u_x|^2 = sum_y w[x,y]^2 + 2 sum_{y<y'} w[x,y] w[x,y'] gram[y,y']``,
    i.e. the diagonal of ``w G w^T``; equals the direct norm for any unit
    directions realizing ``gram``.
    """
    w = _coeffs(witness)
    g = np.asarray(gram, dtype=float)
    if g.shape != (w.shape[1], w.shape[1]):
        raise DimensionMismatch(
            f"Gram matrix shape {g.shape} does not match {w.shape[1]} columns"
        )
    sq = np.einsum("xy,yz,xz->x", w, g, w)
    return np.sqrt(np.clip(sq, 0.0, None))
