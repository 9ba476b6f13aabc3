"""Circuit-level simulation of the prepare-and-measure setup.

Preparations become single-qubit unitaries acting on |0>, measurements
become basis rotations followed by a computational-basis readout; both are
parameterized directly by the Bloch vectors.  Finite statistics are drawn
per circuit with an equal shot count, and the witness is estimated from
the observed relative frequencies with its propagated standard deviation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotPure, NotUnit, OutOfRange
from .witness import _coeffs

_POLE_TOL = 1e-24  # squared transverse norm below which a vector is polar


def prep_amplitudes(state) -> tuple[complex, complex]:
    """Amplitudes (alpha, beta) preparing the pure state with Bloch vector b.

    ``alpha = sqrt((1+b3)/2)`` is real and nonnegative; ``beta`` carries the
    azimuthal phase.  At the south pole the phase is undefined and beta is
    fixed to 1 (beta = 0 would not normalize there).
    """
    b = np.asarray(state, dtype=float)
    if abs(np.linalg.norm(b) - 1.0) > 1e-9:
        raise NotPure(f"preparation requires a unit Bloch vector, got norm "
                      f"{np.linalg.norm(b)}")
    transverse_sq = b[0] * b[0] + b[1] * b[1]
    alpha = complex(np.sqrt(max(0.0, (1.0 + b[2]) / 2.0)))
    if transverse_sq <= _POLE_TOL:
        beta = 0.0 + 0.0j if b[2] > 0.0 else 1.0 + 0.0j
    else:
        beta = (b[0] + 1j * b[1]) / np.sqrt(transverse_sq) * np.sqrt(
            max(0.0, (1.0 - b[2]) / 2.0)
        )
    return alpha, beta


def meas_angles(direction) -> tuple[float, float]:
    """Rotation angles (theta, phi) measuring along the Bloch vector v.

    theta in [0, pi] and phi in [0, 2*pi) are the polar and azimuthal
    angles of v; along the poles phi is fixed to 0.
    """
    v = np.asarray(direction, dtype=float)
    if abs(np.linalg.norm(v) - 1.0) > 1e-9:
        raise NotUnit(f"measurement requires a unit Bloch vector, got norm "
                      f"{np.linalg.norm(v)}")
    transverse_sq = v[0] * v[0] + v[1] * v[1]
    if transverse_sq <= _POLE_TOL:
        return (0.0 if v[2] > 0.0 else np.pi), 0.0
    half_cos = np.sqrt(max(0.0, (1.0 + v[2]) / 2.0))
    half_sin = np.sqrt(max(0.0, (1.0 - v[2]) / 2.0))
    theta = 2.0 * np.arctan2(half_sin, half_cos)
    phi = float(np.mod(np.arctan2(v[1], v[0]), 2.0 * np.pi))
    return float(theta), phi


def prep_unitary(alpha: complex, beta: complex) -> np.ndarray:
    """Unitary sending |0> to alpha|0> + beta|1>."""
    return np.array(
        [[alpha, -np.conj(beta)], [beta, np.conj(alpha)]], dtype=complex
    )


def proj_unitary(theta: float, phi: float) -> np.ndarray:
    """Basis rotation whose rows are the conjugated measurement basis."""
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    phase = np.exp(-1j * phi)
    return np.array([[c, phase * s], [s, -phase * c]], dtype=complex)


@dataclass(frozen=True)
class CircuitEntry:
    """One prepare-and-measure circuit: indices are 1-based as in files."""

    x: int
    y: int
    alpha: complex
    beta: complex
    theta: float
    phi: float
    shots: int

    def __post_init__(self):
        if self.x < 1 or self.y < 1:
            raise ValueError("circuit indices are 1-based")
        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"amplitudes must be normalized, got {norm}")
        if self.shots < 1:
            raise ValueError("shots must be at least 1")


def build_circuits(states, directions, shots: int) -> list[CircuitEntry]:
    """Circuits for every (state, measurement) pair, same shot count each."""
    if shots < 1:
        raise ValueError("shots must be at least 1")
    entries = []
    for x, state in enumerate(np.asarray(states, dtype=float), start=1):
        alpha, beta = prep_amplitudes(state)
        for y, direction in enumerate(np.asarray(directions, dtype=float), start=1):
            theta, phi = meas_angles(direction)
            entries.append(
                CircuitEntry(
                    x=x, y=y, alpha=alpha, beta=beta, theta=theta, phi=phi,
                    shots=int(shots),
                )
            )
    return entries


def circuit_probabilities(entry: CircuitEntry) -> tuple[float, float]:
    """Outcome probabilities of one circuit from its amplitudes and angles."""
    row0 = proj_unitary(entry.theta, entry.phi)[0]
    amplitude = row0[0] * entry.alpha + row0[1] * entry.beta
    p0 = min(max(abs(amplitude) ** 2, 0.0), 1.0)
    return float(p0), float(1.0 - p0)


@dataclass(frozen=True)
class StatTable:
    """Observed counts N(b | x, y) with a common shot count per circuit."""

    counts: np.ndarray
    shots: int

    def __post_init__(self):
        counts = np.array(self.counts, dtype=np.int64)
        if counts.ndim != 3 or counts.shape[2] != 2:
            raise ValueError(f"counts must have shape (M, V, 2), got {counts.shape}")
        if np.any(counts < 0):
            raise ValueError("counts must be nonnegative")
        if np.any(counts.sum(axis=2) != self.shots):
            raise ValueError("every cell must sum to the common shot count")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "shots", int(self.shots))

    @property
    def frequencies(self) -> np.ndarray:
        return self.counts / self.shots


def _cell_rng(seed: int, x: int, y: int) -> np.random.Generator:
    # Independent substream per cell so sampling is schedule-independent.
    return np.random.default_rng([int(seed), int(x), int(y)])


def _apply_noise(p0: float, noise: float) -> float:
    return noise * p0 + (1.0 - noise) * 0.5


def sample_counts(states, directions, shots: int, seed: int,
                  noise: float = 1.0) -> StatTable:
    """Draw binomial counts for every (state, measurement) cell.

    ``noise`` shrinks every state Bloch vector by the given factor
    (depolarizing channel); 1 is noiseless, 0 fully mixed.  Each cell uses
    its own substream derived from (seed, x, y), so results do not depend
    on evaluation order.
    """
    if not 0.0 <= noise <= 1.0:
        raise OutOfRange(f"noise must lie in [0, 1], got {noise}")
    m = np.asarray(states, dtype=float)
    v = np.asarray(directions, dtype=float)
    counts = np.zeros((m.shape[0], v.shape[0], 2), dtype=np.int64)
    for x in range(m.shape[0]):
        for y in range(v.shape[0]):
            p0 = _apply_noise(0.5 * (1.0 + float(m[x] @ v[y])), noise)
            n0 = int(_cell_rng(seed, x + 1, y + 1).binomial(shots, p0))
            counts[x, y] = (n0, shots - n0)
    return StatTable(counts=counts, shots=int(shots))


def sample_counts_from_circuits(entries, seed: int, noise: float = 1.0) -> StatTable:
    """Draw binomial counts from circuit-level probabilities.

    All (x, y) cells must be present exactly once with a common shot count.
    """
    if not 0.0 <= noise <= 1.0:
        raise OutOfRange(f"noise must lie in [0, 1], got {noise}")
    if not entries:
        raise ValueError("no circuits given")
    n_states = max(e.x for e in entries)
    n_meas = max(e.y for e in entries)
    shots = entries[0].shots
    seen = set()
    counts = np.zeros((n_states, n_meas, 2), dtype=np.int64)
    for entry in entries:
        if entry.shots != shots:
            raise ValueError("all circuits must use the same shot count")
        if (entry.x, entry.y) in seen:
            raise ValueError(f"duplicate circuit for cell ({entry.x}, {entry.y})")
        seen.add((entry.x, entry.y))
        p0 = _apply_noise(circuit_probabilities(entry)[0], noise)
        n0 = int(_cell_rng(seed, entry.x, entry.y).binomial(shots, p0))
        counts[entry.x - 1, entry.y - 1] = (n0, shots - n0)
    if len(seen) != n_states * n_meas:
        raise ValueError("circuits do not cover the full (x, y) grid")
    return StatTable(counts=counts, shots=shots)


@dataclass(frozen=True)
class WitnessEstimate:
    """Witness estimate from observed frequencies.

    ``sigma`` propagates the per-cell binomial variance of f(0) - f(1),
    which is 4 f(0) f(1) / N (the two outcomes of a cell are perfectly
    anticorrelated), treating distinct cells as independent.
    """

    value: float
    sigma: float
    shots: int
    sigma_ideal: float | None = None

    def __post_init__(self):
        if self.sigma < 0.0:
            raise ValueError("sigma must be nonnegative")


def estimate_witness(witness, table: StatTable) -> WitnessEstimate:
    """Plug-in witness estimate and standard deviation from counts."""
    w = _coeffs(witness)
    if table.counts.shape[:2] != w.shape:
        raise DimensionMismatch(
            f"counts shape {table.counts.shape[:2]} does not match witness "
            f"{w.shape}"
        )
    f = table.frequencies
    value = float(np.sum(w * (f[:, :, 0] - f[:, :, 1])))
    variance = float(
        np.sum(w * w * 4.0 * f[:, :, 0] * f[:, :, 1] / table.shots)
    )
    return WitnessEstimate(value=value, sigma=float(np.sqrt(variance)),
                           shots=table.shots)


def sigma_analytic(c: float, shots: int) -> float:
    """Ideal-configuration standard deviation of the umbrella witness.

    Closed form for equal shot counts per circuit; scales as 1/sqrt(shots).
    """
    if not 0.0 <= c <= 3.0:
        raise OutOfRange(f"family parameter must lie in [0, 3], got {c}")
    if shots < 1:
        raise OutOfRange(f"shots must be at least 1, got {shots}")
    c2 = c * c
    return float(
        np.sqrt((27.0 + 42.0 * c2 - 5.0 * c2 * c2) / (6.0 * shots)) / (3.0 + c2)
    )
