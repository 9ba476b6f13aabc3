"""Certification arithmetic: witness estimates against model thresholds.

A measured witness value certifies a property when it exceeds the maximum
attainable within the restricted model by at least ``zmin`` estimated
standard deviations: beating the classical bound certifies quantum (qubit)
behavior, beating the coplanar bound certifies complex qubit preparations.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bounds import (
    REAL_QUBIT,
    classical_bound,
    quantum_bound,
    real_family_value,
    umbrella_classical_value,
)
from .builder import WitnessBundle, umbrella


@dataclass(frozen=True)
class Thresholds:
    """Model maxima the estimate is compared against."""

    classical: float
    real: float
    complex_: float


@dataclass(frozen=True)
class Certificate:
    """z-scores and verdicts of one witness estimate.

    ``z_classical = (value - classical) / sigma`` and likewise for
    ``z_real``; a verdict holds when its z-score reaches ``zmin``.
    """

    value: float
    sigma: float
    thresholds: Thresholds
    z_classical: float
    z_real: float
    beats_classical: bool
    beats_real: bool
    zmin: float


def _z_score(value: float, threshold: float, sigma: float) -> float:
    if sigma > 0.0:
        return (value - threshold) / sigma
    return float("inf") if value > threshold else float("-inf")


def make_certificate(value: float, sigma: float, thresholds: Thresholds,
                     zmin: float = 3.0) -> Certificate:
    """Certificate for a measured (value, sigma) pair."""
    if sigma < 0.0:
        raise ValueError("sigma must be nonnegative")
    if zmin <= 0.0:
        raise ValueError("zmin must be positive")
    z_classical = _z_score(value, thresholds.classical, sigma)
    z_real = _z_score(value, thresholds.real, sigma)
    return Certificate(
        value=float(value),
        sigma=float(sigma),
        thresholds=thresholds,
        z_classical=z_classical,
        z_real=z_real,
        beats_classical=bool(z_classical >= zmin),
        beats_real=bool(z_real >= zmin),
        zmin=float(zmin),
    )


def umbrella_thresholds(c: float, recompute_real: bool = False,
                        starts: int | None = None, seed: int = 0) -> Thresholds:
    """Analytic thresholds of the umbrella witness.

    The classical bound is closed-form, the coplanar bound comes from the
    analytic family (or, with ``recompute_real``, from the multi-start
    optimizer), and the complex bound is the construction maximum 2.
    """
    if recompute_real:
        witness, _, _ = umbrella(c)
        real = quantum_bound(witness, REAL_QUBIT, starts=starts, seed=seed).value
    else:
        real = real_family_value(c)
    return Thresholds(
        classical=umbrella_classical_value(c), real=real, complex_=2.0
    )


def bundle_thresholds(bundle: WitnessBundle, starts: int | None = None,
                      seed: int = 0) -> Thresholds:
    """Thresholds for an arbitrary witness bundle.

    Classical by exact enumeration, coplanar by the multi-start optimizer,
    complex from the bundle's documented maximum.
    """
    witness = bundle.witness
    return Thresholds(
        classical=classical_bound(witness).value,
        real=quantum_bound(witness, REAL_QUBIT, starts=starts, seed=seed).value,
        complex_=bundle.max_value,
    )
