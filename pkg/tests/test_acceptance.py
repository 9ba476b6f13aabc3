"""Acceptance suite.

Each test prints one ``ACCEPTANCE <id>: PASS/FAIL`` line (run pytest with
``-s`` to see them as they happen) and asserts the criterion at its stated
tolerance.  Kernel compilation is warmed up outside the timed sections.
"""

import json
import time
from itertools import product

import numpy as np
import pytest

from pmst import (
    BinaryMeasurement,
    PMScenario,
    best_measurements,
    best_states,
    born_binary,
    build_4x3,
    build_4x6,
    build_circuits,
    circuit_probabilities,
    classical_bound,
    equilibrium_residual,
    estimate_witness,
    eval_full_witness,
    eval_witness,
    make_certificate,
    meas_angles,
    prep_amplitudes,
    prep_unitary,
    proj_unitary,
    quantum_bound,
    random_extremal_povm,
    real_family_value,
    sample_counts,
    sic_povm,
    sigma_analytic,
    umbrella,
    umbrella_classical_value,
    umbrella_thresholds,
    verify_selftest,
)
from pmst.cli import main as cli_main
from pmst import io

from conftest import random_rotation, random_unit

SQ3 = np.sqrt(3.0)

# Reference coplanar maxima of the umbrella witness on the acceptance grid.
REFERENCE_REAL_BOUNDS = {
    0.25: 1.9881,
    0.5: 1.9567,
    0.625: 1.9362,
    0.75: 1.9139,
    0.875: 1.8910,
    1.0: 1.8683,
    1.25: 1.9089,
    1.5: 1.9404,
    1.75: 1.9635,
    2.0: 1.9795,
    2.5: 1.9960,
}

# Recorded hardware runs used as replay fixtures: (c, value, sigma).
HARDWARE_RUNS = [
    (0.25, 1.9706, 0.0081),
    (0.5, 1.9436, 0.0086),
    (0.5, 1.9865, 0.0085),
    (0.625, 1.9663, 0.0088),
    (0.75, 1.9943, 0.0089),
    (0.875, 1.9908, 0.0090),
    (1.0, 1.9604, 0.0091),
    (1.0, 1.9905, 0.0090),
    (1.25, 1.9814, 0.0089),
    (1.5, 1.9728, 0.0085),
    (1.75, 1.9692, 0.0079),
    (2.0, 1.9805, 0.0070),
    (2.5, 1.9786, 0.0050),
]


@pytest.fixture(scope="module", autouse=True)
def warm_kernels():
    # First-ever call compiles the numba kernels; keep that outside the
    # timed budgets (the compilation is disk-cached afterwards).
    w, _, _ = umbrella(1.0)
    quantum_bound(w, "complex_qubit", starts=2, seed=0)
    from pmst import real_scan_bound

    real_scan_bound(w, resolution=0.5, seed=0, polish_starts=1)


def report(criterion: str, passed: bool, detail: str) -> None:
    print(f"\nACCEPTANCE {criterion}: {'PASS' if passed else 'FAIL'} - {detail}")


def test_criterion_1_worked_example_exact(tmp_path, capsys):
    """General construction reproduces the coplanar worked example."""
    start = time.perf_counter()
    states_file = tmp_path / "states.json"
    states_file.write_text(
        json.dumps(
            {"states": [[1, 0, 0], [0.5, 0, SQ3 / 2], [-SQ3 / 2, 0, -0.5]]}
        )
    )
    bundle_path = tmp_path / "bundle.json"
    code = cli_main(
        [
            "construct", "--method", "general", "--states", str(states_file),
            "--r", f"1,1,{float(SQ3)!r}", "--out", str(bundle_path),
        ]
    )
    capsys.readouterr()
    assert code == 0
    bundle = io.load_bundle(str(bundle_path))

    from pmst import state_moment_matrix

    moment = state_moment_matrix(bundle.states, [1.0, 1.0, SQ3])
    expected_moment = np.array(
        [
            [(5 + 3 * SQ3) / 4, 0, (3 + SQ3) / 4],
            [0, 0, 0],
            [(3 + SQ3) / 4, 0, (3 + SQ3) / 4],
        ]
    )
    expected_eigs = np.array([(3 + 2 * SQ3) / 2, 0.5, 0.0])
    expected_dirs = np.array([[SQ3 / 2, 0, 0.5], [0.5, 0, -SQ3 / 2]])
    expected_w = np.array([[SQ3 / 2, 0.5], [SQ3 / 2, -0.5], [-SQ3, 0.0]])

    elapsed = time.perf_counter() - start
    ok = (
        np.max(np.abs(moment - expected_moment)) <= 1e-12
        and np.max(np.abs(np.array(bundle.params["eigenvalues"]) - expected_eigs))
        <= 1e-12
        and np.max(np.abs(bundle.directions - expected_dirs)) <= 1e-12
        and np.max(np.abs(bundle.witness.w - expected_w)) <= 1e-12
        and elapsed < 1.0
    )
    report("1", ok, f"worked example exact to 1e-12, runtime {elapsed:.2f}s")
    assert np.max(np.abs(moment - expected_moment)) <= 1e-12
    assert np.max(np.abs(np.array(bundle.params["eigenvalues"]) - expected_eigs)) <= 1e-12
    assert np.max(np.abs(bundle.directions - expected_dirs)) <= 1e-12
    assert np.max(np.abs(bundle.witness.w - expected_w)) <= 1e-12
    assert elapsed < 1.0


def test_criterion_2_4x3_selftest_optimality():
    """Projective maximum 2 and Gram uniqueness over 200 random POVMs.

    The maximization is restricted to genuine projective measurements
    (the optimality and uniqueness theorem being checked is about that
    problem); the fixed-outcome comparison is a separate validity check
    that roughly three quarters of isotropically random POVMs fail until
    their witness rows are doubled.
    """
    start = time.perf_counter()
    rng = np.random.default_rng(20240201)
    successes = 0
    total = 200
    worst_gap = 0.0
    worst_dev = 0.0
    for i in range(total):
        povm = random_extremal_povm(rng)
        states = -povm.vectors
        witness, params, directions = build_4x3(states, check_degenerate=False)
        bound = quantum_bound(
            witness, "complex_qubit", starts=64, seed=1000 + i,
            allow_degenerate=False,
        )
        target = PMScenario(states=states, directions=directions)
        rep = verify_selftest(
            witness, target, trials=16, seed=5000 + i, allow_degenerate=False
        )
        gap = abs(bound.value - 2.0)
        worst_gap = max(worst_gap, gap)
        if np.isfinite(rep.worst_deviation):
            worst_dev = max(worst_dev, rep.worst_deviation)
        if gap <= 1e-6 and rep.passed:
            successes += 1
    elapsed = time.perf_counter() - start
    ok = successes >= 199 and elapsed < 120.0
    report(
        "2", ok,
        f"{successes}/200 POVMs optimal+unique (worst |W-2| {worst_gap:.1e}, "
        f"worst Gram dev {worst_dev:.1e}), runtime {elapsed:.1f}s",
    )
    assert successes >= 199
    assert elapsed < 120.0


def test_criterion_3_4x6_construction():
    """Equilibrium residual and pairwise maximum over 100 random POVMs."""
    start = time.perf_counter()
    rng = np.random.default_rng(20240202)
    worst_residual = 0.0
    worst_gap = 0.0
    for i in range(100):
        povm = random_extremal_povm(rng)
        states = -povm.vectors
        witness, params, directions, pairs = build_4x6(povm)
        worst_residual = max(worst_residual, equilibrium_residual(params, states))
        target_value = sum(
            params.F[a, b] * np.linalg.norm(states[a] - states[b]) for a, b in pairs
        )
        bound = quantum_bound(witness, "complex_qubit", starts=64, seed=2000 + i)
        worst_gap = max(worst_gap, abs(bound.value - target_value))

    # Independent oracle for the SIC: direct evaluation of the pair sum.
    sic = sic_povm()
    witness, params, directions, pairs = build_4x6(sic)
    sic_states = -sic.vectors
    sic_oracle = sum(
        params.F[a, b] * np.linalg.norm(sic_states[a] - sic_states[b])
        for a, b in pairs
    )
    sic_bound = quantum_bound(witness, "complex_qubit", starts=64, seed=77)
    elapsed = time.perf_counter() - start
    ok = (
        worst_residual < 1e-9
        and worst_gap <= 1e-7
        and abs(sic_oracle - 1.0) <= 1e-12
        and abs(sic_bound.value - 1.0) <= 1e-9
        and elapsed < 120.0
    )
    report(
        "3", ok,
        f"residual {worst_residual:.1e}, bound gap {worst_gap:.1e}, "
        f"SIC maximum {sic_bound.value:.12f}, runtime {elapsed:.1f}s",
    )
    assert worst_residual < 1e-9
    assert worst_gap <= 1e-7
    assert abs(sic_oracle - 1.0) <= 1e-12
    assert abs(sic_bound.value - 1.0) <= 1e-9
    assert elapsed < 120.0


def test_criterion_4_umbrella_bounds_grid():
    """Classical, coplanar, and unrestricted bounds across the c grid."""
    start = time.perf_counter()
    worst = {"family": 0.0, "seesaw": 0.0, "complex": 0.0, "classical": 0.0}
    for i, (c, table_value) in enumerate(sorted(REFERENCE_REAL_BOUNDS.items())):
        witness, _, _ = umbrella(c)
        family = real_family_value(c)
        worst["family"] = max(worst["family"], abs(family - table_value))
        real = quantum_bound(witness, "real_qubit", starts=256, seed=3000 + i)
        worst["seesaw"] = max(worst["seesaw"], abs(real.value - family))
        cplx = quantum_bound(witness, "complex_qubit", starts=64, seed=4000 + i)
        worst["complex"] = max(worst["complex"], abs(cplx.value - 2.0))
        classical = classical_bound(witness)
        worst["classical"] = max(
            worst["classical"], abs(classical.value - umbrella_classical_value(c))
        )
    elapsed = time.perf_counter() - start
    ok = (
        worst["family"] <= 2e-3
        and worst["seesaw"] <= 2e-3
        and worst["complex"] <= 1e-9
        and worst["classical"] <= 1e-12
        and elapsed < 300.0
    )
    report(
        "4", ok,
        f"family vs table {worst['family']:.1e}, seesaw vs family "
        f"{worst['seesaw']:.1e}, complex vs 2 {worst['complex']:.1e}, "
        f"classical vs closed form {worst['classical']:.1e}, "
        f"runtime {elapsed:.1f}s",
    )
    assert worst["family"] <= 2e-3
    assert worst["seesaw"] <= 2e-3
    assert worst["complex"] <= 1e-9
    assert worst["classical"] <= 1e-12
    assert elapsed < 300.0


def test_criterion_5_estimator_statistics():
    """Unbiasedness and variance of the finite-shot estimator."""
    start = time.perf_counter()
    shots = 8192
    replicates = 400
    witness, states, directions = umbrella(1.0)
    sigma_ideal = sigma_analytic(1.0, shots)
    assert sigma_ideal == pytest.approx(0.009021, abs=5e-7)

    values = np.empty(replicates)
    sigmas = np.empty(replicates)
    for seed in range(replicates):
        table = sample_counts(states, directions, shots, seed)
        estimate = estimate_witness(witness, table)
        values[seed] = estimate.value
        sigmas[seed] = estimate.sigma

    mean_tol = 2.0 * sigma_ideal / np.sqrt(replicates) * 3.0
    mean_gap = abs(values.mean() - 2.0)
    std_ratio = values.std(ddof=1) / sigma_ideal
    sigma_ratio = sigmas.mean() / sigma_ideal
    elapsed = time.perf_counter() - start
    ok = (
        mean_gap <= mean_tol
        and abs(std_ratio - 1.0) <= 0.10
        and abs(sigma_ratio - 1.0) <= 0.05
        and elapsed < 60.0
    )
    report(
        "5", ok,
        f"|mean-2| {mean_gap:.1e} (tol {mean_tol:.1e}), sample std ratio "
        f"{std_ratio:.3f}, mean sigma ratio {sigma_ratio:.4f}, "
        f"runtime {elapsed:.1f}s",
    )
    assert mean_gap <= mean_tol
    assert abs(std_ratio - 1.0) <= 0.10
    assert abs(sigma_ratio - 1.0) <= 0.05
    assert elapsed < 60.0


def test_criterion_6_certification_end_to_end(tmp_path, capsys):
    """Simulate-certify pipeline and the recorded-hardware replay."""
    start = time.perf_counter()
    hits = 0
    for seed in range(100):
        prefix = tmp_path / f"run{seed}"
        code = cli_main(
            [
                "simulate", "--umbrella-c", "1", "--shots", "8192",
                "--seed", str(seed), "--out-prefix", str(prefix),
            ]
        )
        assert code == 0
        code = cli_main(
            [
                "certify", "--counts", f"{prefix}.counts.csv", "--c", "1",
                "--out", f"{prefix}.cert.json",
            ]
        )
        with open(f"{prefix}.cert.json") as handle:
            cert = json.load(handle)
        if code == 0 and cert["beats_real"] and cert["z_real"] >= 10.0:
            hits += 1
    capsys.readouterr()

    # Replay the recorded hardware values through the same arithmetic.
    replay_ok = True
    expectations = []
    for c, value, sigma in HARDWARE_RUNS:
        cert = make_certificate(value, sigma, umbrella_thresholds(c), zmin=3.0)
        expectations.append((c, value, cert))
    by_case = {(c, value): cert for c, value, cert in expectations}
    # Strong runs certify complex preparations; the 2.5 run fails even the
    # classical threshold.
    replay_ok &= by_case[(1.0, 1.9905)].beats_real
    replay_ok &= by_case[(1.0, 1.9905)].z_real > 13.0
    replay_ok &= by_case[(0.75, 1.9943)].beats_real
    replay_ok &= by_case[(0.875, 1.9908)].beats_real
    replay_ok &= by_case[(1.25, 1.9814)].beats_real
    replay_ok &= not by_case[(2.5, 1.9786)].beats_real
    replay_ok &= not by_case[(2.5, 1.9786)].beats_classical

    elapsed = time.perf_counter() - start
    ok = hits >= 95 and replay_ok and elapsed < 60.0
    report(
        "6", ok,
        f"{hits}/100 seeds certified with z>=10; hardware-replay arithmetic "
        f"{'consistent' if replay_ok else 'INCONSISTENT'}, "
        f"runtime {elapsed:.1f}s",
    )
    assert hits >= 95
    assert replay_ok
    assert elapsed < 60.0


def test_criterion_7_full_witness_consistency(rng):
    """Extended witness equals the plain maximum at every ideal target."""
    cases = []

    for c in (0.5, 1.0, 2.0):
        witness, states, directions = umbrella(c)
        assert witness.target_povm is not None
        cases.append(("umbrella", witness, states, directions, 2.0))

    for i in range(5):
        povm = random_extremal_povm(rng)
        witness, params, directions = build_4x3(-povm.vectors, check_degenerate=False)
        cases.append(("4x3", witness, -povm.vectors, directions, 2.0))

    for i in range(5):
        povm = random_extremal_povm(rng)
        witness, params, directions, pairs = build_4x6(povm)
        maximum = sum(
            params.F[a, b] * np.linalg.norm((-povm.vectors)[a] - (-povm.vectors)[b])
            for a, b in pairs
        )
        cases.append(("4x6", witness, -povm.vectors, directions, maximum))

    worst_value = 0.0
    worst_penalty = 0.0
    for name, witness, states, directions, maximum in cases:
        scenario = PMScenario(states=states, directions=directions)
        plain = eval_witness(witness, scenario)
        full = eval_full_witness(witness, scenario)
        worst_value = max(worst_value, abs(full - maximum))
        worst_penalty = max(worst_penalty, abs(plain - full))
    ok = worst_value <= 1e-12 and worst_penalty <= 1e-12
    report(
        "7", ok,
        f"full witness off by {worst_value:.1e}, penalty term {worst_penalty:.1e}",
    )
    assert worst_value <= 1e-12
    assert worst_penalty <= 1e-12


def test_criterion_8_property_suites(rng):
    """Monotone sweeps, rotation invariance, bound ordering, unitarity,
    circuit-Born equality."""
    # Monotone see-saw sweeps of the closed-form best responses.
    for _ in range(5):
        w = rng.normal(size=(4, 3))
        dirs = random_unit(rng, 3)
        previous = -np.inf
        for _ in range(40):
            states, _, _ = best_states(w, dirs)
            dirs, _ = best_measurements(w, states)
            value = eval_witness(w, PMScenario(states=states, directions=dirs))
            assert value >= previous - 1e-12
            previous = value

    # Rotation invariance of the witness value.
    for _ in range(20):
        w = rng.normal(size=(4, 3))
        states, dirs = random_unit(rng, 4), random_unit(rng, 3)
        rot = random_rotation(rng)
        a = eval_witness(w, PMScenario(states=states, directions=dirs))
        b = eval_witness(
            w, PMScenario(states=states @ rot.T, directions=dirs @ rot.T)
        )
        assert abs(a - b) <= 1e-10

    # Bound ordering on umbrella and random witnesses.
    for c in (0.25, 1.0, 2.5):
        witness, _, _ = umbrella(c)
        w_class = classical_bound(witness).value
        w_real = quantum_bound(witness, "real_qubit", starts=64, seed=1).value
        w_cplx = quantum_bound(witness, "complex_qubit", starts=64, seed=1).value
        assert w_class <= w_real + 1e-9 <= w_cplx + 2e-9
    for i in range(5):
        w = rng.normal(size=(4, 3))
        w_class = classical_bound(w).value
        w_real = quantum_bound(w, "real_qubit", starts=64, seed=i).value
        w_cplx = quantum_bound(w, "complex_qubit", starts=64, seed=i).value
        assert w_class <= w_real + 1e-9
        assert w_real <= w_cplx + 1e-9

    # Unitarity of the preparation and measurement-rotation matrices.
    worst_unitary = 0.0
    for _ in range(200):
        u_p = prep_unitary(*prep_amplitudes(random_unit(rng)))
        u_m = proj_unitary(*meas_angles(random_unit(rng)))
        worst_unitary = max(
            worst_unitary,
            np.max(np.abs(u_p @ u_p.conj().T - np.eye(2))),
            np.max(np.abs(u_m @ u_m.conj().T - np.eye(2))),
        )
    assert worst_unitary <= 1e-12

    # Circuit amplitudes against the Bloch-form Born rule, 1e4 pairs.
    worst_prob = 0.0
    states = random_unit(rng, 10000)
    directions = random_unit(rng, 10000)
    for m, v in zip(states, directions):
        entry = build_circuits([m], [v], shots=1)[0]
        p_circuit = circuit_probabilities(entry)[0]
        p_born = born_binary(m, BinaryMeasurement(direction=v))[0]
        worst_prob = max(worst_prob, abs(p_circuit - p_born))
    assert worst_prob <= 1e-12

    report(
        "8", True,
        f"properties hold (unitarity {worst_unitary:.1e}, circuit-Born "
        f"{worst_prob:.1e})",
    )
