"""Command-line front end.

Subcommands: ``construct`` (witness bundles), ``bounds`` (model maxima and
umbrella sweeps), ``simulate`` (circuits, finite-shot counts, estimate),
``certify`` (counts against thresholds) and ``verify`` (numerical
uniqueness of the optimum).

Exit codes: 0 success, 2 input or validation error, 3 negative scientific
verdict (not certified / uniqueness check failed) -- so pipelines can tell
"broken" from "not certified".
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

import numpy as np

from . import io
from .bounds import (
    classical_bound,
    canonical_model,
    quantum_bound,
    real_family_value,
    verify_selftest,
)
from .builder import construct_bundle, umbrella
from .certify import bundle_thresholds, make_certificate, umbrella_thresholds
from .errors import PmstError
from .simulate import (
    build_circuits,
    estimate_witness,
    sample_counts_from_circuits,
    sigma_analytic,
)
from .witness import PMScenario


def _parse_floats(text: str) -> list[float]:
    return [float(part) for part in text.split(",") if part.strip()]


def _load_states_file(path: str) -> dict:
    with open(path) as handle:
        data = json.load(handle)
    if "states" not in data:
        raise ValueError(f"{path} must contain a 'states' array")
    return data


def _print_payload(args, payload: dict, text_lines: list[str]) -> None:
    if args.format == "machine":
        print(io.render_json(payload))
    else:
        for line in text_lines:
            print(line)


def _vector_lines(label: str, vectors) -> list[str]:
    lines = [f"{label}:"]
    for i, vec in enumerate(np.asarray(vectors, float), start=1):
        lines.append(
            "  %d: (% .10f, % .10f, % .10f)" % (i, vec[0], vec[1], vec[2])
        )
    return lines


def cmd_construct(args) -> int:
    inputs = {}
    states = None
    if args.states:
        data = _load_states_file(args.states)
        states = np.asarray(data["states"], dtype=float)
        inputs[args.states] = io.sha256_of_path(args.states)
    bundle = construct_bundle(
        args.method,
        states,
        r=_parse_floats(args.r) if args.r else None,
        p=_parse_floats(args.p) if args.p else None,
        c=args.c,
        k=args.k,
        double=args.double,
        allow_sign_flip=args.allow_sign_flip,
    )
    record = io.make_run_record(
        "construct",
        {
            "method": args.method,
            "c": args.c,
            "k": args.k,
            "double": args.double,
        },
        inputs=inputs,
    )
    if args.out:
        io.save_bundle(bundle, args.out, record)

    from .builder import bundle_to_dict

    payload = bundle_to_dict(bundle)
    lines = [
        f"construction: {bundle.construction}",
        f"witness shape: {bundle.witness.w.shape[0]} states x "
        f"{bundle.witness.w.shape[1]} measurements",
        f"ideal maximum: {bundle.max_value:.12f}",
    ]
    for key in ("p", "q", "r", "c", "eigenvalues"):
        if key in bundle.params:
            lines.append(f"{key}: {bundle.params[key]}")
    if "F" in bundle.params:
        lines.append(f"pair strengths F: {bundle.params['F']}")
    lines += _vector_lines("states", bundle.states)
    lines += _vector_lines("measurements", bundle.directions)
    if args.out:
        lines.append(f"bundle written to {args.out}")
    _print_payload(args, payload, lines)
    return 0


def _sweep_grid(spec: str) -> list[float]:
    if ":" in spec:
        parts = [float(p) for p in spec.split(":")]
        if len(parts) != 3:
            raise ValueError("sweep spec must be start:stop:step or a comma list")
        start, stop, step = parts
        if step <= 0:
            raise ValueError("sweep step must be positive")
        grid = list(np.arange(start, stop + 0.5 * step, step))
        return [float(min(c, stop)) for c in grid]
    return _parse_floats(spec)


def cmd_bounds(args) -> int:
    if args.umbrella_sweep:
        grid = _sweep_grid(args.umbrella_sweep)
        rows = []
        for c in grid:
            witness, _, _ = umbrella(c)
            rows.append(
                {
                    "c": c,
                    "W_class": classical_bound(witness).value,
                    "W_R2": real_family_value(c),
                    "W_C2": quantum_bound(
                        witness, "complex_qubit", starts=args.starts, seed=args.seed
                    ).value,
                }
            )
        csv_lines = ["c,W_class,W_R2,W_C2"]
        for row in rows:
            csv_lines.append(
                ",".join(
                    io.format_float(row[key]) for key in ("c", "W_class", "W_R2", "W_C2")
                )
            )
        csv_text = "\n".join(csv_lines) + "\n"
        if args.out:
            io.write_text_atomic(args.out, csv_text)
        if args.format == "machine":
            print(csv_text, end="")
        else:
            print(f"{'c':>6} {'W_class':>12} {'W_R2':>12} {'W_C2':>12}")
            for row in rows:
                print(
                    f"{row['c']:>6.3f} {row['W_class']:>12.7f} "
                    f"{row['W_R2']:>12.7f} {row['W_C2']:>12.7f}"
                )
            if args.out:
                print(f"sweep written to {args.out}")
        return 0

    if not args.bundle:
        raise ValueError("bounds needs --bundle or --umbrella-sweep")
    bundle = io.load_bundle(args.bundle)
    models = (
        ["classical", "real_qubit", "complex_qubit"]
        if args.model == "all"
        else [canonical_model(args.model)]
    )
    results = {}
    for model in models:
        if model == "classical":
            results[model] = classical_bound(bundle.witness)
        else:
            results[model] = quantum_bound(
                bundle.witness, model, starts=args.starts, seed=args.seed
            )
    payload = {
        "bundle": args.bundle,
        "results": {
            model: {
                "value": res.value,
                "starts_used": res.starts_used,
                "converged_fraction": res.converged_fraction,
                "argmax_states": res.argmax.states.tolist(),
                "argmax_directions": res.argmax.directions.tolist(),
                "argmax_biases": res.argmax.biases.tolist(),
            }
            for model, res in results.items()
        },
    }
    record = io.make_run_record(
        "bounds",
        {"model": args.model, "starts": args.starts},
        seed=args.seed,
        inputs={args.bundle: io.sha256_of_path(args.bundle)},
    )
    if args.out:
        io.save_json(payload, args.out, record)
    lines = []
    for model, res in results.items():
        lines.append(
            f"{model}: {res.value:.10f} "
            f"(starts {res.starts_used}, converged {res.converged_fraction:.2%})"
        )
        lines += _vector_lines(f"  {model} argmax states", res.argmax.states)
        lines += _vector_lines(f"  {model} argmax directions", res.argmax.directions)
    _print_payload(args, payload, lines)
    return 0


def cmd_simulate(args) -> int:
    inputs = {}
    c = None
    if args.bundle:
        bundle = io.load_bundle(args.bundle)
        inputs[args.bundle] = io.sha256_of_path(args.bundle)
        if bundle.construction == "umbrella":
            c = float(bundle.params["c"])
    elif args.umbrella_c is not None:
        c = args.umbrella_c
        witness, states, directions = umbrella(c)
        bundle = None
    else:
        raise ValueError("simulate needs --bundle or --umbrella-c")
    if args.bundle:
        witness, states, directions = bundle.witness, bundle.states, bundle.directions

    entries = build_circuits(states, directions, args.shots)
    table = sample_counts_from_circuits(entries, args.seed, noise=args.noise)
    estimate = estimate_witness(witness, table)
    sigma_ideal = sigma_analytic(c, args.shots) if c is not None else None
    estimate = dataclasses.replace(estimate, sigma_ideal=sigma_ideal)

    circuits_path = f"{args.out_prefix}.circuits.jsonl"
    counts_path = f"{args.out_prefix}.counts.csv"
    estimate_path = f"{args.out_prefix}.estimate.json"
    io.write_circuits(entries, circuits_path)
    io.write_counts(table, counts_path)
    record = io.make_run_record(
        "simulate",
        {"shots": args.shots, "noise": args.noise, "umbrella_c": c},
        seed=args.seed,
        inputs=inputs,
    )
    payload = {
        "value": estimate.value,
        "sigma": estimate.sigma,
        "sigma_ideal": sigma_ideal,
        "shots": args.shots,
        "noise": args.noise,
        "umbrella_c": c,
        "artifacts": {
            circuits_path: io.sha256_of_path(circuits_path),
            counts_path: io.sha256_of_path(counts_path),
        },
    }
    io.save_json(payload, estimate_path, record)
    lines = [
        f"witness estimate: {estimate.value:.6f} +- {estimate.sigma:.6f} "
        f"({args.shots} shots/circuit)",
    ]
    if sigma_ideal is not None:
        lines.append(f"ideal-configuration sigma: {sigma_ideal:.6f}")
    lines += [
        f"circuits written to {circuits_path}",
        f"counts written to {counts_path}",
        f"estimate written to {estimate_path}",
    ]
    _print_payload(args, payload, lines)
    return 0


def cmd_certify(args) -> int:
    inputs = {args.counts: io.sha256_of_path(args.counts)}
    table = io.read_counts(args.counts)
    if args.c is not None:
        witness, _, _ = umbrella(args.c)
        thresholds = umbrella_thresholds(
            args.c, recompute_real=args.recompute_real,
            starts=args.starts, seed=args.seed,
        )
    elif args.bundle:
        bundle = io.load_bundle(args.bundle)
        inputs[args.bundle] = io.sha256_of_path(args.bundle)
        witness = bundle.witness
        thresholds = bundle_thresholds(bundle, starts=args.starts, seed=args.seed)
    else:
        raise ValueError("certify needs --c (umbrella) or --bundle")
    estimate = estimate_witness(witness, table)
    certificate = make_certificate(
        estimate.value, estimate.sigma, thresholds, zmin=args.zmin
    )
    payload = {
        "value": certificate.value,
        "sigma": certificate.sigma,
        "thresholds": {
            "classical": thresholds.classical,
            "real": thresholds.real,
            "complex": thresholds.complex_,
        },
        "z_classical": certificate.z_classical,
        "z_real": certificate.z_real,
        "zmin": certificate.zmin,
        "beats_classical": certificate.beats_classical,
        "beats_real": certificate.beats_real,
    }
    record = io.make_run_record(
        "certify", {"c": args.c, "zmin": args.zmin}, seed=args.seed, inputs=inputs
    )
    if args.out:
        io.save_json(payload, args.out, record)
    lines = [
        f"witness: {certificate.value:.6f} +- {certificate.sigma:.6f}",
        f"thresholds: classical {thresholds.classical:.6f}, "
        f"real {thresholds.real:.6f}, complex {thresholds.complex_:.6f}",
        f"z against classical: {certificate.z_classical:.2f} "
        f"-> beats_classical = {certificate.beats_classical}",
        f"z against real: {certificate.z_real:.2f} "
        f"-> beats_real = {certificate.beats_real}",
    ]
    _print_payload(args, payload, lines)
    return 0 if certificate.beats_real else 3


def cmd_verify(args) -> int:
    bundle = io.load_bundle(args.bundle)
    target = PMScenario(states=bundle.states, directions=bundle.directions)
    report = verify_selftest(
        bundle.witness, target, trials=args.trials, seed=args.seed
    )
    payload = dataclasses.asdict(report)
    record = io.make_run_record(
        "verify",
        {"trials": args.trials},
        seed=args.seed,
        inputs={args.bundle: io.sha256_of_path(args.bundle)},
    )
    if args.out:
        io.save_json(payload, args.out, record)
    lines = [
        f"optimized bound: {report.bound:.10f}",
        f"target value:    {report.target_value:.10f}",
        f"optimal starts: {report.n_optimal}/{report.trials}, "
        f"worst joint-Gram deviation {report.worst_deviation:.3e}",
        f"uniqueness check {'passed' if report.passed else 'FAILED'}",
    ]
    _print_payload(args, payload, lines)
    return 0 if report.passed else 3


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0, help="random seed")
    parser.add_argument("--out", help="output file path")
    parser.add_argument(
        "--format", choices=("text", "machine"), default="text",
        help="stdout format (machine prints JSON/CSV)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pmst",
        description="Qubit prepare-and-measure witnesses: construction, "
        "bounds, simulation and certification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_construct = sub.add_parser("construct", help="build a witness bundle")
    p_construct.add_argument(
        "--method", choices=("4x3", "general", "4x6", "umbrella"), required=True
    )
    p_construct.add_argument("--states", help="JSON file with a 'states' array")
    p_construct.add_argument("--r", help="comma-separated positive row scales")
    p_construct.add_argument("--p", help="comma-separated null coefficients")
    p_construct.add_argument("--c", type=float, help="umbrella family parameter")
    p_construct.add_argument("--k", type=float, default=1.0, help="penalty weight")
    p_construct.add_argument(
        "--double", action="store_true",
        help="append sign-flipped rows and antipodal states",
    )
    p_construct.add_argument(
        "--allow-sign-flip", action="store_true",
        help="accept state sets whose null combination has mixed signs (4x6)",
    )
    _add_common(p_construct)
    p_construct.set_defaults(func=cmd_construct)

    p_bounds = sub.add_parser("bounds", help="compute model maxima")
    p_bounds.add_argument("--bundle", help="witness bundle file")
    p_bounds.add_argument(
        "--model", default="all",
        choices=("classical", "real", "real_qubit", "complex", "complex_qubit", "all"),
    )
    p_bounds.add_argument("--starts", type=int, default=None)
    p_bounds.add_argument(
        "--umbrella-sweep",
        help="c grid as start:stop:step or comma list; writes c,W_class,W_R2,W_C2",
    )
    _add_common(p_bounds)
    p_bounds.set_defaults(func=cmd_bounds)

    p_sim = sub.add_parser("simulate", help="emit circuits, sample counts, estimate")
    p_sim.add_argument("--bundle", help="witness bundle file")
    p_sim.add_argument("--umbrella-c", type=float, help="umbrella family parameter")
    p_sim.add_argument("--shots", type=int, required=True)
    p_sim.add_argument(
        "--noise", type=float, default=1.0,
        help="depolarizing factor on the states (1 noiseless, 0 fully mixed)",
    )
    p_sim.add_argument("--out-prefix", required=True)
    _add_common(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    p_cert = sub.add_parser("certify", help="certify counts against thresholds")
    p_cert.add_argument("--counts", required=True, help="counts CSV file")
    p_cert.add_argument("--c", type=float, help="umbrella family parameter")
    p_cert.add_argument("--bundle", help="witness bundle file")
    p_cert.add_argument("--zmin", type=float, default=3.0)
    p_cert.add_argument("--starts", type=int, default=None)
    p_cert.add_argument(
        "--recompute-real", action="store_true",
        help="rerun the optimizer for the coplanar threshold",
    )
    _add_common(p_cert)
    p_cert.set_defaults(func=cmd_certify)

    p_verify = sub.add_parser("verify", help="numerical uniqueness of the optimum")
    p_verify.add_argument("--bundle", required=True)
    p_verify.add_argument("--trials", type=int, default=64)
    _add_common(p_verify)
    p_verify.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PmstError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
