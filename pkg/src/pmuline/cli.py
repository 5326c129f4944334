"""Command-line interface.

Subcommands:

* ``simulate`` -- generate a sample CSV from line parameters and a load
  profile (optionally noisy).
* ``estimate`` -- run one estimator on a sample CSV, emit a JSON report.
* ``screen``   -- bad-data screening on a sample CSV, emit a JSON report.
* ``sweep``    -- error-versus-length Monte Carlo study, emit a CSV and a
  JSON summary.

Every subcommand is deterministic given its flags (including seeds).  On
error a machine-readable JSON object is printed to stderr and the exit
status is nonzero.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

import numpy as np

from . import __version__
from .baddata import ExcessiveRejectionError, screen_and_estimate
from .core import LineParameters, phase_to_sequence
from .estimators import (
    EstimationError,
    estimate_double,
    estimate_optimal,
    estimate_single,
)
from .experiments import SweepConfig, export_sweep, run_length_sweep
from .fixtures import untransposed_reference_line
from .lineio import read_line_parameters, read_samples_csv, write_samples_csv
from .simulator import (
    LoadProfile,
    NoiseSpec,
    add_noise_series,
    calibrate_unbalance,
    generate_series,
    scale_length,
)

__all__ = ["main"]


class CliError(Exception):
    """User-facing CLI failure with an error class tag."""

    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind


def _complex_matrix_json(m: np.ndarray) -> list:
    return [[[float(np.real(v)), float(np.imag(v))] for v in row] for row in np.asarray(m)]


def _real_matrix_json(m: np.ndarray) -> list:
    return [[float(v) for v in row] for row in np.asarray(m)]


def _load_line(path: str | None) -> LineParameters:
    if path is None:
        return untransposed_reference_line()
    try:
        return read_line_parameters(path)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        raise CliError("line-parameters", str(exc)) from exc


def _write_json(path: str | None, payload: dict) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as handle:
            handle.write(text)


def _cmd_simulate(args: argparse.Namespace) -> int:
    line = _load_line(args.line)
    if args.length_km is not None:
        line = scale_length(line, args.length_km / args.base_length_km)
    profile = LoadProfile()
    if args.unbalance_target > 0.0:
        multipliers = calibrate_unbalance(line, profile, args.unbalance_target)
        profile = dataclasses.replace(profile, unbalance=multipliers)
    records = generate_series(line, profile, args.samples)
    if args.noise_sigma > 0.0:
        records = add_noise_series(
            records, NoiseSpec(sigma_fraction=args.noise_sigma, seed=args.seed)
        )
    write_samples_csv(args.output, records)
    return 0


def _errors_vs_reference(sequence_z: np.ndarray, sequence_b: np.ndarray, reference: LineParameters) -> dict:
    ref_z = phase_to_sequence(reference.z_abc)
    ref_b = phase_to_sequence(reference.b_abc.astype(complex))
    z1 = sequence_z[1, 1]
    b1 = sequence_b[1, 1].real
    return {
        "R1_pct": abs(z1.real - ref_z[1, 1].real) / abs(ref_z[1, 1].real) * 100.0,
        "X1_pct": abs(z1.imag - ref_z[1, 1].imag) / abs(ref_z[1, 1].imag) * 100.0,
        "B1_pct": abs(b1 - ref_b[1, 1].real) / abs(ref_b[1, 1].real) * 100.0,
        "worst_sequence_entry_pct": float(
            np.abs(sequence_z - ref_z).max() / np.abs(ref_z).max() * 100.0
        ),
    }


def _cmd_estimate(args: argparse.Namespace) -> int:
    records = read_samples_csv(args.input)
    report: dict = {"method": args.method, "n_samples": len(records)}
    if args.method == "optimal":
        params, sequence, diagnostics = estimate_optimal(records)
        report["z_abc"] = _complex_matrix_json(params.z_abc)
        report["b_abc"] = _real_matrix_json(params.b_abc)
        report["z_012"] = _complex_matrix_json(sequence.z_012)
        report["b_012"] = _complex_matrix_json(sequence.b_012)
        report["residual_norm"] = diagnostics["residual_norm"]
        report["condition"] = diagnostics["condition"]
        if args.reference:
            report["errors_vs_reference"] = _errors_vs_reference(
                sequence.z_012, sequence.b_012, _load_line(args.reference)
            )
    else:
        if args.method == "single":
            estimates = [estimate_single(r) for r in records]
        else:
            if len(records) < 2:
                raise CliError("usage", "the double method needs at least 2 samples")
            estimates = [
                estimate_double(records[k], records[k + 1]) for k in range(len(records) - 1)
            ]
        z1 = complex(np.mean([e.z1 for e in estimates]))
        y1 = complex(np.mean([e.y1 for e in estimates]))
        report["z1"] = [z1.real, z1.imag]
        report["y1"] = [y1.real, y1.imag]
        report["n_estimates"] = len(estimates)
        if args.reference:
            reference = _load_line(args.reference)
            ref_z1 = phase_to_sequence(reference.z_abc)[1, 1]
            ref_b1 = phase_to_sequence(reference.b_abc.astype(complex))[1, 1].real
            report["errors_vs_reference"] = {
                "R1_pct": abs(z1.real - ref_z1.real) / abs(ref_z1.real) * 100.0,
                "X1_pct": abs(z1.imag - ref_z1.imag) / abs(ref_z1.imag) * 100.0,
                "B1_pct": abs(y1.imag - ref_b1) / abs(ref_b1) * 100.0,
            }
    _write_json(args.output, report)
    return 0


def _cmd_screen(args: argparse.Namespace) -> int:
    records = read_samples_csv(args.input)
    report = screen_and_estimate(records, threshold=args.threshold)
    flagged_timestamps = [records[i].timestamp_us for i in report.flagged_sample_indices]
    payload = {
        "threshold": args.threshold,
        "iterations": report.iterations,
        "flagged_sample_indices": report.flagged_sample_indices,
        "flagged_timestamps_us": flagged_timestamps,
        "per_sample_scaled_residual": [float(v) for v in report.per_sample_scaled_residual],
        "z_abc": _complex_matrix_json(report.final_estimate.z_abc),
        "b_abc": _real_matrix_json(report.final_estimate.b_abc),
    }
    _write_json(args.output, payload)
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    kwargs: dict = {}
    if args.config:
        try:
            with open(args.config) as handle:
                raw = json.load(handle)
        except (OSError, json.JSONDecodeError) as exc:
            raise CliError("config", str(exc)) from exc
        known = {"lengths_km", "n_samples_per_set", "m_sets", "sigma_fraction", "methods"}
        unknown = set(raw) - known
        if unknown:
            raise CliError("config", f"unknown config keys: {sorted(unknown)}")
        if "lengths_km" in raw:
            kwargs["lengths_km"] = tuple(raw["lengths_km"])
        if "n_samples_per_set" in raw:
            kwargs["n_samples_per_set"] = int(raw["n_samples_per_set"])
        if "m_sets" in raw:
            kwargs["m_sets"] = int(raw["m_sets"])
        if "methods" in raw:
            kwargs["methods"] = tuple(raw["methods"])
        sigma = raw.get("sigma_fraction", 0.01)
    else:
        sigma = 0.01
    kwargs["noise"] = NoiseSpec(sigma_fraction=sigma, seed=args.seed)
    if args.line:
        kwargs["base_line"] = _load_line(args.line)
    config = SweepConfig(**kwargs)
    result = run_length_sweep(config)
    export_sweep(result, args.output_csv)
    summary = {
        "lengths_km": list(config.lengths_km),
        "m_sets": config.m_sets,
        "failures": {f"{length}:{method}": count for (length, method), count in result.failures.items()},
    }

    def sd(length: float, method: str) -> float | None:
        try:
            return result.row(length, method, "X1").sd_err_pct
        except KeyError:
            return None

    if 150.0 in config.lengths_km and "optimal" in config.methods:
        value = sd(150.0, "optimal")
        summary["optimal_150km_X1_sd_pct"] = value
        summary["optimal_150km_X1_sd_below_1pct"] = bool(value < 1.0)
    _write_json(args.output_json, summary)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pmuline",
        description="Transmission-line parameter estimation from two-terminal PMU phasors",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    simulate = sub.add_parser("simulate", help="generate a sample CSV from a pi-model simulation")
    simulate.add_argument("--line", help="line-parameters JSON (default: bundled untransposed reference line)")
    simulate.add_argument("--samples", type=int, default=200)
    simulate.add_argument("--length-km", type=float, default=None, help="scale the line to this length")
    simulate.add_argument("--base-length-km", type=float, default=14.5)
    simulate.add_argument("--unbalance-target", type=float, default=0.0, help="mean load unbalance, percent")
    simulate.add_argument("--noise-sigma", type=float, default=0.0, help="noise SD as fraction of magnitude")
    simulate.add_argument("--seed", type=int, default=0)
    simulate.add_argument("--output", required=True)
    simulate.set_defaults(func=_cmd_simulate)

    estimate = sub.add_parser("estimate", help="estimate line parameters from a sample CSV")
    estimate.add_argument("--input", required=True)
    estimate.add_argument("--method", choices=("single", "double", "optimal"), default="optimal")
    estimate.add_argument("--reference", help="line-parameters JSON to compute percentage errors against")
    estimate.add_argument("--output", help="report JSON path (default: stdout)")
    estimate.set_defaults(func=_cmd_estimate)

    screen = sub.add_parser("screen", help="bad-data screening on a sample CSV")
    screen.add_argument("--input", required=True)
    screen.add_argument("--threshold", type=float, default=3.0)
    screen.add_argument("--output", help="report JSON path (default: stdout)")
    screen.set_defaults(func=_cmd_screen)

    sweep = sub.add_parser("sweep", help="error-versus-length Monte Carlo study")
    sweep.add_argument("--config", help="sweep config JSON")
    sweep.add_argument("--line", help="base line-parameters JSON")
    sweep.add_argument("--seed", type=int, default=7)
    sweep.add_argument("--output-csv", required=True)
    sweep.add_argument("--output-json", required=True)
    sweep.set_defaults(func=_cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        json.dump({"error": exc.kind, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 2
    except (EstimationError, ExcessiveRejectionError) as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 3
    except (OSError, ValueError) as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
