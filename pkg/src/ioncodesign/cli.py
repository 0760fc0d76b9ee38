"""Command-line interface for the simulation and co-design workflows.

Subcommands: simulate-spectrum, depth-sweep, calibrate, feedforward-table,
noise-stats, infer. All results land as CSV plus a manifest JSON in the
output directory; identical config and seed give byte-identical files.
The environment variable IONCODESIGN_SEED overrides the seed (CI hook).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from . import default_instance
from .calibration import fit_c2, fit_phase_damping, simulate_calibration
from .feedforward import ControlQuery, optimal_input_angle
from .harness import (
    ConfigError,
    ExperimentConfig,
    exact_spectrum,
    perturbed_instance,
    run_depth_sweep,
    run_inference_demo,
    simulate_spectrum,
    write_inference_csv,
    write_manifest,
    write_response_csv,
    write_spectrum_csv,
    write_sweep_csv,
)
from .motional_noise import (
    AngleDistribution,
    angle_correlation,
    angle_moments,
    markovian_noise_to_signal,
)
from .spectroscopy import hellinger


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ioncodesign",
        description="Trapped-ion circuit simulation with motional noise and feedforward")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON experiment config")
        p.add_argument("--c2", type=float, help="heating rate, 1/ms")
        p.add_argument("--seed", type=int, help="master seed")
        p.add_argument("--runs", type=int, help="noise runs to average")
        p.add_argument("--feedforward", action="store_true", default=None,
                       help="enable feedforward angle correction")
        p.add_argument("--out", default="results", help="output directory")

    p = sub.add_parser("simulate-spectrum", help="noisy Trotter spectrum vs exact")
    common(p)
    p.add_argument("--r", type=int, help="Trotter steps")

    p = sub.add_parser("depth-sweep", help="F_int and Hellinger distance vs depth")
    common(p)

    p = sub.add_parser("calibrate", help="synthetic calibration and c2 fit")
    common(p)
    p.add_argument("--shots", type=int, default=10000)

    p = sub.add_parser("feedforward-table", help="optimal input angle table")
    common(p)
    p.add_argument("--phi-cap", type=float, default=4.0 * math.pi)
    p.add_argument("--n-phi", type=int, default=25)
    p.add_argument("--n-lam", type=int, default=11)
    p.add_argument("--lam-max", type=float, default=5.0)

    p = sub.add_parser("noise-stats", help="analytic angle statistics")
    common(p)
    p.add_argument("--tau", type=float, default=10.0, help="gate time, ms")
    p.add_argument("--phi-in", type=float, default=math.pi / 2.0)
    p.add_argument("--r", type=int, default=100, help="steps for noise-to-signal")

    p = sub.add_parser("infer", help="local-search Hamiltonian inference demo")
    common(p)
    p.add_argument("--iterations", type=int, default=30)
    p.add_argument("--perturb", type=float, default=0.3,
                   help="initial-guess jitter scale")
    return parser


def _load_config(args) -> ExperimentConfig:
    if args.config:
        try:
            config = ExperimentConfig.from_json(args.config)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError("config", str(exc)) from exc
    else:
        config = ExperimentConfig(hamiltonian=default_instance())
    if getattr(args, "c2", None) is not None:
        config.c2 = args.c2
    if args.seed is not None:
        config.seed = args.seed
    if "IONCODESIGN_SEED" in os.environ:
        config.seed = int(os.environ["IONCODESIGN_SEED"])
    if args.runs is not None:
        config.n_runs = args.runs
    if args.feedforward is not None:
        config.feedforward = args.feedforward
    if getattr(args, "r", None) is not None and args.command == "simulate-spectrum":
        config.r = args.r
    config.out_dir = args.out
    ExperimentConfig(**{f: getattr(config, f) for f in config.__dataclass_fields__})
    return config


def _cmd_simulate_spectrum(args) -> int:
    config = _load_config(args)
    os.makedirs(config.out_dir, exist_ok=True)
    series, spec = simulate_spectrum(config)
    target = exact_spectrum(config)
    d_h = hellinger(spec, target)
    write_response_csv(os.path.join(config.out_dir, "response.csv"), series)
    write_spectrum_csv(os.path.join(config.out_dir, "spectrum.csv"), spec)
    write_spectrum_csv(os.path.join(config.out_dir, "exact_spectrum.csv"), target)
    write_manifest(os.path.join(config.out_dir, "manifest.json"),
                   "simulate-spectrum", config)
    print(f"r={config.r} c2={config.c2} feedforward={config.feedforward} "
          f"hellinger_vs_exact={d_h:.6f}")
    return 0


def _cmd_depth_sweep(args) -> int:
    config = _load_config(args)
    os.makedirs(config.out_dir, exist_ok=True)
    result = run_depth_sweep(config)
    write_sweep_csv(os.path.join(config.out_dir, "sweep.csv"), result)
    with open(os.path.join(config.out_dir, "sweep_result.json"), "w") as fh:
        json.dump(result.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    write_manifest(os.path.join(config.out_dir, "manifest.json"), "depth-sweep", config)
    print(f"r_opt_by_fint={result.r_opt_by_fint} r_opt_by_dh={result.r_opt_by_dh}")
    return 0


def _cmd_calibrate(args) -> int:
    config = _load_config(args)
    os.makedirs(config.out_dir, exist_ok=True)
    if args.shots < 1:
        raise ConfigError("shots", "must be a positive integer")
    phi_grid = np.linspace(0.5, 2.0 * np.pi, 8)
    tau_grid = np.linspace(0.0, 60.0, 13)
    curve = simulate_calibration(phi_grid, tau_grid, config.c2, args.shots,
                                 seed=config.seed)
    curve.to_csv(os.path.join(config.out_dir, "calibration.csv"))
    fit = fit_c2(curve)
    alt = fit_phase_damping(curve)
    report = {"c2_true": config.c2, "shots": args.shots,
              "c2_hat": fit["c2_hat"], "residual": fit["residual"],
              "phase_damping_residual": alt["residual"]}
    with open(os.path.join(config.out_dir, "calibration_fit.json"), "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    write_manifest(os.path.join(config.out_dir, "manifest.json"), "calibrate", config)
    print(f"c2_hat={fit['c2_hat']:.6g} (true {config.c2}) "
          f"residual={fit['residual']:.4g} phase_damping={alt['residual']:.4g}")
    return 0


def _cmd_feedforward_table(args) -> int:
    config = _load_config(args)
    os.makedirs(config.out_dir, exist_ok=True)
    if args.phi_cap <= 0 or args.n_phi < 1 or args.n_lam < 1 or args.lam_max < 0:
        raise ConfigError("feedforward-table", "grid parameters must be positive")
    phis = np.linspace(args.phi_cap / args.n_phi, args.phi_cap, args.n_phi)
    lams = np.linspace(0.0, args.lam_max, args.n_lam)
    path = os.path.join(config.out_dir, "feedforward_table.csv")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["phi_p", "lambda", "phi_in_star", "fidelity_star"])
        for phi_p in phis:
            for lam in lams:
                res = optimal_input_angle(ControlQuery(float(phi_p), float(lam),
                                                       args.phi_cap))
                writer.writerow([repr(float(phi_p)), repr(float(lam)),
                                 repr(res["phi_in_star"]), repr(res["fidelity_star"])])
    write_manifest(os.path.join(config.out_dir, "manifest.json"),
                   "feedforward-table", config)
    print(f"wrote {args.n_phi * args.n_lam} rows to {path}")
    return 0


def _cmd_noise_stats(args) -> int:
    config = _load_config(args)
    os.makedirs(config.out_dir, exist_ok=True)
    if args.tau <= 0:
        raise ConfigError("tau", "must be positive")
    lam = config.c2 * args.tau
    moments = angle_moments(AngleDistribution(args.phi_in, lam))
    nts = markovian_noise_to_signal(args.r, lam)
    deltas = [0.1 * args.tau, args.tau, 10.0 * args.tau]
    report = {
        "c2": config.c2, "tau_ms": args.tau, "lambda": lam, "phi_in": args.phi_in,
        "mean_angle": float(moments["mean"]),
        "typical_angle": float(moments["typical"]),
        "variance": float(moments["variance"]),
        "beta": float(nts["beta"]), "r": args.r, "eta": float(nts["eta"]),
        "correlations": {repr(float(d)): float(angle_correlation(args.tau, d, config.c2))
                         for d in deltas},
    }
    with open(os.path.join(config.out_dir, "noise_stats.json"), "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    write_manifest(os.path.join(config.out_dir, "manifest.json"), "noise-stats", config)
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def _cmd_infer(args) -> int:
    config = _load_config(args)
    os.makedirs(config.out_dir, exist_ok=True)
    if args.iterations < 0:
        raise ConfigError("iterations", "must be non-negative")
    target = exact_spectrum(config)
    rng = np.random.default_rng(np.random.SeedSequence(entropy=config.seed,
                                                       spawn_key=(123456789,)))
    guess = perturbed_instance(config.hamiltonian, args.perturb, rng)
    log = run_inference_demo(target, guess, args.iterations, config)
    write_inference_csv(os.path.join(config.out_dir, "inference_log.csv"), log)
    write_manifest(os.path.join(config.out_dir, "manifest.json"), "infer", config)
    print(f"initial d_h={log[0]['d_h']:.6f} final d_h={log[-1]['d_h']:.6f} "
          f"({args.iterations} iterations, feedforward={config.feedforward})")
    return 0


_COMMANDS = {
    "simulate-spectrum": _cmd_simulate_spectrum,
    "depth-sweep": _cmd_depth_sweep,
    "calibrate": _cmd_calibrate,
    "feedforward-table": _cmd_feedforward_table,
    "noise-stats": _cmd_noise_stats,
    "infer": _cmd_infer,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, RuntimeError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
