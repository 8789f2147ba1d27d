"""Command-line front end: solves, sweeps, spectra, evolutions, self-checks.

Configuration comes from an optional JSON file (--config) whose keys match the
long option names; explicit command-line flags override file values, and
--dump-config echoes the effective configuration without running.  Every
output file gets a `<name>.meta.json` sidecar carrying the effective config,
its SHA-256 hash, package versions, and the seed, so identical configs and
seeds reproduce outputs bit for bit (no timestamps are written).

Exit codes: 0 success, 2 convergence failure, 3 invalid parameters,
4 spectral-configuration violation; each failure prints one machine-parsable
line `error: <category>: <reason>` on stderr.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np
import scipy

from . import __version__, errors, fkdv, pv
from .spectral import Grid, RealField, write_field_csv

EXIT_OK = 0
EXIT_NO_CONVERGENCE = 2
EXIT_BAD_PARAMS = 3
EXIT_SPECTRAL = 4


# ---------------------------------------------------------------------------
# configuration plumbing

SCHEMAS = {
    "ground-state": {
        "alpha": 2.0, "p": 2, "L": 50.0, "N": 1024, "tol": 1e-11,
        "max_iter": 2000, "outdir": "hamwave-out", "seed": 0,
    },
    "stability-map": {
        "alpha": "0.4:2:0.2", "p": "2,3,4,6", "c": 1.0,
        "outdir": "hamwave-out", "seed": 0,
    },
    "spectrum": {
        "alpha": 2.0, "p": 2, "c": 1.0, "L": 50.0, "N": 1024,
        "zero_tol": 1e-6, "outdir": "hamwave-out", "seed": 0,
    },
    "evolve": {
        "alpha": 2.0, "p": 2, "c": 1.0, "delta": 1e-3, "direction": "negative_mode",
        "T": 50.0, "dt": 0.0, "L": 50.0, "N": 1024, "stride": 200,
        "snapshots": 0, "outdir": "hamwave-out", "seed": 0,
    },
    "pv-solve": {
        "eps": 1e-2, "a": 1.0, "g": 1.0, "b": 1.0, "L": 25.6, "N": 256,
        "M": 4, "tol": 1e-11, "outdir": "hamwave-out", "seed": 0,
    },
    "pv-d2": {
        "eps": 1e-2, "a": 1.0, "g": 1.0, "b": 1.0, "L": 25.6, "N": 256,
        "M": 4, "h_a": 0.05, "outdir": "hamwave-out", "seed": 0,
    },
    "pv-spectrum": {
        "eps": 1e-2, "a": 1.0, "g": 1.0, "b": 1.0, "L": 25.6, "N": 256,
        "M": 4, "zero_tol": 1e-7, "outdir": "hamwave-out", "seed": 0,
    },
    "pv-evolve": {
        "eps": 1e-2, "a": 1.0, "g": 1.0, "b": 1.0, "L": 25.6, "N": 256,
        "M": 4, "delta": 1e-4, "T": 5.0, "dt": 0.0, "stride": 20,
        "outdir": "hamwave-out", "seed": 0,
    },
    "check": {"fast": 1, "outdir": "hamwave-out", "seed": 0},
}


def _parse_range(spec) -> list[float]:
    """`start:stop:step` (inclusive stop, within half a step) or `v1,v2,...`."""
    if isinstance(spec, (int, float)):
        return [float(spec)]
    text = str(spec)
    if ":" in text:
        start, stop, step = (float(t) for t in text.split(":"))
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        return [start + i * step for i in range(n)]
    return [float(t) for t in text.split(",")]


def build_config(subcommand: str, args: argparse.Namespace) -> dict:
    schema = SCHEMAS[subcommand]
    config = dict(schema)
    if args.config:
        with open(args.config) as fh:
            file_conf = json.load(fh)
        unknown = set(file_conf) - set(schema)
        if unknown:
            raise ValueError(f"unknown config keys {sorted(unknown)} for {subcommand}")
        config.update(file_conf)
    for key in schema:
        val = getattr(args, key.replace("-", "_"), None)
        if val is not None:
            config[key] = val
    # normalize types against the schema defaults
    for key, default in schema.items():
        if isinstance(default, int) and not isinstance(default, bool):
            config[key] = int(config[key])
        elif isinstance(default, float):
            config[key] = float(config[key])
    return config


def config_hash(config: dict) -> str:
    return hashlib.sha256(
        json.dumps(config, sort_keys=True).encode()
    ).hexdigest()


def write_sidecar(path: Path, config: dict, seed: int) -> None:
    meta = {
        "config": config,
        "config_sha256": config_hash(config),
        "versions": {
            "hamwave": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
        "seed": seed,
    }
    with open(str(path) + ".meta.json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_json(path: Path, payload: dict, config: dict, seed: int) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    write_sidecar(path, config, seed)


def write_gnuplot(path: Path, csv_name: str, columns: dict, title: str) -> None:
    lines = [
        "set datafile separator ','",
        f"set title '{title}'",
        "set key autotitle columnhead",
        "set xlabel 't'",
    ]
    plots = ", ".join(
        f"'{csv_name}' using 1:{idx} with lines title '{name}'"
        for name, idx in columns.items()
    )
    lines.append(f"plot {plots}")
    path.write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# subcommands

def run_ground_state(config: dict) -> int:
    params = fkdv.ModelParams(config["alpha"], config["p"])
    grid = Grid(config["L"], config["N"])
    gs = fkdv.solve_ground_state(params, grid, tol=config["tol"],
                                 max_iter=config["max_iter"])
    outdir = Path(config["outdir"])
    outdir.mkdir(parents=True, exist_ok=True)
    write_field_csv(outdir / "q.csv", gs.Q)
    write_sidecar(outdir / "q.csv", config, config["seed"])
    payload = {
        "alpha": params.alpha, "p": params.p, "L": grid.half_length,
        "N": grid.num_points, "residual": gs.residual_norm,
        "iterations": gs.iterations,
    }
    closed = None
    if (params.alpha, params.p) == (2.0, 2):
        closed = 1.5 / np.cosh(grid.x / 2.0) ** 2
    elif (params.alpha, params.p) == (1.0, 2):
        closed = 2.0 / (1.0 + grid.x**2)
    if closed is not None:
        err = float(np.max(np.abs(gs.Q.samples - closed)))
        payload["max_error_vs_closed_form"] = err
        print(f"max pointwise error vs closed form: {err:.3e}")
    write_json(outdir / "q.json", payload, config, config["seed"])
    print(f"ground state written to {outdir}/q.csv "
          f"(residual {gs.residual_norm:.3e}, {gs.iterations} iterations)")
    return EXIT_OK


def _grid_for_alpha(alpha: float) -> Grid:
    # algebraic tails for alpha < 2 want a longer box
    return Grid(50.0, 1024) if alpha >= 2.0 else Grid(200.0, 4096)


def _map_entry(task) -> dict:
    alpha, p, c, seed = task
    row = {"alpha": alpha, "p": p, "seed": seed}
    try:
        params = fkdv.ModelParams(alpha, p)
    except ValueError:
        row.update(verdict="excluded", d2_numeric=np.nan, d2_closed=np.nan)
        return row
    grid = _grid_for_alpha(alpha)
    family = fkdv.SolitonFamily(fkdv.solve_ground_state(params, grid))
    verdict = fkdv.classify_stability(params)
    d2_num = fkdv.d_second(family, c)
    d2_closed = fkdv.closed_form_d_second(family, c)
    row.update(verdict=verdict.value, d2_numeric=d2_num, d2_closed=d2_closed)
    return row


def run_stability_map(config: dict) -> int:
    alphas = _parse_range(config["alpha"])
    ps = [int(v) for v in _parse_range(config["p"])]
    c = config["c"]
    master_seed = config["seed"]
    tasks = [
        (alpha, p, c, master_seed * 1000003 + i)
        for i, (alpha, p) in enumerate(
            (a, p) for a in alphas for p in ps
        )
    ]
    workers = int(os.environ.get("HAMWAVE_THREADS", os.cpu_count() or 1))
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_map_entry, tasks))
    else:
        rows = [_map_entry(t) for t in tasks]
    outdir = Path(config["outdir"])
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / "stability_map.csv"
    with open(path, "w") as fh:
        fh.write("alpha,p,verdict,d2_numeric,d2_closed\n")
        for row in rows:
            fh.write(
                f"{row['alpha']:.17g},{row['p']},{row['verdict']},"
                f"{row['d2_numeric']:.17g},{row['d2_closed']:.17g}\n"
            )
    write_sidecar(path, config, master_seed)
    print(f"{'alpha':>8} {'p':>3} {'verdict':>12} {'d2(c)':>14}")
    for row in rows:
        print(f"{row['alpha']:8.3f} {row['p']:3d} {row['verdict']:>12} "
              f"{row['d2_numeric']:14.6g}")
    return EXIT_OK


def run_spectrum(config: dict) -> int:
    params = fkdv.ModelParams(config["alpha"], config["p"])
    grid = Grid(config["L"], config["N"])
    family = fkdv.SolitonFamily(fkdv.solve_ground_state(params, grid))
    op = fkdv.assemble_linearized(family, config["c"])
    report = fkdv.spectral_report(op, family, config["c"],
                                  zero_tol=config["zero_tol"])
    outdir = Path(config["outdir"])
    outdir.mkdir(parents=True, exist_ok=True)
    payload = {
        "eigenvalues": [float(v) for v in report.eigenvalues],
        "mu_sq": report.mu_sq,
        "zero_defect": abs(report.zero_eigenvalue),
        "zero_alignment": report.zero_alignment,
        "gap": report.gap,
        "verdict": fkdv.classify_stability(params).value,
    }
    write_json(outdir / "spectrum.json", payload, config, config["seed"])
    print(f"lowest eigenvalues: {np.array2string(report.eigenvalues[:4], precision=6)}")
    print(f"mu^2 = {report.mu_sq:.6g}, zero defect = {abs(report.zero_eigenvalue):.3e}, "
          f"gap = {report.gap:.6g}")
    return EXIT_OK


def run_evolve(config: dict) -> int:
    params = fkdv.ModelParams(config["alpha"], config["p"])
    grid = Grid(config["L"], config["N"])
    family = fkdv.SolitonFamily(fkdv.solve_ground_state(params, grid))
    dt = config["dt"] or fkdv.default_time_step(grid, params.alpha)
    evo = fkdv.EvolutionConfig(dt=dt, t_final=config["T"], stride=config["stride"])
    spectral = None
    if config["direction"] == "negative_mode":
        op = fkdv.assemble_linearized(family, config["c"])
        spectral = fkdv.spectral_report(op, family, config["c"])
    report = fkdv.stability_experiment(
        family, config["c"], config["delta"], config["direction"], evo,
        seed=config["seed"], spectral=spectral,
    )
    outdir = Path(config["outdir"])
    outdir.mkdir(parents=True, exist_ok=True)
    traj = outdir / "trajectory.csv"
    with open(traj, "w") as fh:
        fh.write("t,E,P,mass,rho,shift\n")
        for s in report.samples:
            fh.write(f"{s.t:.17g},{s.energy:.17g},{s.momentum:.17g},"
                     f"{s.mass:.17g},{s.rho:.17g},{s.shift:.17g}\n")
    write_sidecar(traj, config, config["seed"])
    if config["snapshots"]:
        for i, s in enumerate(report.samples[:: max(1, len(report.samples)
                                                    // config["snapshots"])]):
            snap = outdir / f"snapshot_{i:04d}.csv"
            write_field_csv(snap, s.u)
            write_sidecar(snap, config, config["seed"])
    payload = {
        "verdict": report.verdict,
        "sup_rho": report.sup_rho,
        "escape_time": report.escape_time,
        "delta": report.delta,
        "k_stable": report.k_stable,
        "k_escape": report.k_escape,
        "seed": report.seed,
        "dt": dt,
        "direction": report.direction,
    }
    write_json(outdir / "experiment.json", payload, config, config["seed"])
    write_gnuplot(outdir / "trajectory.gp", "trajectory.csv",
                  {"rho": 5}, "orbital distance")
    print(f"verdict: {report.verdict} (sup rho = {report.sup_rho:.3e}, "
          f"delta = {report.delta:.1e})")
    return EXIT_OK


def _pv_params(config: dict) -> pv.PVParams:
    return pv.PVParams(config["eps"], config["a"],
                       gravity=config["g"], surface_tension=config["b"])


def run_pv_solve(config: dict) -> int:
    params = _pv_params(config)
    grid = Grid(config["L"], config["N"])
    wave = pv.solve_traveling_wave(params, grid, order=config["M"], tol=config["tol"])
    outdir = Path(config["outdir"])
    outdir.mkdir(parents=True, exist_ok=True)
    write_field_csv(outdir / "eta.csv", wave.eta)
    write_sidecar(outdir / "eta.csv", config, config["seed"])
    write_field_csv(outdir / "phi.csv", wave.phi)
    write_sidecar(outdir / "phi.csv", config, config["seed"])
    payload = {
        "eps": params.eps, "a": params.a, "g": params.g, "b": params.b,
        "c": wave.c, "residuals": list(wave.residuals), "M": wave.order,
        "N": grid.num_points, "L": grid.half_length,
        "iterations": wave.iterations,
    }
    write_json(outdir / "wave.json", payload, config, config["seed"])
    print(f"c = {wave.c:.10g} (asymptotic eps*c1 = {-params.eps / (4 * np.pi * params.a):.10g})")
    print(f"residuals: {wave.residuals[0]:.3e}, {wave.residuals[1]:.3e}, "
          f"{wave.residuals[2]:.3e}")
    return EXIT_OK


def run_pv_d2(config: dict) -> int:
    params = _pv_params(config)
    grid = Grid(config["L"], config["N"])
    d2 = pv.pv_d_second(params, grid, order=config["M"],
                        h_a=config["h_a"] * params.a)
    reference = 4.0 * np.pi * params.a**2
    outdir = Path(config["outdir"])
    outdir.mkdir(parents=True, exist_ok=True)
    write_json(outdir / "pv_d2.json",
               {"d2": d2, "reference_4pi_a2": reference,
                "relative_deviation": abs(d2 - reference) / reference},
               config, config["seed"])
    print(f"d''(c) = {d2:.6g}   (4 pi a^2 = {reference:.6g}, "
          f"deviation {abs(d2 - reference) / reference:.2%})")
    return EXIT_OK


def run_pv_spectrum(config: dict) -> int:
    params = _pv_params(config)
    grid = Grid(config["L"], config["N"])
    wave = pv.solve_traveling_wave(params, grid, order=config["M"])
    op = pv.assemble_pv_Hc(wave)
    report = pv.pv_spectral_report(op, wave, zero_tol=config["zero_tol"])
    rayleigh = pv.pv_constrained_rayleigh(op, wave)
    outdir = Path(config["outdir"])
    outdir.mkdir(parents=True, exist_ok=True)
    payload = {
        "eigenvalues": [float(v) for v in report.eigenvalues],
        "mu_sq": report.mu_sq,
        "zero_defect": abs(report.zero_eigenvalue),
        "zero_alignment": report.zero_alignment,
        "gap": report.gap,
        "constrained_rayleigh_min": rayleigh,
        "verdict": "stable" if rayleigh > 0 else "indefinite",
    }
    write_json(outdir / "pv_spectrum.json", payload, config, config["seed"])
    print(f"counts: ({report.n_negative} negative, {report.n_zero} zero), "
          f"gap = {report.gap:.3e}")
    print(f"constrained Rayleigh minimum = {rayleigh:.3e}")
    return EXIT_OK


def run_pv_evolve(config: dict) -> int:
    params = _pv_params(config)
    grid = Grid(config["L"], config["N"])
    wave = pv.solve_traveling_wave(params, grid, order=config["M"])
    rng = np.random.default_rng(config["seed"])
    bump = np.exp(-(grid.x**2) / 4.0) * np.cos(np.pi * grid.x / grid.half_length
                                               * rng.integers(1, 4))
    eta0 = RealField(grid, wave.eta.samples + config["delta"] * bump)
    state0 = pv.PVState(eta=eta0, phi=wave.phi, center=wave.center)
    dt = config["dt"] or pv.default_pv_time_step(grid, params.b)
    evo = fkdv.EvolutionConfig(dt=dt, t_final=config["T"], stride=config["stride"])
    outdir = Path(config["outdir"])
    outdir.mkdir(parents=True, exist_ok=True)
    traj = outdir / "pv_trajectory.csv"
    abort_reason = None
    samples = []
    try:
        for s in pv.pv_evolve_iter(state0, params, evo, wave=wave,
                                   order=config["M"]):
            samples.append(s)
    except (errors.AdmissibilityLost, errors.BlowupDetected) as exc:
        abort_reason = f"{type(exc).__name__}: {exc}"
    with open(traj, "w") as fh:
        fh.write("t,E,P,xbar1,xbar2,rho,shift\n")
        for s in samples:
            fh.write(f"{s.t:.17g},{s.energy:.17g},{s.momentum:.17g},"
                     f"{s.state.center[0]:.17g},{s.state.center[1]:.17g},"
                     f"{s.rho:.17g},{s.shift:.17g}\n")
    write_sidecar(traj, config, config["seed"])
    sup_rho = max((s.rho for s in samples), default=np.nan)
    payload = {
        "sup_rho": sup_rho,
        "delta": config["delta"],
        "dt": dt,
        "seed": config["seed"],
        "abort_reason": abort_reason,
        "samples": len(samples),
    }
    write_json(outdir / "pv_experiment.json", payload, config, config["seed"])
    write_gnuplot(outdir / "pv_trajectory.gp", "pv_trajectory.csv",
                  {"rho": 6}, "pv orbital distance")
    print(f"sup rho = {sup_rho:.3e} over T = {config['T']}"
          + (f" (aborted: {abort_reason})" if abort_reason else ""))
    return EXIT_OK


# ---------------------------------------------------------------------------
# self-check suite

def _check_items():
    from . import checks
    return checks.all_checks()


def run_check(config: dict) -> int:
    failures = []
    print(f"{'check':<52} {'status':>8}")
    print("-" * 62)
    for name, category, fn in _check_items():
        try:
            ok, detail = fn()
        except Exception as exc:  # noqa: BLE001 - report, do not crash the table
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        status = "pass" if ok else "FAIL"
        print(f"{name:<52} {status:>8}")
        if not ok:
            failures.append((name, category, detail))
    if not failures:
        print("-" * 62)
        print("all checks passed")
        return EXIT_OK
    print("-" * 62)
    for name, category, detail in failures:
        print(f"error: {category}: {name}: {detail}", file=sys.stderr)
    if any(cat == "spectral-config" for _, cat, _ in failures):
        return EXIT_SPECTRAL
    return EXIT_NO_CONVERGENCE


# ---------------------------------------------------------------------------
# entry point

def _add_common(sp: argparse.ArgumentParser, schema: dict) -> None:
    sp.add_argument("--config", help="JSON config file; flags override it")
    sp.add_argument("--dump-config", action="store_true",
                    help="print the effective config and exit")
    for key, default in schema.items():
        flag = "--" + key.replace("_", "-")
        if isinstance(default, int) and not isinstance(default, bool):
            sp.add_argument(flag, type=int, default=None)
        elif isinstance(default, float):
            sp.add_argument(flag, type=float, default=None)
        else:
            sp.add_argument(flag, type=str, default=None)


RUNNERS = {
    "ground-state": run_ground_state,
    "stability-map": run_stability_map,
    "spectrum": run_spectrum,
    "evolve": run_evolve,
    "pv-solve": run_pv_solve,
    "pv-d2": run_pv_d2,
    "pv-spectrum": run_pv_spectrum,
    "pv-evolve": run_pv_evolve,
    "check": run_check,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="hamwave",
        description="solitary waves and orbital stability: fractional KdV/BO "
                    "models and point-vortex capillary-gravity waves",
    )
    subparsers = parser.add_subparsers(dest="subcommand", required=True)
    for name, schema in SCHEMAS.items():
        sp = subparsers.add_parser(name)
        _add_common(sp, schema)
    args = parser.parse_args(argv)
    try:
        config = build_config(args.subcommand, args)
    except (ValueError, json.JSONDecodeError) as exc:
        print(f"error: invalid-parameters: {exc}", file=sys.stderr)
        return EXIT_BAD_PARAMS
    if args.dump_config:
        json.dump(config, sys.stdout, indent=2, sort_keys=True)
        print()
        return EXIT_OK
    try:
        return RUNNERS[args.subcommand](config)
    except (ValueError, errors.UnderResolved) as exc:
        print(f"error: invalid-parameters: {exc}", file=sys.stderr)
        return EXIT_BAD_PARAMS
    except errors.SpectralConfigViolation as exc:
        print(f"error: spectral-config: {exc}", file=sys.stderr)
        return EXIT_SPECTRAL
    except errors.HamwaveError as exc:
        print(f"error: convergence: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
