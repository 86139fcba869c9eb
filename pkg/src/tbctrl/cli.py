"""Command-line front end: list-models, simulate, optimize, sweep, verify.

Emits trajectory and report data as CSV/JSON for external plotting; no
rendering here. Exit statuses: 0 success, 2 validation error, 3
non-convergence, 4 IO error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from .core import NonFiniteError, Trajectory, ValidationError
from . import models
from .costs import total_cost
from .models import ModelId
from .pmp import (DEFAULT_SEED, verify_adjoint_consistency,
                  verify_control_stationarity)
from .scenario import ScenarioConfig, builtin_scenario_names, find_scenario, sweep_points
from .solver import integrate_forward, solve_fbs

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NONCONVERGED = 3
EXIT_IO = 4

_MAX_CONTROL_DURATION_LEVEL = 0.99


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w") as f:
        json.dump(payload, f, indent=2)
        f.write("\n")


def _trajectory_rows(traj: Trajectory, with_adjoint: bool):
    nodes = traj.grid.nodes
    pop = traj.state.sum(axis=1)
    for i in range(traj.grid.n_nodes):
        row = [nodes[i], *traj.state[i], *traj.control[i], pop[i]]
        if with_adjoint:
            row.extend(traj.adjoint[i])
        yield row


def _trajectory_header(config: ScenarioConfig, with_adjoint: bool) -> list[str]:
    d = models.model_definition(config.model)
    header = ["t", *d.state_labels, *d.control_labels, "N"]
    if with_adjoint:
        header.extend(f"lambda_{lbl}" for lbl in d.state_labels)
    return header


def _write_trajectory(path: Path, config: ScenarioConfig, traj: Trajectory) -> None:
    with_adjoint = traj.adjoint is not None
    _write_csv(path, _trajectory_header(config, with_adjoint),
               _trajectory_rows(traj, with_adjoint))


def _constant_control_run(config: ScenarioConfig, const: np.ndarray) -> Trajectory:
    d = models.model_definition(config.model)
    control = np.tile(np.asarray(const, dtype=float), (config.grid.n_nodes, 1))
    state = integrate_forward(config.model, config.params, config.initial_state(),
                              control, config.grid)
    return Trajectory(config.grid, state, control)


def _infectious_fraction(config: ScenarioConfig, traj: Trajectory) -> np.ndarray:
    d = models.model_definition(config.model)
    inf = traj.state @ np.array(d.infectious)
    return inf / traj.state.sum(axis=1)


def cmd_list_models(args) -> int:
    for mid in ModelId:
        d = models.model_definition(mid)
        print(f"{mid.value:22s} states={d.state_dim} ({', '.join(d.state_labels)}); "
              f"controls={d.control_dim} ({', '.join(d.control_labels)}); "
              f"cost={d.cost_kind.value}; {d.description}")
    return EXIT_OK


def _parse_control_mode(mode: str, config: ScenarioConfig) -> np.ndarray:
    d = models.model_definition(config.model)
    n_nodes = config.grid.n_nodes
    if mode == "off":
        return np.zeros((n_nodes, d.control_dim))
    path = Path(mode)
    if path.exists():
        # control file: columns t, u1[, u2, ...]; linear interpolation onto the grid
        data = np.genfromtxt(path, delimiter=",", names=True)
        names = list(data.dtype.names)
        if names[0] != "t" or len(names) != d.control_dim + 1:
            raise ValidationError(
                f"control file must have columns t,{','.join(d.control_labels)}")
        t = np.asarray(data["t"], dtype=float)
        out = np.empty((n_nodes, d.control_dim))
        for k, name in enumerate(names[1:]):
            out[:, k] = np.interp(config.grid.nodes, t, np.asarray(data[name], dtype=float))
        return np.clip(out, config.weights.lower, config.weights.upper)
    try:
        values = [float(v) for v in mode.split(",")]
    except ValueError:
        raise ValidationError(
            f"control mode {mode!r} is neither 'off', a constant, nor a readable file") from None
    if len(values) == 1 and d.control_dim > 1:
        values = values * d.control_dim
    if len(values) != d.control_dim:
        raise ValidationError(f"expected {d.control_dim} constant control value(s), got {len(values)}")
    return np.tile(np.array(values), (n_nodes, 1))


def _apply_cli_overrides(config: ScenarioConfig, args) -> ScenarioConfig:
    if getattr(args, "n_steps", None):
        config = replace(config, grid=type(config.grid)(config.grid.t0, config.grid.tf,
                                                        int(args.n_steps)))
    fbs = config.fbs
    if getattr(args, "tolerance", None):
        fbs = replace(fbs, tolerance=float(args.tolerance))
    if getattr(args, "max_iterations", None):
        fbs = replace(fbs, max_iterations=int(args.max_iterations))
    if getattr(args, "relaxation", None) is not None:
        fbs = replace(fbs, relaxation=float(args.relaxation))
    return replace(config, fbs=fbs)


def cmd_simulate(args) -> int:
    config = _apply_cli_overrides(find_scenario(args.scenario), args)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    control = _parse_control_mode(args.control, config)
    state = integrate_forward(config.model, config.params, config.initial_state(),
                              control, config.grid)
    traj = Trajectory(config.grid, state, control)
    cost = total_cost(config.cost_kind, config.model, traj, config.weights)
    _write_trajectory(out / "trajectory.csv", config, traj)
    d = models.model_definition(config.model)
    _write_json(out / "summary.json", {
        "scenario": config.name,
        "model": config.model.value,
        "cost": cost,
        "terminal_time": config.grid.tf,
        "terminal_state": {lbl: state[-1, i] for i, lbl in enumerate(d.state_labels)},
        "terminal_population": float(state[-1].sum()),
    })
    print(f"simulate: wrote {out / 'trajectory.csv'} (cost={cost:.6g})")
    return EXIT_OK


def _optimize_into(config: ScenarioConfig, out: Path) -> dict:
    out.mkdir(parents=True, exist_ok=True)
    solution = solve_fbs(config)
    baseline = _constant_control_run(config, np.zeros(models.model_definition(config.model).control_dim))
    baseline_cost = total_cost(config.cost_kind, config.model, baseline, config.weights)
    _write_trajectory(out / "trajectory.csv", config, solution.trajectory)
    _write_trajectory(out / "baseline.csv", config, baseline)
    d = models.model_definition(config.model)
    _write_csv(out / "control.csv", ["t", *d.control_labels],
               ([t, *u] for t, u in zip(config.grid.nodes, solution.trajectory.control)))
    report = solution.report
    u = solution.trajectory.control
    duration = config.grid.h * int(np.sum(np.all(u > _MAX_CONTROL_DURATION_LEVEL, axis=1)))
    frac = _infectious_fraction(config, solution.trajectory)
    payload = {
        "scenario": config.name,
        "model": config.model.value,
        "converged": report.converged,
        "iterations": report.iterations,
        "cost": solution.cost,
        "baseline_cost": baseline_cost,
        "final_control_change": report.final_control_change,
        "final_adjoint_residual": report.final_adjoint_residual,
        "cost_history": list(report.cost_history),
        "duration_u_above_0.99": duration,
        "terminal_infectious_fraction": float(frac[-1]),
        "state_nonnegative": solution.trajectory.state_nonnegative,
        "message": report.message,
    }
    _write_json(out / "report.json", payload)
    return payload


def cmd_optimize(args) -> int:
    config = _apply_cli_overrides(find_scenario(args.scenario), args)
    payload = _optimize_into(config, Path(args.out_dir))
    status = "converged" if payload["converged"] else "NOT converged"
    print(f"optimize: {config.name}: {status} in {payload['iterations']} iterations, "
          f"cost={payload['cost']:.6g} (baseline {payload['baseline_cost']:.6g})")
    return EXIT_OK if payload["converged"] else EXIT_NONCONVERGED


def _sweep_worker(item):
    label, config, out_dir = item
    try:
        payload = _optimize_into(config, Path(out_dir))
        return label, payload, None
    except (ValidationError, NonFiniteError) as exc:  # per-value failures recorded
        return label, None, str(exc)


def cmd_sweep(args) -> int:
    config = _apply_cli_overrides(find_scenario(args.scenario), args)
    if config.sweep is None:
        raise ValidationError(f"scenario {config.name!r} declares no sweep")
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    points = sweep_points(config)
    tasks = [(label, sub, out / f"value-{i:02d}") for i, (label, sub) in enumerate(points)]
    results = []
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_sweep_worker, tasks))
    else:
        results = [_sweep_worker(t) for t in tasks]

    rows = []
    any_error = False
    any_nonconverged = False
    for label, payload, err in results:
        if err is not None:
            any_error = True
            rows.append([label, "", "", "", f"error: {err}"])
            continue
        if not payload["converged"]:
            any_nonconverged = True
        rows.append([label, _fmt(payload["cost"]), _fmt(payload["duration_u_above_0.99"]),
                     _fmt(payload["terminal_infectious_fraction"]),
                     "ok" if payload["converged"] else "non-converged"])
    with open(out / "sweep_summary.csv", "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["value", "cost", "duration_u_above_0.99",
                         "terminal_infectious_fraction", "status"])
        writer.writerows(rows)
    print(f"sweep: {len(results)} value(s); summary at {out / 'sweep_summary.csv'}")
    for label, payload, err in results:
        if err is not None:
            print(f"  {label}: FAILED: {err}")
        else:
            print(f"  {label}: cost={payload['cost']:.6g} "
                  f"duration(u>0.99)={payload['duration_u_above_0.99']:.4g}")
    if any_error:
        return EXIT_VALIDATION
    return EXIT_NONCONVERGED if any_nonconverged else EXIT_OK


def cmd_verify(args) -> int:
    targets = list(ModelId) if args.model == "all" else [ModelId(args.model)]
    failed = False
    for mid in targets:
        adj = verify_adjoint_consistency(mid, samples=args.samples, seed=args.seed)
        stat = verify_control_stationarity(mid, samples=args.samples, seed=args.seed)
        red_note = ""
        red_ok = True
        if models.has_baseline(mid):
            rng = np.random.default_rng(args.seed)
            p = models.default_params(mid)
            u0 = models.neutral_control(mid)
            d = models.model_definition(mid)
            worst = 0.0
            for _ in range(200):
                x = rng.uniform(1.0, 1e4, size=d.state_dim)
                a = models.dynamics(mid, 0.3, x, u0, p)
                b = models.uncontrolled_rhs(mid, 0.3, x, p)
                worst = max(worst, float(np.max(np.abs(a - b))))
            red_ok = worst == 0.0
            red_note = f" reduction={'exact' if red_ok else f'MISMATCH ({worst:g})'}"
        adj_ok = adj.max_adjoint_residual < 1e-6
        stat_ok = stat.max_stationarity_residual < 1e-10
        ok = adj_ok and stat_ok and red_ok
        failed |= not ok
        print(f"{mid.value:22s} adjoint={adj.max_adjoint_residual:.3e} "
              f"stationarity={stat.max_stationarity_residual:.3e}{red_note} "
              f"[{'ok' if ok else 'FAIL'}]")
    return EXIT_VALIDATION if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tbctrl",
        description="Optimal control of TB transmission models (forward-backward sweep).",
        epilog=("Scenario references are file paths, names under $TBCTRL_SCENARIO_DIR, "
                f"or bundled scenarios: {', '.join(builtin_scenario_names())}"))
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("list-models", help="list the model catalog")

    def add_common(sp):
        sp.add_argument("scenario", help="scenario file or bundled name")
        sp.add_argument("--out-dir", "-o", required=True, help="output directory")
        sp.add_argument("--n-steps", type=int, help="override grid resolution")
        sp.add_argument("--tolerance", type=float, help="override sweep tolerance")
        sp.add_argument("--max-iterations", type=int, help="override iteration cap")
        sp.add_argument("--relaxation", type=float, help="override control relaxation weight")

    sp = sub.add_parser("simulate", help="integrate the state under a fixed control")
    add_common(sp)
    sp.add_argument("--control", default="off",
                    help="'off', constant value(s) 'v' or 'v1,v2', or a CSV file t,u...")

    sp = sub.add_parser("optimize", help="solve the optimal control problem")
    add_common(sp)

    sp = sub.add_parser("sweep", help="optimize across the scenario's sweep values")
    add_common(sp)
    sp.add_argument("--jobs", "-j", type=int, default=1, help="worker processes")

    sp = sub.add_parser("verify", help="adjoint/control-law consistency checks")
    sp.add_argument("model", nargs="?", default="all",
                    help="model id or 'all'")
    sp.add_argument("--samples", type=int, default=100)
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "list-models": cmd_list_models,
        "simulate": cmd_simulate,
        "optimize": cmd_optimize,
        "sweep": cmd_sweep,
        "verify": cmd_verify,
    }
    try:
        return handlers[args.command](args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NonFiniteError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    except (OSError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
