"""Batch entry points and all file input/output.

Three subcommands: `verify` runs the identity suite across a resolution
ladder and writes verify.json; `simulate` runs one configured trajectory
and writes manifest.json, energy.csv, and state snapshots; `report`
summarizes a finished run directory into report.json plus a plot-ready
long-format series.csv.

Exit codes: 0 success, 1 tolerance failure or aborted run, 2 unusable
configuration or missing files.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .energetics import MomentumState, VelocityState
from .forms import DiscreteForm, Grid
from .simulator import ConfigError, SimConfig, SimulationResult, build_grid, simulate
from .verification import run_suite

ENERGY_COLUMNS = (
    "step",
    "t",
    "H_k",
    "dH_dt",
    "P_boundary",
    "P_distributed",
    "residual",
    "mass_total",
    "max_vorticity",
)

_FAMILIES = {
    "periodic": (True, True),
    "bounded": (False, False),
    "channel": (False, True),
}


def _fmt(value: float) -> str:
    return "%.17g" % value


def _now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


def _load_json(path: Path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


def _hex_grid(values: np.ndarray) -> list[list[str]]:
    return [[float(v).hex() for v in row] for row in np.asarray(values)]


def _unhex_grid(rows: list[list[str]]) -> np.ndarray:
    return np.array([[float.fromhex(v) for v in row] for row in rows])


def save_state(path: Path, step: int, t: float, state, representation: str) -> None:
    """Serialize a state snapshot with bitwise-exact hex floats."""
    flow, mass = state
    grid = flow.grid
    payload = {
        "step": step,
        "t": _fmt(t),
        "representation": representation,
        "grid": {
            "extents": [_fmt(e) for e in grid.extents],
            "resolution": list(grid.resolution),
            "periodic": list(grid.periodic),
            "metric": [_fmt(m) for m in grid.metric],
        },
        "flow": {
            "dx": _hex_grid(flow.components[0]),
            "dy": _hex_grid(flow.components[1]),
        },
        "mass": _hex_grid(mass.components[0]),
    }
    _write_json(path, payload)


def load_state(path: Path):
    """Reload a snapshot; inverse of save_state, bitwise."""
    raw = _load_json(path)
    g = raw["grid"]
    grid = Grid(
        extents=tuple(float(e) for e in g["extents"]),
        resolution=tuple(int(n) for n in g["resolution"]),
        periodic=tuple(bool(b) for b in g["periodic"]),
        metric=tuple(float(m) for m in g["metric"]),
    )
    flow = DiscreteForm(
        grid, 1, (_unhex_grid(raw["flow"]["dx"]), _unhex_grid(raw["flow"]["dy"]))
    )
    mass = DiscreteForm(grid, 2, (_unhex_grid(raw["mass"]),))
    cls = MomentumState if raw["representation"] == "momentum" else VelocityState
    return raw["step"], float(raw["t"]), cls(flow, mass)


def _suite_payload(suite) -> dict:
    return {
        "family": suite.family,
        "periodic": list(suite.periodic),
        "passed": suite.passed,
        "identities": [
            {
                "name": item.name,
                "defects": {str(n): item.defects[n] for n in sorted(item.defects)},
                "classification": item.classification,
                "fitted_order": item.fitted_order,
                "tolerance": item.tolerance,
                "passed": item.passed,
            }
            for item in suite.identities
        ],
    }


def cmd_verify(args: argparse.Namespace) -> int:
    config = {}
    if args.config is not None:
        config = _load_json(Path(args.config))
        if not isinstance(config, dict):
            raise ConfigError("verify configuration must be a JSON object")
    resolutions = config.get("resolutions", [32, 64, 128])
    if args.resolutions:
        resolutions = [int(part) for part in args.resolutions.split(",")]
    try:
        resolutions = [int(n) for n in resolutions]
    except (TypeError, ValueError) as exc:
        raise ConfigError("resolutions must be integers") from exc
    if not resolutions or any(n < 8 for n in resolutions):
        raise ConfigError("resolutions must be at least 8")
    family_names = config.get("families", ["periodic", "bounded"])
    unknown = [f for f in family_names if f not in _FAMILIES]
    if unknown:
        raise ConfigError(f"unknown families {unknown}; choose from {sorted(_FAMILIES)}")
    extents = config.get("extents", [2.0 * np.pi, 2.0 * np.pi])
    metric = config.get("metric", [1.0, 1.0])
    seed = int(config.get("seed", 2024))

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    suites = []
    for name in family_names:
        suites.append(
            run_suite(
                periodic=_FAMILIES[name],
                resolutions=resolutions,
                extents=tuple(float(e) for e in extents),
                metric=tuple(float(m) for m in metric),
                seed=seed,
                family=name,
            )
        )
    payload = {
        "version": __version__,
        "seed": seed,
        "resolutions": resolutions,
        "families": [_suite_payload(s) for s in suites],
        "passed": all(s.passed for s in suites),
    }
    _write_json(out_dir / "verify.json", payload)

    failures = [
        f"{suite.family}:{item.name}"
        for suite in suites
        for item in suite.identities
        if not item.passed
    ]
    if failures:
        print("identity suite failures:", file=sys.stderr)
        for name in failures:
            print(f"  {name}", file=sys.stderr)
        return 1
    print(f"identity suite passed ({len(suites)} families, resolutions {resolutions})")
    return 0


def _manifest_payload(
    config: SimConfig,
    out_names: dict,
    status: str,
    started: str,
    finished: str | None = None,
    result: SimulationResult | None = None,
) -> dict:
    payload = {
        "version": __version__,
        "config": config.to_dict(),
        "seed": config.seed,
        "status": status,
        "started": started,
        "finished": finished,
        "outputs": out_names,
    }
    if result is not None:
        payload["completed_steps"] = result.completed_steps
        payload["aborted"] = result.aborted
        payload["abort_reason"] = result.abort_reason
    return payload


def write_energy_csv(path: Path, result: SimulationResult) -> None:
    report = result.report
    steps = np.arange(report.time.size)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(ENERGY_COLUMNS)
        for i in range(report.time.size):
            writer.writerow(
                [
                    int(steps[i]),
                    _fmt(report.time[i]),
                    _fmt(report.energy[i]),
                    _fmt(report.energy_rate[i]),
                    _fmt(report.boundary_power[i]),
                    _fmt(report.distributed_power[i]),
                    _fmt(report.residual[i]),
                    _fmt(result.mass_total[i]),
                    _fmt(result.max_vorticity[i]),
                ]
            )


def cmd_simulate(args: argparse.Namespace) -> int:
    raw = _load_json(Path(args.config))
    config = SimConfig.from_dict(raw)
    build_grid(config)  # surface grid errors before any output
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    planned_snapshots = sorted(
        {s for s in range(0, config.steps + 1, config.output_stride)} | {config.steps}
    )
    out_names = {
        "manifest": "manifest.json",
        "energy": "energy.csv",
        "snapshots": [f"state_{s}.json" for s in planned_snapshots],
    }
    started = _now()
    _write_json(
        out_dir / "manifest.json",
        _manifest_payload(config, out_names, "running", started),
    )

    result = simulate(config)

    write_energy_csv(out_dir / "energy.csv", result)
    written = []
    for step, state in result.snapshots:
        name = f"state_{step}.json"
        save_state(
            out_dir / name,
            step,
            float(step) * config.dt,
            state,
            config.representation,
        )
        written.append(name)
    out_names["snapshots"] = written

    status = "aborted" if result.aborted else "completed"
    _write_json(
        out_dir / "manifest.json",
        _manifest_payload(config, out_names, status, started, _now(), result),
    )
    if result.aborted:
        print(
            f"run aborted at step {result.completed_steps + 1}: {result.abort_reason}",
            file=sys.stderr,
        )
        return 1
    print(
        f"completed {result.completed_steps} steps; wrote {len(written)} snapshots to {out_dir}"
    )
    return 0


def read_energy_csv(path: Path) -> dict[str, np.ndarray]:
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        if tuple(header) != ENERGY_COLUMNS:
            raise ConfigError(f"{path} has unexpected columns {header}")
        rows = [[float(cell) for cell in row] for row in reader]
    data = np.array(rows) if rows else np.zeros((0, len(ENERGY_COLUMNS)))
    return {name: data[:, i] for i, name in enumerate(ENERGY_COLUMNS)}


def cmd_report(args: argparse.Namespace) -> int:
    run_dir = Path(args.run_dir)
    manifest_path = run_dir / "manifest.json"
    energy_path = run_dir / "energy.csv"
    if not manifest_path.is_file() or not energy_path.is_file():
        raise ConfigError(f"{run_dir} does not contain manifest.json and energy.csv")
    manifest = _load_json(manifest_path)
    series = read_energy_csv(energy_path)
    if series["step"].size == 0:
        raise ConfigError(f"{energy_path} contains no rows")

    tolerances = {
        "balance_residual_rel": 1e-5,
        "energy_drift_rel": 1e-6,
        "mass_drift_rel": 1e-10,
    }
    config = manifest.get("config", {})
    tolerances.update(manifest.get("tolerances", {}))
    forced = config.get("force", {}).get("kind", "zero") != "zero"

    h0 = float(series["H_k"][0])
    scale = max(abs(h0), 1e-30)
    residual_max = float(np.max(np.abs(series["residual"])))
    residual_mean = float(np.mean(np.abs(series["residual"])))
    energy_drift = float(abs(series["H_k"][-1] - h0)) / scale
    mass0 = float(series["mass_total"][0])
    mass_drift = float(np.max(np.abs(series["mass_total"] - mass0))) / max(
        abs(mass0), 1e-30
    )

    aborted = manifest.get("status") == "aborted"
    checks = {
        "balance_residual": residual_max <= tolerances["balance_residual_rel"] * scale,
        "mass_drift": mass_drift <= tolerances["mass_drift_rel"],
        "not_aborted": not aborted,
    }
    if not forced:
        checks["energy_drift"] = energy_drift <= tolerances["energy_drift_rel"]
    passed = all(checks.values())
    reason = None
    if aborted:
        reason = manifest.get("abort_reason") or "aborted"
    elif not passed:
        reason = "tolerance exceeded: " + ", ".join(
            name for name, ok in checks.items() if not ok
        )

    payload = {
        "passed": bool(passed),
        "reason": reason,
        "aborted": bool(aborted),
        "steps": int(series["step"][-1]),
        "energy_initial": h0,
        "energy_final": float(series["H_k"][-1]),
        "energy_drift_rel": energy_drift,
        "mass_drift_rel": mass_drift,
        "residual_max": residual_max,
        "residual_mean": residual_mean,
        "checks": checks,
        "tolerances": tolerances,
    }
    _write_json(run_dir / "report.json", payload)

    with open(run_dir / "series.csv", "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["step", "t", "series", "value"])
        for name in ENERGY_COLUMNS[2:]:
            for i in range(series["step"].size):
                writer.writerow(
                    [
                        int(series["step"][i]),
                        _fmt(series["t"][i]),
                        name,
                        _fmt(series[name][i]),
                    ]
                )
    print(f"report {'pass' if passed else 'FAIL'}: {run_dir / 'report.json'}")
    return 0 if passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phfluid",
        description="Structure-verified batch simulator for compressible-flow "
        "kinetic energy transport on staggered-free collocated grids.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="run the identity suite")
    p_verify.add_argument("config", nargs="?", help="optional verify config JSON")
    p_verify.add_argument(
        "--resolutions", help="comma-separated grid sizes, e.g. 32,64,128"
    )
    p_verify.add_argument("--out", default=".", help="output directory")
    p_verify.set_defaults(func=cmd_verify)

    p_sim = sub.add_parser("simulate", help="run one configured trajectory")
    p_sim.add_argument("config", help="simulation config JSON")
    p_sim.add_argument("--out", default=".", help="output directory")
    p_sim.set_defaults(func=cmd_simulate)

    p_rep = sub.add_parser("report", help="summarize a finished run directory")
    p_rep.add_argument("run_dir", help="directory with manifest.json and energy.csv")
    p_rep.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
