"""Command-line interface.

Subcommands
-----------
* ``incoupler run [scenario] [options]``   — integrate a scenario and write
  ``timeseries.csv`` / ``summary.txt`` (and any requested snapshots) to the
  output directory.
* ``incoupler validate [options]``         — resolve and check a
  configuration (grid, calibration chain, initial state margins) without
  running it.
* ``incoupler list-scenarios``             — show the scenario registry.

Configuration precedence: scenario preset < config file < command-line
flags. Config files are flat ``key = value`` text or a JSON object; keys
are the :class:`~incoupler.params.RunConfig` field names.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from .errors import IncouplerError
from .params import RunConfig, derive, load_config_file
from .scenarios import SCENARIOS, build_initial_state, build_moments, run_scenario

__all__ = ["main", "build_parser"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="incoupler",
        description=(
            "1D Raman incoupler simulator: maps atomic-beam quantum "
            "statistics onto an optical probe."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="integrate a scenario and write outputs")
    _add_shared_options(run_p)
    run_p.add_argument(
        "--out",
        type=Path,
        default=None,
        help="output directory (default: runs/<scenario>)",
    )
    run_p.add_argument(
        "--quiet", action="store_true", help="suppress the summary printout"
    )

    val_p = sub.add_parser(
        "validate", help="check a configuration without running it"
    )
    _add_shared_options(val_p)

    sub.add_parser("list-scenarios", help="list available scenarios")
    return parser


def _add_shared_options(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "scenario",
        nargs="?",
        default=None,
        help=f"scenario name ({', '.join(SCENARIOS)})",
    )
    p.add_argument("--config", type=Path, default=None, help="config file path")
    p.add_argument("--dt", type=float, default=None, help="time step [s]")
    p.add_argument(
        "--grid-points", type=int, default=None, help="number of grid points"
    )
    p.add_argument(
        "--probe-mode",
        choices=("quasistatic", "scaledc"),
        default=None,
        help="probe transport treatment",
    )
    p.add_argument(
        "--squeezing-db", type=float, default=None, help="input squeezing [dB]"
    )
    p.add_argument("--duration", type=float, default=None, help="run duration [s]")


def _merge_config(args: argparse.Namespace) -> RunConfig:
    mapping: dict = {}
    if args.config is not None:
        mapping.update(load_config_file(args.config))
    if args.scenario is not None:
        mapping["scenario"] = args.scenario
    flag_map = {
        "dt": args.dt,
        "n_points": args.grid_points,
        "probe_mode": args.probe_mode,
        "squeezing_db": args.squeezing_db,
        "duration": args.duration,
    }
    for key, value in flag_map.items():
        if value is not None:
            mapping[key] = value
    scenario = str(mapping.get("scenario", "pulsed"))
    spec = SCENARIOS.get(scenario)
    if spec is not None:
        mapping = {**spec.overrides, **mapping}
    return RunConfig.from_mapping(mapping)


def _cmd_run(args: argparse.Namespace) -> int:
    cfg = _merge_config(args)
    out_dir = args.out if args.out is not None else Path("runs") / cfg.scenario
    result = run_scenario(cfg, out_dir)
    if not args.quiet:
        print(result.summary.to_text())
        print(f"outputs written to {out_dir}")
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    cfg = _merge_config(args)
    params = cfg.model_params()
    derived = derive(params)
    grid = cfg.grid()
    build_moments(cfg, grid)
    build_initial_state(cfg, params, derived, grid)
    print(f"scenario       : {cfg.scenario}")
    print(f"grid           : {grid.n_points} points on "
          f"[{grid.x_min:g}, {grid.x_max:g}] m (dx = {grid.dx:.4e} m)")
    print(f"dt             : {cfg.dt:g} s, probe_mode = {cfg.probe_mode}")
    print(f"v_atom         : {derived.v_atom:.6e} m/s")
    print(f"a_ho           : {derived.a_ho:.6e} m")
    print(f"t_rabi         : {derived.t_rabi:.6e} s")
    print(f"omega_c_peak   : {derived.omega_c_peak:.6f} rad/s")
    print(f"c_sim          : {derived.c_sim:.6e} m/s")
    print(f"omega23        : {derived.omega23:.6e} rad/s")
    print(f"g13            : {derived.g13:.6f}")
    if derived.gamma_sp is not None:
        print(f"gamma_sp       : {derived.gamma_sp:.6e} 1/s")
        print(f"eta_bound      : {derived.eta_bound:.6f}")
    print(f"laser tuning   : {derived.two_photon_constant:.6f} rad/s "
          f"(frame rotation {derived.frame_rotation:.6f} rad/s)")
    print("configuration OK")
    return 0


def _cmd_list(_: argparse.Namespace) -> int:
    width = max(len(name) for name in SCENARIOS)
    for name, spec in SCENARIOS.items():
        duration = (
            f"{spec.default_duration * 1e3:g} ms"
            if spec.default_duration is not None
            else "one coupling period"
        )
        print(f"{name:<{width}}  [{duration}]  {spec.description}")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "validate":
            return _cmd_validate(args)
        if args.command == "list-scenarios":
            return _cmd_list(args)
        parser.error(f"unknown command {args.command!r}")
        return 2
    except IncouplerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
