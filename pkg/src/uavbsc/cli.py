"""Command-line benchmark harness.

Subcommands
-----------
run       one solver on one scenario (artifact JSON via --out)
sweep     a parameter sweep: CSV rows + median summary + artifact JSON
oracle    exhaustive grid enumeration for tiny scenarios
baseline  seeded uniform random search
export    solution.json + trajectory.csv for a finished run

Errors are reported as a one-line JSON object on stderr; exit codes are
2 for usage errors, 3 for scenario/config errors, 4 for execution
failures.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import ConfigError, ScenarioConfig
from .harness import (
    RANDOM_DEFAULT_BUDGET,
    SOLVER_NAMES,
    SweepSpec,
    campaign_to_dict,
    export_solution,
    grid_oracle,
    read_solution,
    run_single,
    run_sweep,
    sweep_rows,
    sweep_summary,
    write_csv,
)

__all__ = ["main"]

EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_EXECUTION = 4


class _CliError(Exception):
    def __init__(self, code: int, category: str, message: str) -> None:
        super().__init__(message)
        self.code = code
        self.category = category


class _Parser(argparse.ArgumentParser):
    """Argparse that reports usage problems as JSON instead of exiting."""

    def error(self, message):  # noqa: D102 - argparse hook
        raise _CliError(EXIT_USAGE, "usage", message)


def _emit_error(category: str, message: str) -> None:
    sys.stderr.write(
        json.dumps({"error": {"category": category, "message": message}})
        + "\n")


def _parse_int_list(text: str, flag: str) -> list:
    try:
        return [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError as exc:
        raise _CliError(
            EXIT_USAGE, "usage",
            f"{flag} expects comma-separated integers (got {text!r})") from exc


def _parse_value_list(text: str) -> list:
    values = []
    for part in text.split(","):
        part = part.strip()
        if part == "":
            continue
        try:
            values.append(json.loads(part))
        except json.JSONDecodeError:
            values.append(part)
    if not values:
        raise _CliError(EXIT_USAGE, "usage", "--values must list at least one value")
    return values


def build_parser() -> _Parser:
    parser = _Parser(prog="uavbsc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    def add_common(p):
        p.add_argument("--config", required=True, help="scenario JSON file")

    p_run = sub.add_parser("run", help="run one solver on one scenario")
    add_common(p_run)
    p_run.add_argument("--solver", choices=SOLVER_NAMES, default="ipso")
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--budget", type=int, default=None,
                       help="cap on objective evaluations")
    p_run.add_argument("--out", default=None, help="artifact JSON path")
    p_run.add_argument("--no-timing", action="store_true",
                       help="omit wall-clock fields from the artifact")

    p_sweep = sub.add_parser("sweep", help="sweep one scenario parameter")
    add_common(p_sweep)
    p_sweep.add_argument("--param", required=True,
                         help="dotted path into the scenario, e.g. system.wpt_power_db")
    p_sweep.add_argument("--values", required=True,
                         help="comma-separated values, e.g. 24,27,30,33,36")
    p_sweep.add_argument("--solver", default="ipso",
                         help="solver name or comma-separated list "
                              f"(choices: {', '.join(SOLVER_NAMES)})")
    p_sweep.add_argument("--seeds", default="0,1,2",
                         help="comma-separated seeds (default 0,1,2)")
    p_sweep.add_argument("--budget", type=int, default=None)
    p_sweep.add_argument("--workers", type=int, default=1)
    p_sweep.add_argument("--out", required=True, help="output directory")
    p_sweep.add_argument("--no-timing", action="store_true")

    p_oracle = sub.add_parser(
        "oracle", help="exhaustively enumerate a tiny scenario's grid")
    add_common(p_oracle)
    p_oracle.add_argument("--resolution", type=int, required=True,
                          help="grid levels per free gene")
    p_oracle.add_argument("--out", default=None, help="result JSON path")

    p_base = sub.add_parser("baseline", help="seeded uniform random search")
    add_common(p_base)
    p_base.add_argument("--seed", type=int, default=0)
    p_base.add_argument("--budget", type=int, default=RANDOM_DEFAULT_BUDGET)
    p_base.add_argument("--out", default=None, help="artifact JSON path")
    p_base.add_argument("--no-timing", action="store_true")

    p_export = sub.add_parser(
        "export", help="write solution.json and trajectory.csv for a run")
    add_common(p_export)
    p_export.add_argument("--solution", required=True, dest="solution",
                          help="run artifact or solution JSON")
    p_export.add_argument("--out", required=True, help="output directory")

    return parser


def _cmd_run(args) -> int:
    scenario = ScenarioConfig.load(args.config)
    artifact = run_single(scenario, args.solver, args.seed, budget=args.budget)
    if args.out:
        Path(args.out).write_text(
            json.dumps(artifact.to_dict(include_timing=not args.no_timing),
                       indent=2, sort_keys=True) + "\n",
            encoding="utf-8")
    rep = artifact.report
    print(
        f"run scenario={scenario.name} solver={artifact.solver} "
        f"seed={artifact.seed} feasible={rep.feasible} "
        f"rate_bps={rep.best_objective_bps:.6g} "
        f"evaluations={rep.evaluations} wall_s={artifact.wall_clock_s:.3f}")
    return 0


def _cmd_sweep(args) -> int:
    scenario = ScenarioConfig.load(args.config)
    solvers = [s.strip() for s in args.solver.split(",") if s.strip()]
    for name in solvers:
        if name not in SOLVER_NAMES:
            raise _CliError(
                EXIT_USAGE, "usage",
                f"unknown solver {name!r}; choices: {', '.join(SOLVER_NAMES)}")
    seeds = _parse_int_list(args.seeds, "--seeds")
    if not seeds:
        raise _CliError(EXIT_USAGE, "usage", "--seeds must list at least one seed")
    if args.workers < 1:
        raise _CliError(EXIT_USAGE, "usage", "--workers must be at least 1")
    spec = SweepSpec(
        parameter=args.param,
        values=_parse_value_list(args.values),
        solvers=solvers,
        seeds=seeds,
        budget=args.budget,
    )
    points = run_sweep(scenario, spec, workers=args.workers)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    include_timing = not args.no_timing
    write_csv(out_dir / "sweep_rows.csv",
              sweep_rows(points, include_timing=include_timing))
    write_csv(out_dir / "sweep_summary.csv", sweep_summary(points))
    dump = {
        "scenario": scenario.name,
        "scenario_hash": scenario.scenario_hash(),
        "parameter": spec.parameter,
        "solvers": list(spec.solvers),
        "seeds": [int(s) for s in spec.seeds],
        "budget": spec.budget,
        "points": [
            {
                "value": point.value,
                "error": point.error,
                **campaign_to_dict(point.artifacts,
                                   include_timing=include_timing),
            }
            for point in points
        ],
    }
    (out_dir / "sweep.json").write_text(
        json.dumps(dump, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    for row in sweep_summary(points):
        if row["error"]:
            print(f"sweep {spec.parameter}={row['value']} error={row['error']}")
        else:
            print(
                f"sweep {spec.parameter}={row['value']} solver={row['solver']} "
                f"median_rate_bps={row['median_rate_bps']:.6g} "
                f"feasible={row['feasible_runs']}/{row['runs']}")
    return 0


def _cmd_oracle(args) -> int:
    scenario = ScenarioConfig.load(args.config)
    problem = scenario.build_problem()
    result = grid_oracle(problem, args.resolution)
    if args.out:
        payload = {
            "scenario": scenario.name,
            "scenario_hash": scenario.scenario_hash(),
            **result.to_dict(),
        }
        Path(args.out).write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n",
            encoding="utf-8")
    print(
        f"oracle scenario={scenario.name} resolution={result.resolution} "
        f"points={result.points_evaluated} feasible={result.feasible} "
        f"rate_bps={result.objective_bps:.6g}")
    return 0


def _cmd_baseline(args) -> int:
    scenario = ScenarioConfig.load(args.config)
    artifact = run_single(scenario, "random", args.seed, budget=args.budget)
    if args.out:
        Path(args.out).write_text(
            json.dumps(artifact.to_dict(include_timing=not args.no_timing),
                       indent=2, sort_keys=True) + "\n",
            encoding="utf-8")
    rep = artifact.report
    print(
        f"baseline scenario={scenario.name} seed={artifact.seed} "
        f"budget={artifact.budget} feasible={rep.feasible} "
        f"rate_bps={rep.best_objective_bps:.6g}")
    return 0


def _cmd_export(args) -> int:
    scenario = ScenarioConfig.load(args.config)
    problem = scenario.build_problem()
    loaded = read_solution(args.solution)
    meta = {
        "source_file": str(args.solution),
        "scenario_name": scenario.name,
        "scenario_hash": scenario.scenario_hash(),
    }
    for key in ("solver", "seed", "scenario_hash"):
        if key in loaded["data"]:
            meta[key] = loaded["data"][key]
    solution_path, csv_path = export_solution(
        problem, loaded["genome"], args.out, meta=meta)
    print(f"export wrote {solution_path} and {csv_path}")
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "sweep": _cmd_sweep,
    "oracle": _cmd_oracle,
    "baseline": _cmd_baseline,
    "export": _cmd_export,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _CliError as exc:
        _emit_error(exc.category, str(exc))
        return exc.code
    except ConfigError as exc:
        _emit_error("config", str(exc))
        return EXIT_CONFIG
    except (ValueError, OSError) as exc:
        _emit_error("execution", str(exc))
        return EXIT_EXECUTION


if __name__ == "__main__":
    sys.exit(main())
