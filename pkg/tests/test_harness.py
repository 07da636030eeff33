"""Campaign runner, random baseline, sweeps, grid oracle, and exports."""

import itertools
import json
import math

import numpy as np
import pytest

from helpers import small_problem, small_system_params
from uavbsc import harness
from uavbsc.common import SolverReport
from uavbsc.config import ConfigError
from uavbsc.ga import GaConfig
from uavbsc.harness import (
    GridResult,
    SweepSpec,
    convergence_speed,
    export_solution,
    grid_oracle,
    make_solver_config,
    random_search,
    read_solution,
    run_campaign,
    run_single,
    run_sweep,
    sweep_rows,
    sweep_summary,
    write_csv,
)
from uavbsc.pso import PsoConfig


def report_with(problem, genome, last_improvement=5) -> SolverReport:
    best = problem.evaluate(genome)
    return SolverReport(solver="x", seed=0, best=best, trace=[],
                        evaluations=10,
                        last_improvement_generation=last_improvement)


# ----------------------------------------------------------------------
# Metrics and per-run plumbing
# ----------------------------------------------------------------------

def test_convergence_speed_divides_rate_by_improvement_generation():
    problem = small_problem()
    genome = problem.heuristic_mean()
    rep = report_with(problem, genome, last_improvement=5)
    assert rep.feasible
    assert convergence_speed(rep) == rep.best_objective_bps / 5.0
    # Never-improved runs divide by one instead of zero.
    assert convergence_speed(report_with(problem, genome, 0)) == \
        rep.best_objective_bps


def test_convergence_speed_is_zero_for_infeasible_runs():
    problem = small_problem()
    bad = problem.heuristic_mean()
    bad[problem.split_offset:] = 1.0
    rep = report_with(problem, bad, last_improvement=3)
    assert not rep.feasible
    assert convergence_speed(rep) == 0.0


def test_make_solver_config_applies_scenario_overrides(tiny_scenario):
    cfg = make_solver_config(tiny_scenario, "ga", seed=11, budget=500)
    assert isinstance(cfg, GaConfig)
    assert cfg.population_size == 40
    assert cfg.generations == 300
    assert cfg.stall_limit == 100
    assert cfg.seed == 11
    assert cfg.max_evaluations == 500
    ipso = make_solver_config(tiny_scenario, "ipso", seed=2)
    assert isinstance(ipso, PsoConfig)
    assert ipso.variant == "ipso"
    assert ipso.swarm_size == 40
    assert ipso.iterations == 150
    assert ipso.max_evaluations is None
    pso = make_solver_config(tiny_scenario, "pso", seed=2)
    assert pso.variant == "pso"
    assert make_solver_config(tiny_scenario, "random", seed=0) is None
    with pytest.raises(ValueError, match="unknown solver"):
        make_solver_config(tiny_scenario, "tabu", seed=0)


def test_run_single_is_replayable(tiny_scenario):
    a = run_single(tiny_scenario, "random", seed=4, budget=128)
    b = run_single(tiny_scenario, "random", seed=4, budget=128)
    assert a.to_dict(include_timing=False) == b.to_dict(include_timing=False)
    assert a.wall_clock_s > 0.0
    assert a.solver == "random"
    assert a.seed == 4
    assert a.budget == 128
    assert a.scenario_name == tiny_scenario.name
    assert a.scenario_hash == tiny_scenario.scenario_hash()
    assert "wall_clock_s" in a.to_dict()
    assert "wall_clock_s" not in a.to_dict(include_timing=False)


def test_run_single_with_callback_sees_every_record(tiny_scenario):
    seen = []
    art = run_single(tiny_scenario, "random", seed=0, budget=300,
                     callback=seen.append)
    assert [r.to_dict() for r in seen] == \
        [r.to_dict() for r in art.report.trace]


# ----------------------------------------------------------------------
# Campaigns
# ----------------------------------------------------------------------

def test_run_campaign_orders_solver_major(tiny_scenario):
    arts = run_campaign(tiny_scenario, ["random", "ipso"], seeds=[3, 1],
                        budget=200)
    assert [(a.solver, a.seed) for a in arts] == \
        [("random", 3), ("random", 1), ("ipso", 3), ("ipso", 1)]
    for art in arts:
        assert art.report.evaluations <= 200


def test_run_campaign_accepts_single_solver_name(tiny_scenario):
    arts = run_campaign(tiny_scenario, "random", seeds=[0], budget=64)
    assert len(arts) == 1
    assert arts[0].solver == "random"


def test_run_campaign_worker_count_does_not_change_results(tiny_scenario):
    serial = run_campaign(tiny_scenario, ["random", "ipso"], seeds=[0, 1],
                          budget=200, workers=1)
    parallel = run_campaign(tiny_scenario, ["random", "ipso"], seeds=[0, 1],
                            budget=200, workers=3)
    a = [x.to_dict(include_timing=False) for x in serial]
    b = [x.to_dict(include_timing=False) for x in parallel]
    assert a == b


def test_run_campaign_rejects_bad_arguments(tiny_scenario):
    with pytest.raises(ValueError, match="workers"):
        run_campaign(tiny_scenario, ["random"], seeds=[0], workers=0)
    with pytest.raises(ValueError, match="at least one solver"):
        run_campaign(tiny_scenario, [], seeds=[0])
    with pytest.raises(ValueError, match="unknown solver"):
        run_campaign(tiny_scenario, ["simplex"], seeds=[0])


# ----------------------------------------------------------------------
# Random-search baseline
# ----------------------------------------------------------------------

def test_random_search_minimal_budget():
    problem = small_problem()
    rep = random_search(problem, budget=1, seed=0)
    assert rep.evaluations == 1
    assert len(rep.trace) == 1
    assert rep.solver == "random"
    assert rep.config == {"chunk_size": 256}


def test_random_search_is_deterministic():
    problem = small_problem()
    a = random_search(problem, budget=300, seed=5)
    b = random_search(problem, budget=300, seed=5)
    assert np.array_equal(a.best.genome, b.best.genome)
    assert [t.to_dict() for t in a.trace] == [t.to_dict() for t in b.trace]


def test_random_search_longer_budget_extends_the_same_stream():
    problem = small_problem()
    short = random_search(problem, budget=256, seed=7)
    long = random_search(problem, budget=512, seed=7)
    assert short.trace[0].to_dict() == long.trace[0].to_dict()
    assert long.best.fitness <= short.best.fitness
    assert len(long.trace) == 2


def test_random_search_partial_final_chunk():
    problem = small_problem()
    rep = random_search(problem, budget=300, seed=2)
    assert rep.evaluations == 300
    assert [t.evaluations for t in rep.trace] == [256, 300]


def test_random_search_trace_is_monotone():
    problem = small_problem()
    rep = random_search(problem, budget=1024, seed=3)
    best = [t.best_fitness for t in rep.trace]
    assert all(b <= a for a, b in zip(best, best[1:]))
    assert 1 <= rep.last_improvement_generation <= len(rep.trace)


def test_random_search_rejects_bad_arguments():
    problem = small_problem()
    with pytest.raises(ValueError, match="budget"):
        random_search(problem, budget=0)
    with pytest.raises(ValueError, match="chunk_size"):
        random_search(problem, budget=10, chunk_size=0)


# ----------------------------------------------------------------------
# Sweeps
# ----------------------------------------------------------------------

def test_sweep_spec_validation():
    with pytest.raises(ValueError, match="parameter"):
        SweepSpec(parameter="", values=[1])
    with pytest.raises(ValueError, match="at least one value"):
        SweepSpec(parameter="x", values=[])
    with pytest.raises(ValueError, match="at least one seed"):
        SweepSpec(parameter="x", values=[1], seeds=[])
    with pytest.raises(ValueError, match="unknown solver"):
        SweepSpec(parameter="x", values=[1], solvers=["nope"])
    spec = SweepSpec(parameter="x", values=[1], solvers="random")
    assert spec.solvers == ["random"]


def test_run_sweep_isolates_bad_values(tiny_scenario):
    spec = SweepSpec(parameter="system.slot_count", values=[2, 0],
                     solvers=["random"], seeds=[0], budget=64)
    points = run_sweep(tiny_scenario, spec)
    assert len(points) == 2
    good, bad = points
    assert good.error is None
    assert len(good.artifacts) == 1
    assert bad.error is not None
    assert "slot_count" in bad.error
    assert bad.artifacts == []


def test_sweep_point_medians_count_infeasible_as_zero(tiny_scenario):
    spec = SweepSpec(parameter="system.demanded_rate_bps",
                     values=[2.0e7, 1.0e15], solvers=["random"],
                     seeds=[0, 1, 2], budget=128)
    points = run_sweep(tiny_scenario, spec)
    assert points[0].median_rate_bps() > 0.0
    # No mission can deliver 1e15 bit/s, so every seed is infeasible and
    # the median must be exactly zero, not missing.
    assert all(not a.report.feasible for a in points[1].artifacts)
    assert points[1].median_rate_bps() == 0.0
    rows = sweep_summary(points)
    assert [r["solver"] for r in rows] == ["random", "random"]
    assert rows[0]["feasible_runs"] == 3
    assert rows[1]["feasible_runs"] == 0
    assert rows[1]["median_rate_bps"] == 0.0


def test_sweep_rows_shape_and_timing_column(tiny_scenario):
    spec = SweepSpec(parameter="system.slot_count", values=[2, 0],
                     solvers=["random"], seeds=[0, 1], budget=64)
    points = run_sweep(tiny_scenario, spec)
    rows = sweep_rows(points)
    # Two runs for the good value, one error row for the bad one.
    assert len(rows) == 3
    assert all("wall_clock_s" in r for r in rows)
    assert rows[0]["solver"] == "random"
    assert rows[2]["error"] != ""
    assert rows[2]["seed"] == ""
    bare = sweep_rows(points, include_timing=False)
    assert all("wall_clock_s" not in r for r in bare)
    stripped = [{k: v for k, v in r.items() if k != "wall_clock_s"}
                for r in rows]
    assert bare == stripped


def test_sweep_summary_error_rows(tiny_scenario):
    spec = SweepSpec(parameter="system.slot_count", values=[0],
                     solvers=["random"], seeds=[0], budget=16)
    rows = sweep_summary(run_sweep(tiny_scenario, spec))
    assert len(rows) == 1
    assert rows[0]["runs"] == 0
    assert rows[0]["error"] != ""


def test_write_csv_round_trip(tmp_path):
    rows = [{"a": 1, "b": "x"}, {"a": 2, "b": "y"}]
    path = tmp_path / "rows.csv"
    write_csv(path, rows)
    lines = path.read_text(encoding="utf-8").strip().splitlines()
    assert lines == ["a,b", "1,x", "2,y"]
    empty = tmp_path / "empty.csv"
    write_csv(empty, [])
    assert empty.read_text(encoding="utf-8") == ""


# ----------------------------------------------------------------------
# Grid oracle
# ----------------------------------------------------------------------

def test_grid_resolution_one_probes_the_center(tiny_problem):
    result = grid_oracle(tiny_problem, resolution=1)
    assert result.points_evaluated == 1
    free = result.free_gene_indices
    assert free == [0, 1, 3, 4]  # altitude gene 2 is frozen
    assert all(result.genome[g] == 0.5 for g in free)
    direct = tiny_problem.evaluate(tiny_problem.adjust(
        np.full(tiny_problem.genome_size, 0.5)))
    assert result.fitness == direct.fitness


def test_grid_enumerates_single_free_gene():
    problem = small_problem(small_system_params(slot_count=1,
                                                mission_time_s=16.0))
    assert problem.genome_size == 1
    result = grid_oracle(problem, resolution=5)
    assert result.points_evaluated == 5
    levels = np.linspace(0.0, 1.0, 5)
    fits = [problem.evaluate(np.array([v])).fitness for v in levels]
    assert result.fitness == min(fits)
    assert result.genome[0] == levels[int(np.argmin(fits))]


def test_grid_matches_exhaustive_product_enumeration(tiny_problem):
    resolution = 3
    result = grid_oracle(tiny_problem, resolution=resolution, chunk_size=17)
    frozen = set(tiny_problem.frozen_gene_indices())
    free = [g for g in range(tiny_problem.genome_size) if g not in frozen]
    levels = np.linspace(0.0, 1.0, resolution)
    best_fit = math.inf
    best_worst = math.inf
    best_genome = None
    count = 0
    for combo in itertools.product(levels, repeat=len(free)):
        genome = np.full(tiny_problem.genome_size, 0.5)
        genome[free] = combo
        genome = tiny_problem.adjust(genome)
        sol = tiny_problem.evaluate(genome)
        worst = sol.report.worst_violation
        if sol.fitness < best_fit or (
            sol.fitness == best_fit and worst < best_worst
        ):
            best_fit = sol.fitness
            best_worst = worst
            best_genome = genome
        count += 1
    assert result.points_evaluated == count == resolution ** len(free)
    assert result.fitness == best_fit
    assert np.array_equal(result.genome, best_genome)
    d = result.to_dict()
    assert d["points_evaluated"] == count
    assert d["free_gene_indices"] == free


def test_grid_result_is_chunk_size_invariant(tiny_problem):
    a = grid_oracle(tiny_problem, resolution=3, chunk_size=7)
    b = grid_oracle(tiny_problem, resolution=3, chunk_size=4096)
    assert np.array_equal(a.genome, b.genome)
    assert a.fitness == b.fitness


def test_grid_guards(reference_problem, tiny_problem):
    with pytest.raises(ValueError, match="slots"):
        grid_oracle(reference_problem, resolution=3)
    with pytest.raises(ValueError, match="exceeds"):
        grid_oracle(tiny_problem, resolution=100)   # 100^4 points
    with pytest.raises(ValueError, match="resolution"):
        grid_oracle(tiny_problem, resolution=0)


# ----------------------------------------------------------------------
# Export and import
# ----------------------------------------------------------------------

def test_export_solution_files_and_round_trip(tiny_problem, tmp_path):
    genome = tiny_problem.heuristic_mean()
    sol_path, csv_path = export_solution(
        tiny_problem, genome, tmp_path, meta={"note": "demo"})
    assert sol_path.name == "solution.json"
    assert csv_path.name == "trajectory.csv"

    loaded = read_solution(sol_path)
    assert np.allclose(loaded["genome"], genome, rtol=0, atol=1e-15)
    again = tiny_problem.evaluate(loaded["genome"])
    assert again.fitness == loaded["data"]["fitness"]
    assert loaded["data"]["meta"] == {"note": "demo"}

    lines = csv_path.read_text(encoding="utf-8").strip().splitlines()
    n = tiny_problem.n_slots
    assert len(lines) == 1 + n + 1  # header + one row per waypoint
    header = lines[0].split(",")
    last = lines[-1].split(",")
    # The final waypoint starts no slot, so its slot columns are empty.
    for col in ("time_split", "speed_mps", "uplink_rate_bps",
                "downlink_rate_bps", "harvested_j", "consumed_j"):
        assert last[header.index(col)] == ""


def test_exported_rates_sum_to_the_objective(tiny_problem, tmp_path):
    genome = tiny_problem.heuristic_mean()
    _, csv_path = export_solution(tiny_problem, genome, tmp_path)
    lines = csv_path.read_text(encoding="utf-8").strip().splitlines()
    header = lines[0].split(",")
    col = header.index("downlink_rate_bps")
    total = sum(float(line.split(",")[col])
                for line in lines[1:-1])
    expected = tiny_problem.evaluate(genome).objective_bps
    assert total == pytest.approx(expected, rel=1e-9)


def test_read_solution_accepts_run_artifacts(tiny_scenario, tmp_path):
    art = run_single(tiny_scenario, "random", seed=0, budget=64)
    path = tmp_path / "artifact.json"
    path.write_text(json.dumps(art.to_dict()), encoding="utf-8")
    loaded = read_solution(path)
    assert np.allclose(loaded["genome"], art.report.best.genome,
                       rtol=0, atol=1e-15)


def test_read_solution_rejects_unrecognized_documents(tmp_path):
    path = tmp_path / "mystery.json"
    path.write_text(json.dumps({"hello": 1}), encoding="utf-8")
    with pytest.raises(ValueError) as err:
        read_solution(path)
    assert "mystery.json" in str(err.value)
