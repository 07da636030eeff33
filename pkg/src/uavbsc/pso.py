"""Particle swarm optimization with an improved variant over the genome.

The improved variant ("ipso") decays the inertia weight along a square-root
schedule and adds a Gaussian mutation pass that every particle except the
current global-best holder may receive, restoring exploration late in the
run.  The plain variant ("pso") keeps a constant inertia weight and never
mutates.  Fitness is minimized; all draws come from one seeded generator
in a fixed order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .common import (
    STALL_TOL,
    GenerationRecord,
    ProgressCallback,
    SolverReport,
    config_snapshot,
    masked_gaussian_offsets,
    resolve_init_mean,
    sample_initial_genes,
)
from .encoding import LinkProblem

__all__ = [
    "IPSO_MUTATION_VARIANCE",
    "PsoConfig",
    "inertia_at",
    "init_positions",
    "update_velocity",
    "update_position",
    "ipso_mutate",
    "run",
]

# Variance of the improved variant's Gaussian mutation step.
IPSO_MUTATION_VARIANCE = 0.1


@dataclass
class PsoConfig:
    """Hyperparameters of the particle swarm solver."""

    variant: str = "ipso"           # "ipso" (decaying inertia + mutation) or "pso"
    swarm_size: int = 100
    iterations: int = 500
    cognitive_coeff: float = 1.5    # pull toward the particle's own best
    social_coeff: float = 1.5       # pull toward the global best
    inertia_max: float = 0.9        # schedule start (improved variant)
    inertia_min: float = 0.1        # schedule end (improved variant)
    inertia_exponent: float = 0.5   # schedule curvature
    inertia_const: float = 0.9      # constant weight (plain variant): the
    # schedule's starting value held fixed, so the improved variant differs
    # from the baseline only by the decay and the mutation pass
    mutation_prob: float = 0.1      # per-gene mutation probability (improved)
    velocity_clamp: Optional[float] = None  # per-gene |velocity| cap, off when None
    init_std: float = 0.2
    init_mean: Optional[object] = None
    seed: int = 0
    max_evaluations: Optional[int] = None

    def __post_init__(self) -> None:
        problems = []
        if self.variant not in ("ipso", "pso"):
            problems.append(f"variant must be 'ipso' or 'pso' (got {self.variant!r})")
        if self.swarm_size < 2:
            problems.append("swarm_size must be at least 2")
        if self.iterations < 1:
            problems.append("iterations must be at least 1")
        for name in ("cognitive_coeff", "social_coeff"):
            if getattr(self, name) < 0.0:
                problems.append(f"{name} must be nonnegative")
        if self.inertia_max < self.inertia_min:
            problems.append("inertia_max must be at least inertia_min")
        if self.inertia_exponent <= 0.0:
            problems.append("inertia_exponent must be positive")
        if not 0.0 <= self.mutation_prob <= 1.0:
            problems.append("mutation_prob must lie in [0, 1]")
        if self.velocity_clamp is not None and self.velocity_clamp <= 0.0:
            problems.append("velocity_clamp must be positive when set")
        if self.init_std < 0.0:
            problems.append("init_std must be nonnegative")
        if self.max_evaluations is not None and self.max_evaluations < 1:
            problems.append("max_evaluations must be positive when set")
        if problems:
            raise ValueError("invalid PSO config: " + "; ".join(problems))

    @property
    def mutation_active(self) -> bool:
        return self.variant == "ipso" and self.mutation_prob > 0.0


def inertia_at(step: int, total: int, cfg: PsoConfig) -> float:
    """Inertia weight used after ``step`` of ``total`` iterations.

    The improved variant decays from ``inertia_max`` at step 0 to
    ``inertia_min`` at the final step along a power-law schedule; the
    plain variant returns the constant weight.
    """
    if total < 1:
        raise ValueError("total iteration count must be at least 1")
    if not 0 <= step <= total:
        raise ValueError(f"step {step} out of range 0..{total}")
    if cfg.variant == "pso":
        return cfg.inertia_const
    if step == total:
        # The subtraction form below lands within rounding error of
        # inertia_min here; return the endpoint itself so both schedule
        # boundaries are exact.
        return cfg.inertia_min
    frac = (step / total) ** cfg.inertia_exponent
    return cfg.inertia_max - (cfg.inertia_max - cfg.inertia_min) * frac


def init_positions(cfg: PsoConfig, problem: LinkProblem,
                   rng: np.random.Generator) -> np.ndarray:
    """Gaussian-initialized particle positions, adjusted into the box."""
    mean = resolve_init_mean(cfg.init_mean, problem)
    raw = sample_initial_genes(
        rng, cfg.swarm_size, problem.genome_size, mean, cfg.init_std)
    return problem.adjust(raw)


def update_velocity(position, velocity, personal_best, global_best,
                    inertia: float, cfg: PsoConfig,
                    rng: np.random.Generator) -> np.ndarray:
    """Velocity update with fresh per-gene uniform draws.

    Works on a single particle (dim,) or the whole swarm (S, dim); the
    global best broadcasts.  The optional velocity clamp is applied last.
    """
    x = np.asarray(position, dtype=np.float64)
    v = np.asarray(velocity, dtype=np.float64)
    pull_own = rng.uniform(size=x.shape)
    pull_global = rng.uniform(size=x.shape)
    new_v = (
        inertia * v
        + cfg.cognitive_coeff * pull_own * (np.asarray(personal_best) - x)
        + cfg.social_coeff * pull_global * (np.asarray(global_best) - x)
    )
    if cfg.velocity_clamp is not None:
        new_v = np.clip(new_v, -cfg.velocity_clamp, cfg.velocity_clamp)
    return new_v


def update_position(position, velocity) -> np.ndarray:
    """Move a particle and clamp it back into the unit box."""
    x = np.asarray(position, dtype=np.float64)
    v = np.asarray(velocity, dtype=np.float64)
    return np.clip(x + v, 0.0, 1.0)


def ipso_mutate(position, cfg: PsoConfig, rng: np.random.Generator) -> np.ndarray:
    """Per-gene Gaussian mutation of the improved variant.

    A no-op (consuming no randomness) for the plain variant or when the
    mutation probability is zero.
    """
    x = np.asarray(position, dtype=np.float64)
    if not cfg.mutation_active:
        return x.copy()
    offsets = masked_gaussian_offsets(
        rng, x.shape, cfg.mutation_prob, math.sqrt(IPSO_MUTATION_VARIANCE))
    return np.clip(x + offsets, 0.0, 1.0)


def run(cfg: PsoConfig, problem: LinkProblem,
        callback: Optional[ProgressCallback] = None) -> SolverReport:
    """Run the swarm and report the best mission found.

    Per iteration: velocities and positions update against the previous
    iteration's global best, particles are re-evaluated, personal bests
    then the global best are refreshed, and (improved variant) the
    mutation pass perturbs and re-evaluates everyone except the global
    best holder, whose result is folded into the bests at the next
    iteration's refresh.
    """
    size = cfg.swarm_size
    budget = cfg.max_evaluations
    if budget is not None and budget < size:
        raise ValueError(
            f"evaluation budget {budget} cannot fit one swarm of {size}")
    rng = np.random.default_rng(cfg.seed)

    positions = init_positions(cfg, problem, rng)
    velocities = np.zeros_like(positions)
    ev = problem.evaluate_batch(positions)
    evaluations = size

    personal_x = positions.copy()
    personal_fit = ev.fitness.copy()
    personal_worst = ev.worst_violation.copy()

    best_idx = int(np.lexsort((personal_worst, personal_fit))[0])
    global_x = personal_x[best_idx].copy()
    global_fit = float(personal_fit[best_idx])
    global_worst = float(personal_worst[best_idx])

    last_improvement = 0
    trace = []
    mutation_std = math.sqrt(IPSO_MUTATION_VARIANCE)

    for it in range(1, cfg.iterations + 1):
        needed = size + (size - 1 if cfg.mutation_active else 0)
        if budget is not None and evaluations + needed > budget:
            break

        inertia = inertia_at(it - 1, cfg.iterations, cfg)
        velocities = update_velocity(
            positions, velocities, personal_x, global_x, inertia, cfg, rng)
        positions = problem.adjust(update_position(positions, velocities))
        ev = problem.evaluate_batch(positions)
        evaluations += size

        improved = ev.fitness < personal_fit
        personal_x[improved] = positions[improved]
        personal_fit[improved] = ev.fitness[improved]
        personal_worst[improved] = ev.worst_violation[improved]

        cand = int(np.lexsort((personal_worst, personal_fit))[0])
        if personal_fit[cand] < global_fit or (
            personal_fit[cand] == global_fit
            and personal_worst[cand] < global_worst
        ):
            if personal_fit[cand] < global_fit - STALL_TOL:
                last_improvement = it
            global_fit = float(personal_fit[cand])
            global_worst = float(personal_worst[cand])
            global_x = personal_x[cand].copy()
            best_idx = cand

        record = GenerationRecord(
            generation=it,
            best_fitness=global_fit,
            mean_fitness=float(np.mean(ev.fitness)),
            evaluations=evaluations,
        )
        trace.append(record)
        if callback is not None:
            callback(record)

        if cfg.mutation_active:
            offsets = masked_gaussian_offsets(
                rng, positions.shape, cfg.mutation_prob, mutation_std)
            offsets[best_idx] = 0.0
            moved = np.any(offsets != 0.0, axis=1)
            if np.any(moved):
                positions = problem.adjust(positions + offsets)
                mev = problem.evaluate_batch(positions[moved])
                evaluations += int(np.count_nonzero(moved))
                rows = np.flatnonzero(moved)
                better = mev.fitness < personal_fit[rows]
                upd = rows[better]
                personal_x[upd] = positions[upd]
                personal_fit[upd] = mev.fitness[better]
                personal_worst[upd] = mev.worst_violation[better]

    # Fold in any personal-best improvement from a trailing mutation pass.
    cand = int(np.lexsort((personal_worst, personal_fit))[0])
    if personal_fit[cand] < global_fit or (
        personal_fit[cand] == global_fit and personal_worst[cand] < global_worst
    ):
        global_fit = float(personal_fit[cand])
        global_worst = float(personal_worst[cand])
        global_x = personal_x[cand].copy()

    best = problem.evaluate(global_x)
    return SolverReport(
        solver=cfg.variant,
        seed=cfg.seed,
        best=best,
        trace=trace,
        evaluations=evaluations,
        last_improvement_generation=last_improvement,
        budget=budget,
        config=config_snapshot(cfg),
    )
