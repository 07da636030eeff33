"""Plumbing shared by the population-based solvers.

Both solvers consume a :class:`~uavbsc.encoding.LinkProblem`, draw every
random number from a single seeded generator in a fixed order before
evaluations are dispatched, and report their progress through the same
per-generation record type, so the harness can treat them uniformly.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np

from .encoding import EvaluatedSolution, LinkProblem

__all__ = [
    "STALL_TOL",
    "GenerationRecord",
    "SolverReport",
    "ProgressCallback",
    "sample_initial_genes",
    "masked_gaussian_offsets",
    "resolve_init_mean",
    "config_snapshot",
]

# Minimum best-fitness decrease that counts as an improvement when
# tracking stalls and convergence generations.
STALL_TOL = 1.0e-12


@dataclass
class GenerationRecord:
    """One line of a solver's convergence trace."""

    generation: int
    best_fitness: float
    mean_fitness: float
    evaluations: int

    def to_dict(self) -> dict:
        return {
            "generation": int(self.generation),
            "best_fitness": float(self.best_fitness),
            "mean_fitness": float(self.mean_fitness),
            "evaluations": int(self.evaluations),
        }


ProgressCallback = Callable[[GenerationRecord], None]


@dataclass(eq=False)
class SolverReport:
    """Outcome of one seeded solver run."""

    solver: str
    seed: int
    best: EvaluatedSolution
    trace: List[GenerationRecord]
    evaluations: int
    last_improvement_generation: int
    budget: Optional[int] = None
    config: Optional[dict] = None

    @property
    def feasible(self) -> bool:
        return self.best.report.feasible

    @property
    def best_objective_bps(self) -> float:
        return self.best.objective_bps

    def to_dict(self) -> dict:
        return {
            "solver": self.solver,
            "seed": int(self.seed),
            "evaluations": int(self.evaluations),
            "last_improvement_generation": int(self.last_improvement_generation),
            "budget": None if self.budget is None else int(self.budget),
            "config": self.config,
            "best": {
                "genome": [float(g) for g in self.best.genome],
                "waypoints_m": [
                    [float(c) for c in row]
                    for row in self.best.trajectory.waypoints
                ],
                "time_split": [float(d) for d in self.best.time_split],
                "objective_bps": float(self.best.objective_bps),
                "fitness": float(self.best.fitness),
                "report": self.best.report.to_dict(),
            },
            "trace": [rec.to_dict() for rec in self.trace],
        }


def sample_initial_genes(
    rng: np.random.Generator, count: int, dim: int, mean, std: float
) -> np.ndarray:
    """Raw Gaussian initialization draws, before clamping to [0, 1].

    Kept separate from the clamped initializers so the pre-clamp spread is
    directly observable; callers pass the result through
    ``LinkProblem.adjust``.
    """
    mean = np.broadcast_to(np.asarray(mean, dtype=np.float64), (dim,))
    return rng.normal(mean, std, size=(int(count), dim))


def masked_gaussian_offsets(
    rng: np.random.Generator, shape, prob: float, std: float
) -> np.ndarray:
    """Per-gene Bernoulli(prob) Gaussian perturbations, zero elsewhere.

    The Bernoulli mask and the full offset matrix are always drawn in the
    same order and quantity regardless of the mask outcome, which keeps
    the consumed random stream independent of the data.
    """
    mask = rng.uniform(size=shape) < prob
    offsets = rng.normal(0.0, std, size=shape)
    return np.where(mask, offsets, 0.0)


def resolve_init_mean(init_mean, problem: LinkProblem) -> np.ndarray:
    """Initialization mean genome: configured value or the problem heuristic."""
    if init_mean is None:
        return problem.heuristic_mean()
    arr = np.asarray(init_mean, dtype=np.float64)
    if arr.ndim == 0:
        return np.full(problem.genome_size, float(arr))
    if arr.shape != (problem.genome_size,):
        raise ValueError(
            f"init mean must be scalar or shape ({problem.genome_size},), "
            f"got {arr.shape}")
    return arr


def config_snapshot(cfg) -> dict:
    """JSON-friendly dump of a solver config dataclass."""
    out = {}
    for f in dataclasses.fields(cfg):
        value = getattr(cfg, f.name)
        if isinstance(value, np.ndarray):
            value = [float(v) for v in value]
        out[f.name] = value
    return out
