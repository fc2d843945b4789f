"""Genetic-algorithm calibration of simulator parameters.

Two calibration targets share one GA core:

* the force/safety parameter set, scored by positional error between
  simulated and recorded trajectories (lower is better), and
* the game weight set, scored by agreement between simulated and
  annotated conflict decisions (higher is better; the GA minimizes its
  negation).

Chromosomes are flat real vectors; the GA is elitist tournament
selection with single-point crossover and Gaussian mutation, fully
deterministic under a fixed seed. Candidate evaluations are independent
simulations, so a caller may evaluate a population concurrently;
results merge by chromosome index.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from .dataio import TrajectoryRecord
from .engine import (
    AgentEntry,
    Scenario,
    ScenarioError,
    SimulationConfig,
    SimulationTrace,
    run_scenario,
)
from .game import Action
from .geometry import Vec2
from .params import GameParams, ParameterSet, SfmParams
from .scene import AgentKind, Scene

SCENARIO_FAILURE_PENALTY = 1000.0

SFM_GENE_NAMES = (
    "v0_pp",
    "v0_pc",
    "u0",
    "sigma_pp",
    "sigma_pc",
    "r_obstacle",
    "anisotropy",
    "d_min_pc",
    "d_min_cc",
    "s_a",
    "v_r",
    "s_c",
)

GAME_GENE_NAMES = (
    "g_own_speed",
    "g_competitor_speed",
    "g_angle",
    "g_noai",
    "g_stopped",
    "g_distance",
)


class GaConfigError(ValueError):
    """Raised for out-of-range GA settings."""


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 50
    max_generations: int = 200
    tournament_size: int = 3
    crossover_rate: float = 0.9
    mutation_rate: float = 0.1
    mutation_sigma_fraction: float = 0.1
    elitism: int = 1
    stagnation_window: int = 30
    seed: int = 0

    def validate(self) -> None:
        if self.population_size < 2:
            raise GaConfigError("population_size must be at least 2")
        if self.max_generations < 1:
            raise GaConfigError("max_generations must be at least 1")
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise GaConfigError("crossover_rate must lie in [0, 1]")
        if not 0.0 <= self.mutation_rate <= 1.0:
            raise GaConfigError("mutation_rate must lie in [0, 1]")
        if self.mutation_sigma_fraction < 0.0:
            raise GaConfigError("mutation_sigma_fraction must be non-negative")
        if not 1 <= self.tournament_size <= self.population_size:
            raise GaConfigError("tournament_size must lie in [1, population_size]")
        if not 0 <= self.elitism < self.population_size:
            raise GaConfigError("elitism must lie in [0, population_size)")
        if self.stagnation_window < 1:
            raise GaConfigError("stagnation_window must be at least 1")


@dataclass(frozen=True)
class GenStats:
    generation: int
    best_fitness: float
    mean_fitness: float


@dataclass
class GaResult:
    best_genes: np.ndarray
    best_fitness: float
    history: list[GenStats]
    evaluations: int
    stopped_early: bool


BatchObjective = Callable[[np.ndarray], np.ndarray]


def per_individual(fn: Callable[[np.ndarray], float]) -> BatchObjective:
    """Adapt a scalar objective to the batch interface the GA expects."""

    def batch(population: np.ndarray) -> np.ndarray:
        return np.array([fn(individual) for individual in population], dtype=float)

    return batch


def _finite_mean(values: np.ndarray) -> float:
    finite = values[np.isfinite(values)]
    return float(finite.mean()) if finite.size else math.inf


def ga_optimize(
    bounds: Sequence[tuple[float, float]],
    evaluate: BatchObjective,
    config: GaConfig = GaConfig(),
) -> GaResult:
    """Minimize `evaluate` over the gene box. Non-finite scores count as
    the worst possible fitness; the run continues."""
    config.validate()
    box = np.asarray(bounds, dtype=float)
    if box.ndim != 2 or box.shape[1] != 2:
        raise GaConfigError("bounds must be a sequence of (low, high) pairs")
    lows, highs = box[:, 0], box[:, 1]
    if not np.all(np.isfinite(box)) or np.any(highs <= lows):
        raise GaConfigError("each bound must satisfy low < high and be finite")
    n_genes = box.shape[0]
    rng = np.random.default_rng(config.seed)

    def scored(population: np.ndarray) -> np.ndarray:
        values = np.asarray(evaluate(population), dtype=float)
        if values.shape != (population.shape[0],):
            raise GaConfigError(
                f"objective returned shape {values.shape}, expected ({population.shape[0]},)"
            )
        return np.where(np.isfinite(values), values, math.inf)

    population = rng.uniform(lows, highs, size=(config.population_size, n_genes))
    fitness = scored(population)
    evaluations = population.shape[0]

    best_idx = int(np.argmin(fitness))
    best_genes = population[best_idx].copy()
    best_fitness = float(fitness[best_idx])
    history = [GenStats(0, best_fitness, _finite_mean(fitness))]

    sigma = config.mutation_sigma_fraction * (highs - lows)
    stagnant = 0
    stopped_early = False
    n_children = config.population_size - config.elitism

    for generation in range(1, config.max_generations + 1):
        picks = rng.integers(
            0, config.population_size, size=(2 * n_children, config.tournament_size)
        )
        winners = picks[np.arange(2 * n_children), np.argmin(fitness[picks], axis=1)]
        parents_a = population[winners[:n_children]]
        parents_b = population[winners[n_children:]]

        children = parents_a.copy()
        if n_genes > 1:
            crossed = rng.random(n_children) < config.crossover_rate
            cuts = rng.integers(1, n_genes, size=n_children)
            tail = np.arange(n_genes)[None, :] >= cuts[:, None]
            take_b = tail & crossed[:, None]
            children[take_b] = parents_b[take_b]

        mutate = rng.random(children.shape) < config.mutation_rate
        noise = rng.normal(0.0, 1.0, size=children.shape) * sigma
        children = np.where(mutate, children + noise, children)
        np.clip(children, lows, highs, out=children)

        child_fitness = scored(children)
        evaluations += children.shape[0]
        if config.elitism:
            elite = np.argsort(fitness, kind="stable")[: config.elitism]
            population = np.vstack([population[elite], children])
            fitness = np.concatenate([fitness[elite], child_fitness])
        else:
            population, fitness = children, child_fitness

        gen_best = int(np.argmin(fitness))
        if float(fitness[gen_best]) < best_fitness:
            best_fitness = float(fitness[gen_best])
            best_genes = population[gen_best].copy()
            stagnant = 0
        else:
            stagnant += 1
        history.append(GenStats(generation, best_fitness, _finite_mean(fitness)))
        if stagnant >= config.stagnation_window:
            stopped_early = True
            break

    return GaResult(best_genes, best_fitness, history, evaluations, stopped_early)


def write_history_csv(history: Sequence[GenStats], path: str | Path) -> None:
    lines = ["generation,best_fitness,mean_fitness"]
    for row in history:
        lines.append(f"{row.generation},{row.best_fitness!r},{row.mean_fitness!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def default_bounds(values: Sequence[float]) -> list[tuple[float, float]]:
    """Search box per gene: a quarter to four times its reference value."""
    out = []
    for v in values:
        if v <= 0.0 or not math.isfinite(v):
            raise GaConfigError(f"reference value {v!r} does not admit relative bounds")
        out.append((0.25 * v, 4.0 * v))
    return out


def sfm_reference_values(base: SfmParams) -> list[float]:
    mapping = {
        "v0_pp": base.v0_pp,
        "v0_pc": base.v0_pc,
        "u0": base.u0,
        "sigma_pp": base.sigma_pp,
        "sigma_pc": base.sigma_pc,
        "r_obstacle": base.r_obstacle,
        "anisotropy": base.anisotropy,
        "d_min_pc": base.d_min_pc,
        "d_min_cc": base.d_min_cc,
        "s_a": base.s_a,
        "v_r": base.v_r,
        "s_c": base.s_c,
    }
    return [mapping[name] for name in SFM_GENE_NAMES]


def game_reference_values(base: GameParams) -> list[float]:
    mapping = {
        "g_own_speed": base.g_own_speed,
        "g_competitor_speed": base.g_competitor_speed,
        "g_angle": base.g_angle,
        "g_noai": base.g_noai,
        "g_stopped": base.g_stopped,
        "g_distance": base.g_distance,
    }
    return [mapping[name] for name in GAME_GENE_NAMES]


def decode_sfm(genes: Sequence[float], base: ParameterSet) -> ParameterSet:
    values = dict(zip(SFM_GENE_NAMES, (float(g) for g in genes), strict=True))
    return dataclasses.replace(base, sfm=dataclasses.replace(base.sfm, **values))


def decode_game(genes: Sequence[float], base: ParameterSet) -> ParameterSet:
    values = dict(zip(GAME_GENE_NAMES, (float(g) for g in genes), strict=True))
    return dataclasses.replace(base, game=dataclasses.replace(base.game, **values))


# ---------------------------------------------------------------------------
# Training data assembly

@dataclass
class CalibrationScenario:
    scenario: Scenario
    real_positions: dict[str, dict[int, Vec2]]
    annotations: dict[tuple[str, int], Action] = field(default_factory=dict)


_KIND_DEFAULTS = {
    AgentKind.PEDESTRIAN: {"diameter": 0.5, "fallback_speed": 1.34},
    AgentKind.CAR: {"diameter": 2.0, "fallback_speed": 5.0},
}


def scenario_from_records(
    scenario_id: str,
    records: Sequence[TrajectoryRecord],
    frame_seconds: float = 0.5,
) -> Scenario:
    """Reconstruct spawn conditions from observed trajectories: entry at
    the first observed frame with velocity from the first displacement,
    goal at the last observed position, desired speed from the mean
    observed speed."""
    by_agent: dict[str, list[TrajectoryRecord]] = {}
    kinds: dict[str, AgentKind] = {}
    for r in records:
        if r.scenario_id != scenario_id:
            continue
        by_agent.setdefault(r.agent_id, []).append(r)
        kinds[r.agent_id] = r.kind
    if not by_agent:
        raise ScenarioError(f"no records for scenario {scenario_id!r}")
    entries = []
    for agent_id in sorted(by_agent):
        rows = sorted(by_agent[agent_id], key=lambda r: r.frame)
        kind = kinds[agent_id]
        defaults = _KIND_DEFAULTS[kind]
        first = rows[0]
        position = Vec2(first.x, first.y)
        goal = Vec2(rows[-1].x, rows[-1].y)
        speeds = []
        for a, b in zip(rows, rows[1:]):
            dt = (b.frame - a.frame) * frame_seconds
            speeds.append(math.hypot(b.x - a.x, b.y - a.y) / dt)
        if len(rows) >= 2:
            dt0 = (rows[1].frame - rows[0].frame) * frame_seconds
            velocity = Vec2((rows[1].x - rows[0].x) / dt0, (rows[1].y - rows[0].y) / dt0)
        else:
            velocity = Vec2(0.0, 0.0)
        desired = max(sum(speeds) / len(speeds) if speeds else defaults["fallback_speed"], 0.05)
        max_speed = max(desired, max(speeds, default=0.0))
        entries.append(
            AgentEntry(
                id=agent_id,
                kind=kind,
                entry_step=first.frame,
                position=position,
                velocity=velocity,
                goal=goal,
                desired_speed=desired,
                max_speed=max_speed,
                diameter=defaults["diameter"],
            )
        )
    return Scenario(scenario_id=scenario_id, entries=entries)


def build_calibration_set(
    records: Sequence[TrajectoryRecord],
    annotations: Sequence = (),
    frame_seconds: float = 0.5,
) -> list[CalibrationScenario]:
    scenario_ids = sorted({r.scenario_id for r in records})
    annotation_map: dict[str, dict[tuple[str, int], Action]] = {}
    for a in annotations:
        annotation_map.setdefault(a.scenario_id, {})[(a.agent_id, a.conflict_idx)] = a.action
    out = []
    for sid in scenario_ids:
        positions: dict[str, dict[int, Vec2]] = {}
        for r in records:
            if r.scenario_id == sid:
                positions.setdefault(r.agent_id, {})[r.frame] = Vec2(r.x, r.y)
        out.append(
            CalibrationScenario(
                scenario=scenario_from_records(sid, records, frame_seconds),
                real_positions=positions,
                annotations=annotation_map.get(sid, {}),
            )
        )
    return out


def train_test_split(
    items: Sequence, train_fraction: float = 0.66, seed: int = 0
) -> tuple[list, list]:
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must lie strictly between 0 and 1")
    order = np.random.default_rng(seed).permutation(len(items))
    n_train = int(round(train_fraction * len(items)))
    n_train = min(max(n_train, 1), max(len(items) - 1, 1))
    train_idx = sorted(order[:n_train].tolist())
    test_idx = sorted(order[n_train:].tolist())
    return [items[i] for i in train_idx], [items[i] for i in test_idx]


# ---------------------------------------------------------------------------
# Fitness scores

class ScoreUndefinedError(ValueError):
    """Raised when a score has no comparison units to average over."""


def position_error_score(
    real: Mapping[str, Mapping[int, Vec2]], sim: Mapping[str, Mapping[int, Vec2]]
) -> float:
    """Out of one scenario: mean over users of their time-averaged
    positional error on frames both sources share."""
    per_user = []
    for agent_id in sorted(real):
        real_traj = real[agent_id]
        sim_traj = sim.get(agent_id, {})
        common = sorted(set(real_traj) & set(sim_traj))
        if not common:
            raise ScoreUndefinedError(f"agent {agent_id!r} shares no frames")
        per_user.append(
            sum(real_traj[f].distance_to(sim_traj[f]) for f in common) / len(common)
        )
    if not per_user:
        raise ScoreUndefinedError("scenario has no users")
    return sum(per_user) / len(per_user)


def agreement_score(
    annotated: Mapping[tuple[str, int], Action],
    simulated: Mapping[tuple[str, int], Action],
) -> float:
    """Out of one scenario: mean of +1 per reproduced decision and -1
    per mismatch; an annotated decision with no simulated counterpart
    counts as a mismatch. Bounded in [-1, 1]."""
    if not annotated:
        raise ScoreUndefinedError("scenario has no annotated decisions")
    total = 0.0
    for key in annotated:
        sim_action = simulated.get(key)
        total += 1.0 if sim_action is annotated[key] else -1.0
    return total / len(annotated)


def trace_positions(trace: SimulationTrace) -> dict[str, dict[int, Vec2]]:
    out: dict[str, dict[int, Vec2]] = {}
    for row in trace.rows:
        out.setdefault(row.agent_id, {})[row.step] = Vec2(row.x, row.y)
    return out


def trace_decisions(trace: SimulationTrace) -> dict[tuple[str, int], Action]:
    """Index decisions by (agent, ordinal): an agent's n-th game in
    creation order, which is how annotations refer to them."""
    counters: dict[str, int] = {}
    out: dict[tuple[str, int], Action] = {}
    for row in trace.decisions:
        idx = counters.get(row.agent_id, 0)
        counters[row.agent_id] = idx + 1
        out[(row.agent_id, idx)] = row.action
    return out


def _simulate(
    item: CalibrationScenario,
    scene: Scene,
    params: ParameterSet,
    frame_seconds: float,
    extra_steps: int = 20,
) -> SimulationTrace:
    last_frame = max(max(t) for t in item.real_positions.values())
    config = SimulationConfig(
        scene=scene,
        scenario=item.scenario,
        params=params,
        dt=frame_seconds,
        max_steps=last_frame + extra_steps,
    )
    return run_scenario(config)


def fitness_sfm(
    genes: Sequence[float],
    training: Sequence[CalibrationScenario],
    scene: Scene,
    base: ParameterSet,
    frame_seconds: float = 0.5,
    failure_penalty: float = SCENARIO_FAILURE_PENALTY,
) -> float:
    """Scenario-averaged positional error of the decoded parameter set;
    a scenario whose simulation fails scores the penalty."""
    if not training:
        raise ScoreUndefinedError("no training scenarios")
    params = decode_sfm(genes, base)
    scores = []
    for item in training:
        try:
            trace = _simulate(item, scene, params, frame_seconds)
            scores.append(position_error_score(item.real_positions, trace_positions(trace)))
        except Exception:
            scores.append(failure_penalty)
    return sum(scores) / len(scores)


def fitness_game(
    genes: Sequence[float],
    training: Sequence[CalibrationScenario],
    scene: Scene,
    base: ParameterSet,
    frame_seconds: float = 0.5,
) -> float:
    """Scenario-averaged decision agreement in [-1, 1] (higher is
    better). Scenarios without annotations are skipped; a failed
    simulation scores -1 for its scenario."""
    annotated = [item for item in training if item.annotations]
    if not annotated:
        raise ScoreUndefinedError("no annotated scenarios")
    params = decode_game(genes, base)
    scores = []
    for item in annotated:
        try:
            trace = _simulate(item, scene, params, frame_seconds)
            scores.append(agreement_score(item.annotations, trace_decisions(trace)))
        except Exception:
            scores.append(-1.0)
    return sum(scores) / len(scores)


def sfm_objective(
    training: Sequence[CalibrationScenario],
    scene: Scene,
    base: ParameterSet,
    frame_seconds: float = 0.5,
) -> BatchObjective:
    return per_individual(
        lambda genes: fitness_sfm(genes, training, scene, base, frame_seconds)
    )


def game_objective(
    training: Sequence[CalibrationScenario],
    scene: Scene,
    base: ParameterSet,
    frame_seconds: float = 0.5,
) -> BatchObjective:
    # The GA minimizes, agreement is maximized: negate.
    return per_individual(
        lambda genes: -fitness_game(genes, training, scene, base, frame_seconds)
    )
