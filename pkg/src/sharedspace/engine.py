"""Discrete-time simulation loop.

Each step: spawn due agents, record the frame, run conflict
recognition (every recognition_interval steps), solve games for new
conflicts and latch the chosen actions, assign one mode per agent
(cars: stopping > game > following > free flow; pedestrians: game >
forces), integrate everyone from the same pre-step snapshot, then
retire conflicts whose actions have completed or timed out.

Runs are deterministic: equal configuration and seed give bit-identical
traces.
"""

from __future__ import annotations

import dataclasses
import enum
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from . import conflicts as conflicts_mod
from . import forces as forces_mod
from . import game as game_mod
from .conflicts import CAR_CONE_HALF_ANGLE_DEG, Conflict
from .game import Action, FeatureVector, PairContext
from .geometry import Vec2, segments_intersect, within_cone
from .params import ParameterSet
from .planner import build_visibility_graph, plan_path
from .scene import AgentKind, AgentState, Scene, in_field_of_view


class ScenarioError(ValueError):
    """Raised for malformed scenario files."""


class ScenarioRejectedError(RuntimeError):
    """Raised when a scenario cannot be simulated (e.g. unreachable goal)."""


class Mode(enum.Enum):
    FREE_FLOW = "free_flow"
    FORCES = "forces"
    FOLLOWING = "following"
    GAME = "game"
    STOPPING = "stopping"


@dataclass(frozen=True)
class AgentEntry:
    id: str
    kind: AgentKind
    entry_step: int
    position: Vec2
    velocity: Vec2
    goal: Vec2
    desired_speed: float
    max_speed: float
    diameter: float


@dataclass
class Scenario:
    scenario_id: str
    entries: list[AgentEntry] = field(default_factory=list)

    def validate(self) -> None:
        seen = set()
        for e in self.entries:
            if e.id in seen:
                raise ScenarioError(f"duplicate agent id {e.id!r}")
            seen.add(e.id)
            if e.entry_step < 0:
                raise ScenarioError(f"{e.id}: entry_step must be nonnegative")
            if not (e.desired_speed > 0.0 and e.max_speed > 0.0 and e.diameter > 0.0):
                raise ScenarioError(f"{e.id}: speeds and diameter must be positive")
            for v in (e.position, e.velocity, e.goal):
                if not v.is_finite():
                    raise ScenarioError(f"{e.id}: non-finite coordinates")


@dataclass
class SimulationConfig:
    scene: Scene
    scenario: Scenario
    params: ParameterSet = field(default_factory=ParameterSet)
    dt: float = 0.5
    max_steps: int = 400
    seed: int = 0
    recognition_interval: int = 1
    conflict_timeout: int = 40
    arrival_tolerance: float = 0.5
    waypoint_tolerance: float = 0.5
    resolve_each_step: bool = False
    blend_obstacles_in_game: bool = False
    planner_clearance_margin: float = 0.2


@dataclass(frozen=True)
class TraceRow:
    step: int
    agent_id: str
    kind: AgentKind
    x: float
    y: float
    mode: str


@dataclass(frozen=True)
class DecisionRow:
    step: int
    conflict_id: int
    agent_id: str
    action: Action


@dataclass(frozen=True)
class FeatureRow:
    step: int
    conflict_id: int
    agent_id: str
    kind: AgentKind
    role: str
    features: FeatureVector
    action: Action


@dataclass
class SimulationTrace:
    scenario_id: str
    rows: list[TraceRow] = field(default_factory=list)
    decisions: list[DecisionRow] = field(default_factory=list)
    feature_rows: list[FeatureRow] = field(default_factory=list)
    conflicts: list[Conflict] = field(default_factory=list)
    arrived_step: dict[str, int] = field(default_factory=dict)
    steps_run: int = 0
    truncated: bool = False


@dataclass
class ConflictRuntime:
    conflict: Conflict
    leader: str
    actions: dict[str, Action]


@dataclass
class WorldState:
    step: int
    agents: dict[str, AgentState]
    active_conflicts: list[ConflictRuntime]


class Simulation:
    def __init__(self, config: SimulationConfig) -> None:
        config.scene.validate()
        config.scenario.validate()
        config.params.validate()
        if config.dt <= 0.0:
            raise ScenarioError("dt must be positive")
        self.config = config
        self.world = WorldState(step=0, agents={}, active_conflicts=[])
        self.trace = SimulationTrace(scenario_id=config.scenario.scenario_id)
        self._entries = sorted(config.scenario.entries, key=lambda e: (e.entry_step, e.id))
        self._spawn_cursor = 0
        self._next_conflict_id = 0
        self._binding: dict[str, int] = {}
        self._pending_despawn: set[str] = set()
        self._graph_cache: dict[float, object] = {}
        self._waypoints = self._plan_all()

    # - planning -------------------------------------------------------

    def _plan_all(self) -> dict[str, list[Vec2]]:
        waypoints: dict[str, list[Vec2]] = {}
        for entry in self._entries:
            clearance = entry.diameter / 2.0 + self.config.planner_clearance_margin
            graph = self._graph_cache.get(clearance)
            if graph is None:
                graph = build_visibility_graph(self.config.scene, clearance)
                self._graph_cache[clearance] = graph
            try:
                path = plan_path(graph, entry.position, entry.goal, self.config.scene)
            except Exception as exc:
                raise ScenarioRejectedError(f"agent {entry.id}: {exc}") from exc
            waypoints[entry.id] = path[1:] if len(path) > 1 else [entry.goal]
        return waypoints

    # - bookkeeping ----------------------------------------------------

    def _refresh_conflict_bookkeeping(self) -> None:
        partners: dict[str, set[str]] = {aid: set() for aid in self.world.agents}
        counts: dict[str, int] = {aid: 0 for aid in self.world.agents}
        for runtime in self.world.active_conflicts:
            members = [m for m in runtime.conflict.participants() if m in partners]
            for m in members:
                partners[m].update(x for x in members if x != m)
                counts[m] += 1
        for aid, agent in self.world.agents.items():
            agent.prior_conflict_partners = frozenset(partners[aid])
            agent.active_interactions = counts[aid]

    def _cars(self) -> list[AgentState]:
        return sorted(
            (a for a in self.world.agents.values() if a.kind is AgentKind.CAR),
            key=lambda a: a.id,
        )

    def _pedestrians(self) -> list[AgentState]:
        return sorted(
            (a for a in self.world.agents.values() if a.kind is AgentKind.PEDESTRIAN),
            key=lambda a: a.id,
        )

    def _nearest_of(self, agent: AgentState, ids: Iterable[str]) -> AgentState | None:
        best = None
        best_d = float("inf")
        for other_id in sorted(ids):
            other = self.world.agents.get(other_id)
            if other is None:
                continue
            d = agent.position.distance_to(other.position)
            if d < best_d:
                best = other
                best_d = d
        return best

    def _game_partner(self, agent_id: str, runtime: ConflictRuntime) -> AgentState | None:
        if agent_id == runtime.leader:
            return self._nearest_of(
                self.world.agents[agent_id],
                (u for u in runtime.conflict.competitive_users if u != agent_id),
            )
        return self.world.agents.get(runtime.leader)

    # - conflict handling ----------------------------------------------

    def _run_recognition(self) -> None:
        sfm = self.config.params.sfm
        outcome = conflicts_mod.recognize_conflicts(
            self._cars(),
            self._pedestrians(),
            self.config.scene,
            sfm,
            active_conflicts=[r.conflict for r in self.world.active_conflicts],
            step=self.world.step,
            next_id=self._next_conflict_id,
        )
        if outcome.dissolved_ids:
            dissolved = set(outcome.dissolved_ids)
            self.world.active_conflicts = [
                r for r in self.world.active_conflicts if r.conflict.id not in dissolved
            ]
            for aid, cid in list(self._binding.items()):
                if cid in dissolved:
                    del self._binding[aid]
            self._refresh_conflict_bookkeeping()
        for conflict in outcome.new_conflicts:
            self._next_conflict_id = max(self._next_conflict_id, conflict.id + 1)
            self._create_game(conflict)
        self._refresh_conflict_bookkeeping()

    def _create_game(self, conflict: Conflict) -> None:
        self.trace.conflicts.append(conflict)
        leader = self.world.agents[conflict.anchor_car]
        followers = [
            self.world.agents[uid]
            for uid in conflict.competitive_users
            if uid in self.world.agents
        ]
        if not followers:
            return
        # Feature extraction sees the conflict being created.
        for m in conflict.participants():
            agent = self.world.agents.get(m)
            if agent is not None:
                agent.active_interactions += 1
        sfm, gp = self.config.params.sfm, self.config.params.game
        contexts = {}
        for f in followers:
            contexts[f.id] = PairContext(
                leader_view=game_mod.extract_features(leader, f, sfm, gp),
                follower_view=game_mod.extract_features(f, leader, sfm, gp),
                paths_cross=segments_intersect(leader.position, leader.goal, f.position, f.goal),
            )
        payoff = game_mod.build_payoff_matrix(leader, followers, contexts, gp)
        leader_action, profile = game_mod.solve_spne(payoff)
        actions = {leader.id: leader_action}
        actions.update({f.id: a for f, a in zip(followers, profile)})
        runtime = ConflictRuntime(conflict=conflict, leader=leader.id, actions=actions)
        self.world.active_conflicts.append(runtime)
        nearest_follower = self._nearest_of(leader, [f.id for f in followers])
        for aid, action in actions.items():
            agent = self.world.agents[aid]
            self.trace.decisions.append(
                DecisionRow(self.world.step, conflict.id, aid, action)
            )
            competitor = leader if aid != leader.id else nearest_follower
            if competitor is not None:
                fv = (
                    contexts[aid].follower_view
                    if aid != leader.id
                    else contexts[competitor.id].leader_view
                )
                self.trace.feature_rows.append(
                    FeatureRow(
                        self.world.step,
                        conflict.id,
                        aid,
                        agent.kind,
                        "leader" if aid == leader.id else "follower",
                        fv,
                        action,
                    )
                )
            if aid not in self._binding:
                self._binding[aid] = conflict.id
            if agent.kind is AgentKind.CAR and action is Action.DECELERATE:
                agent.giveway_count += 1

    def _action_completed(self, agent: AgentState, action: Action, partner: AgentState | None) -> bool:
        if partner is None:
            return True
        if agent.position.distance_to(partner.position) > self.config.params.sfm.v_r:
            return True
        if (partner.position - agent.position).dot(agent.heading) < 0.0:
            return True
        if action is Action.DEVIATE and not in_field_of_view(
            agent,
            partner.position,
            self.config.params.sfm.fov_half_angle_deg,
            self.config.params.sfm.v_r,
        ):
            return True
        return False

    def _retire_conflicts(self) -> None:
        kept = []
        for runtime in self.world.active_conflicts:
            age = self.world.step - runtime.conflict.created_at_step
            done = age >= self.config.conflict_timeout
            if not done:
                done = True
                for aid, action in runtime.actions.items():
                    agent = self.world.agents.get(aid)
                    if agent is None:
                        continue
                    if not self._action_completed(agent, action, self._game_partner(aid, runtime)):
                        done = False
                        break
            if done:
                for aid, cid in list(self._binding.items()):
                    if cid == runtime.conflict.id:
                        del self._binding[aid]
            else:
                kept.append(runtime)
        self.world.active_conflicts = kept

    # - modes and movement ----------------------------------------------

    def _bound_runtime(self, agent_id: str) -> ConflictRuntime | None:
        cid = self._binding.get(agent_id)
        if cid is None:
            return None
        for runtime in self.world.active_conflicts:
            if runtime.conflict.id == cid:
                return runtime
        return None

    def _find_following_leader(self, car: AgentState) -> AgentState | None:
        """Nearest other car ahead (frontal 90-degree cone) within view
        range and moving roughly the same way."""
        sfm = self.config.params.sfm
        best = None
        best_d = float("inf")
        for other in self._cars():
            if other.id == car.id:
                continue
            offset = other.position - car.position
            d = offset.norm()
            if d > sfm.v_r or d >= best_d or d == 0.0:
                continue
            if not within_cone(car.heading, offset, CAR_CONE_HALF_ANGLE_DEG):
                continue
            if car.heading.dot(other.heading) <= 0.0:
                continue
            best = other
            best_d = d
        return best

    def _assign_modes(self) -> dict[str, tuple[Mode, object]]:
        sfm = self.config.params.sfm
        regime = self.config.params.game.regime
        peds = self._pedestrians()
        assignments: dict[str, tuple[Mode, object]] = {}
        for car in self._cars():
            stopping_for = [
                p for p in peds
                if forces_mod.in_stopping_corridor(car, p, sfm)
                and abs(p.velocity.dot(car.heading.left_normal())) > 1e-9
            ]
            runtime = self._bound_runtime(car.id)
            if regime != "dut" and stopping_for:
                target = min(
                    stopping_for, key=lambda p: (car.position.distance_to(p.position), p.id)
                )
                assignments[car.id] = (Mode.STOPPING, target)
                car.currently_stopping_for = frozenset(p.id for p in stopping_for)
            elif runtime is not None:
                assignments[car.id] = (Mode.GAME, runtime)
                action = runtime.actions.get(car.id)
                partner = self._game_partner(car.id, runtime)
                car.currently_stopping_for = (
                    frozenset({partner.id})
                    if action is Action.DECELERATE and partner is not None
                    else frozenset()
                )
            else:
                leader = self._find_following_leader(car)
                if leader is not None:
                    assignments[car.id] = (Mode.FOLLOWING, leader)
                else:
                    assignments[car.id] = (Mode.FREE_FLOW, None)
                car.currently_stopping_for = frozenset()
        follower_of: dict[str, str] = {}
        for car in self._cars():
            mode, payload = assignments[car.id]
            car.following_car_id = payload.id if mode is Mode.FOLLOWING else None
            if mode is Mode.FOLLOWING:
                prev = follower_of.get(payload.id)
                if prev is None or car.position.distance_to(payload.position) < (
                    self.world.agents[prev].position.distance_to(payload.position)
                ):
                    follower_of[payload.id] = car.id
        for car in self._cars():
            car.followed_by_car_id = follower_of.get(car.id)
        for ped in peds:
            runtime = self._bound_runtime(ped.id)
            if runtime is not None:
                assignments[ped.id] = (Mode.GAME, runtime)
            else:
                assignments[ped.id] = (Mode.FORCES, None)
        return assignments

    def _directives_for(
        self, agent: AgentState, mode: Mode, payload: object
    ) -> list[forces_mod.Directive]:
        sfm = self.config.params.sfm
        scene = self.config.scene
        if mode is Mode.FREE_FLOW:
            return [forces_mod.DriveTo(agent.next_waypoint(), agent.desired_speed)]
        if mode is Mode.FORCES:
            repulsion = Vec2(0.0, 0.0)
            for other in self.world.agents.values():
                if other.id == agent.id:
                    continue
                repulsion = repulsion + forces_mod.agent_repulsion(agent, other, sfm)
            repulsion = repulsion + forces_mod.obstacle_repulsion(agent, scene, sfm)
            return [
                forces_mod.DriveTo(agent.next_waypoint(), agent.desired_speed),
                forces_mod.Forces(repulsion),
            ]
        if mode is Mode.FOLLOWING:
            leader = payload
            outcome = forces_mod.car_following_force(agent, leader, sfm)
            if isinstance(outcome, forces_mod.Steer):
                return [forces_mod.DriveTo(outcome.target, agent.desired_speed)]
            rate = forces_mod.decel_rate(
                agent.speed, agent.position.distance_to(leader.position), sfm.d_min_cc
            )
            return [forces_mod.SetSpeed(max(0.0, agent.speed - rate))]
        if mode is Mode.STOPPING:
            ped = payload
            rate = forces_mod.decel_rate(
                agent.speed, agent.position.distance_to(ped.position), sfm.d_min_pc
            )
            return [forces_mod.SetSpeed(max(0.0, agent.speed - rate))]
        # Game mode.
        runtime = payload
        action = runtime.actions.get(agent.id, Action.CONTINUE)
        partner = self._game_partner(agent.id, runtime)
        if partner is None:
            return [forces_mod.DriveTo(agent.next_waypoint(), agent.desired_speed)]
        directive = game_mod.apply_action(agent, action, partner, sfm)
        out: list[forces_mod.Directive] = [directive]
        if self.config.blend_obstacles_in_game and agent.kind is AgentKind.PEDESTRIAN:
            if not isinstance(directive, forces_mod.SetSpeed):
                out.append(forces_mod.Forces(forces_mod.obstacle_repulsion(agent, scene, sfm)))
        return out

    # - main loop --------------------------------------------------------

    def _spawn_due(self) -> None:
        while (
            self._spawn_cursor < len(self._entries)
            and self._entries[self._spawn_cursor].entry_step <= self.world.step
        ):
            e = self._entries[self._spawn_cursor]
            self._spawn_cursor += 1
            heading = e.velocity.normalized()
            if heading.norm_sq() == 0.0:
                heading = (e.goal - e.position).normalized()
            if heading.norm_sq() == 0.0:
                heading = Vec2(1.0, 0.0)
            self.world.agents[e.id] = AgentState(
                id=e.id,
                kind=e.kind,
                position=e.position,
                velocity=e.velocity,
                desired_speed=e.desired_speed,
                max_speed=e.max_speed,
                goal=e.goal,
                waypoints=list(self._waypoints[e.id]),
                heading=heading,
                diameter=e.diameter,
            )

    def _advance_waypoints(self, agent: AgentState) -> None:
        while (
            len(agent.waypoints) > 1
            and agent.position.distance_to(agent.waypoints[0]) <= self.config.waypoint_tolerance
        ):
            agent.waypoints.pop(0)

    def step(self) -> None:
        self._spawn_due()
        # Record the frame, then drop agents that arrived last step.
        row_index: dict[str, int] = {}
        for aid, agent in self.world.agents.items():
            mode = "arrived" if aid in self._pending_despawn else ""
            row_index[aid] = len(self.trace.rows)
            self.trace.rows.append(
                TraceRow(self.world.step, aid, agent.kind, agent.position.x, agent.position.y, mode)
            )
        for aid in self._pending_despawn:
            self.world.agents.pop(aid, None)
            self._binding.pop(aid, None)
        self._pending_despawn.clear()

        self._refresh_conflict_bookkeeping()
        if self.world.step % self.config.recognition_interval == 0:
            self._run_recognition()
            if self.config.resolve_each_step:
                self._resolve_active_games()

        assignments = self._assign_modes()
        directives = {
            aid: self._directives_for(agent, *assignments[aid])
            for aid, agent in self.world.agents.items()
        }
        for aid in self.world.agents:
            idx = row_index[aid]
            self.trace.rows[idx] = dataclasses.replace(
                self.trace.rows[idx], mode=assignments[aid][0].value
            )

        new_agents: dict[str, AgentState] = {}
        for aid, agent in self.world.agents.items():
            self._advance_waypoints(agent)
            new_agents[aid] = forces_mod.integrate_step(
                agent, directives[aid], self.config.dt, self.config.params.sfm
            )
        self.world.agents = new_agents

        for aid, agent in self.world.agents.items():
            if agent.position.distance_to(agent.goal) <= self.config.arrival_tolerance:
                if aid not in self.trace.arrived_step:
                    self.trace.arrived_step[aid] = self.world.step
                    self._pending_despawn.add(aid)

        self._retire_conflicts()
        self.world.step += 1
        self.trace.steps_run = self.world.step

    def _resolve_active_games(self) -> None:
        # Optional re-solve of latched actions mid-conflict.
        sfm, gp = self.config.params.sfm, self.config.params.game
        for runtime in self.world.active_conflicts:
            leader = self.world.agents.get(runtime.leader)
            if leader is None:
                continue
            followers = [
                self.world.agents[uid]
                for uid in runtime.conflict.competitive_users
                if uid in self.world.agents
            ]
            if not followers:
                continue
            contexts = {
                f.id: PairContext(
                    leader_view=game_mod.extract_features(leader, f, sfm, gp),
                    follower_view=game_mod.extract_features(f, leader, sfm, gp),
                    paths_cross=segments_intersect(
                        leader.position, leader.goal, f.position, f.goal
                    ),
                )
                for f in followers
            }
            payoff = game_mod.build_payoff_matrix(leader, followers, contexts, gp)
            leader_action, profile = game_mod.solve_spne(payoff)
            runtime.actions = {leader.id: leader_action}
            runtime.actions.update({f.id: a for f, a in zip(followers, profile)})

    def run(self) -> SimulationTrace:
        while self.world.step < self.config.max_steps and (
            self.world.agents or self._spawn_cursor < len(self._entries)
        ):
            self.step()
        if self.world.agents:
            self.trace.truncated = True
        return self.trace


def run_scenario(config: SimulationConfig) -> SimulationTrace:
    return Simulation(config).run()


# - scenario files -----------------------------------------------------

_ENTRY_KEYS = {
    "id", "kind", "entry_step", "position", "velocity", "goal",
    "desired_speed", "max_speed", "diameter",
}
_KIND_DEFAULT_MAX_SPEED = {AgentKind.PEDESTRIAN: 2.0, AgentKind.CAR: 8.0}
_KIND_DEFAULT_DIAMETER = {AgentKind.PEDESTRIAN: 0.5, AgentKind.CAR: 2.0}


def load_scenario(path: str | Path) -> Scenario:
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(raw, dict) or "scenario_id" not in raw:
        raise ScenarioError(f"{path}: expected an object with scenario_id")
    entries = []
    for i, item in enumerate(raw.get("agents", [])):
        unknown = set(item) - _ENTRY_KEYS
        if unknown:
            raise ScenarioError(f"{path}: agents[{i}]: unknown keys {sorted(unknown)}")
        try:
            kind = AgentKind(item["kind"])
        except (KeyError, ValueError) as exc:
            raise ScenarioError(f"{path}: agents[{i}]: kind must be 'ped' or 'car'") from exc
        try:
            position = Vec2(*map(float, item["position"]))
            goal = Vec2(*map(float, item["goal"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ScenarioError(f"{path}: agents[{i}]: bad position/goal") from exc
        velocity = Vec2(*map(float, item.get("velocity", (0.0, 0.0))))
        entries.append(
            AgentEntry(
                id=str(item.get("id", f"agent{i}")),
                kind=kind,
                entry_step=int(item.get("entry_step", 0)),
                position=position,
                velocity=velocity,
                goal=goal,
                desired_speed=float(item.get("desired_speed", 1.34 if kind is AgentKind.PEDESTRIAN else 5.0)),
                max_speed=float(item.get("max_speed", _KIND_DEFAULT_MAX_SPEED[kind])),
                diameter=float(item.get("diameter", _KIND_DEFAULT_DIAMETER[kind])),
            )
        )
    scenario = Scenario(scenario_id=str(raw["scenario_id"]), entries=entries)
    scenario.validate()
    return scenario


def save_scenario(scenario: Scenario, path: str | Path) -> None:
    payload = {
        "scenario_id": scenario.scenario_id,
        "agents": [
            {
                "id": e.id,
                "kind": e.kind.value,
                "entry_step": e.entry_step,
                "position": [e.position.x, e.position.y],
                "velocity": [e.velocity.x, e.velocity.y],
                "goal": [e.goal.x, e.goal.y],
                "desired_speed": e.desired_speed,
                "max_speed": e.max_speed,
                "diameter": e.diameter,
            }
            for e in scenario.entries
        ],
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


# - trace output -------------------------------------------------------

def write_trace_csv(trace: SimulationTrace, path: str | Path) -> None:
    lines = ["scenario_id,frame,agent_id,kind,x,y"]
    for row in trace.rows:
        lines.append(
            f"{trace.scenario_id},{row.step},{row.agent_id},{row.kind.value},{row.x!r},{row.y!r}"
        )
    Path(path).write_text("\n".join(lines) + "\n")


def write_decisions_csv(trace: SimulationTrace, path: str | Path) -> None:
    lines = ["scenario_id,step,conflict_id,agent_id,action"]
    for d in trace.decisions:
        lines.append(
            f"{trace.scenario_id},{d.step},{d.conflict_id},{d.agent_id},{d.action.value}"
        )
    Path(path).write_text("\n".join(lines) + "\n")


_FEATURE_FIELDS = (
    "own_speed", "competitor_speed", "noai", "car_stopped", "car_following",
    "angle", "car_followed", "min_dist", "giveway_nr",
    "pedestrian_min_dist", "car_min_dist",
)


def write_features_csv(trace: SimulationTrace, path: str | Path) -> None:
    header = "scenario_id,step,conflict_id,agent_id,kind,role," + ",".join(_FEATURE_FIELDS) + ",action"
    lines = [header]
    for f in trace.feature_rows:
        values = ",".join(repr(getattr(f.features, name)) for name in _FEATURE_FIELDS)
        lines.append(
            f"{trace.scenario_id},{f.step},{f.conflict_id},{f.agent_id},{f.kind.value},{f.role},{values},{f.action.value}"
        )
    Path(path).write_text("\n".join(lines) + "\n")
