#!/usr/bin/env python3
"""Run the canonical car/pedestrian crossing and print what happened.

A car drives east across an open square while a pedestrian crosses its
path from the south. The run prints the recognized conflict, the game
decision each participant settled on, and the closest approach between
the two, then drops the full trace next to the terminal output.

Usage: python3 scripts/demo_crossing.py [--out-dir demo_out] [--regime hbs|dut]
"""

from __future__ import annotations

import argparse
from pathlib import Path

from sharedspace.calibrate import trace_positions
from sharedspace.engine import (
    AgentEntry,
    Scenario,
    SimulationConfig,
    run_scenario,
    write_decisions_csv,
    write_trace_csv,
)
from sharedspace.geometry import Vec2
from sharedspace.params import ParameterSet
from sharedspace.scene import AgentKind, Rect, Scene


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out-dir", default="demo_out")
    parser.add_argument("--regime", default="hbs", choices=["hbs", "dut"])
    args = parser.parse_args()

    half = 30.0
    square = [Vec2(-half, -half), Vec2(half, -half), Vec2(half, half), Vec2(-half, half)]
    scene = Scene(intersection_zones=[square],
                  bounds=Rect(-2 * half, -2 * half, 2 * half, 2 * half))
    scenario = Scenario("crossing", [
        AgentEntry("c1", AgentKind.CAR, 0, Vec2(-14.0, 0.0), Vec2(2.0, 0.0),
                   Vec2(30.0, 0.0), 2.0, 2.2, 2.0),
        AgentEntry("p1", AgentKind.PEDESTRIAN, 0, Vec2(0.0, -8.0), Vec2(0.0, 1.2),
                   Vec2(0.0, 8.0), 1.2, 1.2, 0.5),
    ])
    trace = run_scenario(SimulationConfig(
        scene=scene, scenario=scenario, params=ParameterSet.defaults(args.regime),
    ))

    print(f"steps simulated: {trace.steps_run}")
    for conflict in trace.conflicts:
        print(f"conflict {conflict.id}: {conflict.conflict_class.value} "
              f"(car {conflict.anchor_car} vs {', '.join(conflict.competitive_users)}) "
              f"at step {conflict.created_at_step}")
    for decision in trace.decisions:
        print(f"  step {decision.step}: {decision.agent_id} "
              f"-> {decision.action.value}")

    positions = trace_positions(trace)
    shared = sorted(set(positions["c1"]) & set(positions["p1"]))
    closest = min(positions["c1"][f].distance_to(positions["p1"][f]) for f in shared)
    print(f"closest car-pedestrian approach: {closest:.2f} m")

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_trace_csv(trace, out / "trace.csv")
    write_decisions_csv(trace, out / "decisions.csv")
    print(f"trace written to {out}/trace.csv")


if __name__ == "__main__":
    main()
