"""Microscopic simulation of shared traffic spaces.

Pedestrians and cars move under social-force dynamics; conflicts
between them are recognized geometrically, classified, and resolved as
sequential (leader-follower) games. Calibration fits the force
parameters to recorded trajectories and the game weights to annotated
decisions; a multinomial-logit pipeline selects which decision features
matter.
"""

__version__ = "0.1.0"

from .conflicts import Conflict, ConflictClass, RecognitionOutcome, recognize_conflicts
from .engine import (
    AgentEntry,
    Scenario,
    SimulationConfig,
    SimulationTrace,
    load_scenario,
    run_scenario,
)
from .game import Action, FeatureVector, PayoffGame, build_payoff_matrix, solve_spne
from .geometry import Vec2
from .params import GameParams, ParameterSet, SfmParams, load_parameter_set
from .scene import AgentKind, AgentState, Scene, load_scene

__all__ = [
    "__version__",
    "Action",
    "AgentEntry",
    "AgentKind",
    "AgentState",
    "Conflict",
    "ConflictClass",
    "FeatureVector",
    "GameParams",
    "ParameterSet",
    "PayoffGame",
    "RecognitionOutcome",
    "Scenario",
    "Scene",
    "SfmParams",
    "SimulationConfig",
    "SimulationTrace",
    "Vec2",
    "build_payoff_matrix",
    "load_parameter_set",
    "load_scenario",
    "load_scene",
    "recognize_conflicts",
    "run_scenario",
    "solve_spne",
]
