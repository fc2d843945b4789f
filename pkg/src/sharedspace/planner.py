"""Global route planning over a visibility graph.

Graph nodes are obstacle corners pushed outward by a clearance margin;
edges connect mutually visible nodes. Paths come from A* with the
straight-line heuristic and are returned as corner waypoints without
densification.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field

from .geometry import (
    Vec2,
    point_strictly_inside,
    polygon_signed_area,
    segment_clear_of_polygon,
)
from .scene import Scene


class UnreachableGoalError(RuntimeError):
    def __init__(self, start: Vec2, goal: Vec2) -> None:
        super().__init__(f"no obstacle-free path from ({start.x}, {start.y}) to ({goal.x}, {goal.y})")
        self.start = start
        self.goal = goal


@dataclass
class VisibilityGraph:
    nodes: list[Vec2] = field(default_factory=list)
    # adjacency: node index -> list of (neighbor index, edge length)
    edges: dict[int, list[tuple[int, float]]] = field(default_factory=dict)


def _inflated_corners(poly: list[Vec2], clearance: float) -> list[Vec2]:
    # Work on a counterclockwise copy so edge normals point outward.
    ring = list(poly)
    if polygon_signed_area(ring) < 0.0:
        ring.reverse()
    n = len(ring)
    out = []
    for i in range(n):
        prev_v = ring[(i - 1) % n]
        v = ring[i]
        next_v = ring[(i + 1) % n]
        n1 = -(v - prev_v).normalized().left_normal()
        n2 = -(next_v - v).normalized().left_normal()
        m = n1 + n2
        m_sq = m.norm_sq()
        if m_sq < 1e-12:
            # Degenerate spike; fall back to the first edge normal.
            out.append(v + n1 * clearance)
            continue
        # Miter offset: distance to both adjacent edges equals clearance.
        out.append(v + m * (2.0 * clearance / m_sq))
    return out


def segment_is_free(scene: Scene, a: Vec2, b: Vec2) -> bool:
    return all(segment_clear_of_polygon(a, b, poly) for poly in scene.obstacles)


def build_visibility_graph(scene: Scene, clearance: float = 0.0) -> VisibilityGraph:
    """Nodes are obstacle corners offset outward by clearance; an edge
    joins every mutually visible node pair."""
    if clearance < 0.0:
        raise ValueError("clearance must be nonnegative")
    nodes: list[Vec2] = []
    for poly in scene.obstacles:
        for corner in _inflated_corners(poly, clearance):
            if any(point_strictly_inside(corner, other) for other in scene.obstacles):
                continue
            nodes.append(corner)
    edges: dict[int, list[tuple[int, float]]] = {i: [] for i in range(len(nodes))}
    for i in range(len(nodes)):
        for j in range(i + 1, len(nodes)):
            if segment_is_free(scene, nodes[i], nodes[j]):
                d = nodes[i].distance_to(nodes[j])
                edges[i].append((j, d))
                edges[j].append((i, d))
    return VisibilityGraph(nodes=nodes, edges=edges)


def plan_path(graph: VisibilityGraph, start: Vec2, goal: Vec2, scene: Scene) -> list[Vec2]:
    """Shortest waypoint path from start to goal, including both ends.

    Raises UnreachableGoalError when no obstacle-free route exists.
    """
    if segment_is_free(scene, start, goal):
        return [start, goal]
    nodes = list(graph.nodes) + [start, goal]
    start_idx = len(graph.nodes)
    goal_idx = start_idx + 1
    adjacency: dict[int, list[tuple[int, float]]] = {i: list(graph.edges.get(i, [])) for i in range(len(graph.nodes))}
    adjacency[start_idx] = []
    adjacency[goal_idx] = []
    for endpoint_idx in (start_idx, goal_idx):
        p = nodes[endpoint_idx]
        for i in range(len(graph.nodes)):
            if segment_is_free(scene, p, nodes[i]):
                d = p.distance_to(nodes[i])
                adjacency[endpoint_idx].append((i, d))
                adjacency[i].append((endpoint_idx, d))

    counter = itertools.count()
    g_score = {start_idx: 0.0}
    came_from: dict[int, int] = {}
    open_heap = [(nodes[start_idx].distance_to(nodes[goal_idx]), next(counter), start_idx)]
    closed: set[int] = set()
    while open_heap:
        _, _, current = heapq.heappop(open_heap)
        if current == goal_idx:
            path = [current]
            while path[-1] in came_from:
                path.append(came_from[path[-1]])
            return [nodes[i] for i in reversed(path)]
        if current in closed:
            continue
        closed.add(current)
        for neighbor, weight in adjacency[current]:
            tentative = g_score[current] + weight
            if tentative < g_score.get(neighbor, math.inf):
                g_score[neighbor] = tentative
                came_from[neighbor] = current
                f = tentative + nodes[neighbor].distance_to(nodes[goal_idx])
                heapq.heappush(open_heap, (f, next(counter), neighbor))
    raise UnreachableGoalError(start, goal)
