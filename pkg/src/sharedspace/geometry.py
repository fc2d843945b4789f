"""Planar geometry primitives shared across the simulator.

Zones and view cones are boundary inclusive; collinear segment overlap
counts as an intersection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence


class InvalidSceneError(ValueError):
    """Raised for degenerate or self-intersecting scene geometry."""


@dataclass(frozen=True)
class Vec2:
    x: float
    y: float

    def __add__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x - other.x, self.y - other.y)

    def __mul__(self, k: float) -> "Vec2":
        return Vec2(self.x * k, self.y * k)

    __rmul__ = __mul__

    def __neg__(self) -> "Vec2":
        return Vec2(-self.x, -self.y)

    def dot(self, other: "Vec2") -> float:
        return self.x * other.x + self.y * other.y

    def cross(self, other: "Vec2") -> float:
        return self.x * other.y - self.y * other.x

    def norm_sq(self) -> float:
        return self.x * self.x + self.y * self.y

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def distance_to(self, other: "Vec2") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def normalized(self) -> "Vec2":
        n = self.norm()
        if n == 0.0:
            return Vec2(0.0, 0.0)
        return Vec2(self.x / n, self.y / n)

    def left_normal(self) -> "Vec2":
        return Vec2(-self.y, self.x)

    def is_finite(self) -> bool:
        return math.isfinite(self.x) and math.isfinite(self.y)


ZERO = Vec2(0.0, 0.0)

# Angular guard soaking up one-ulp atan2 noise on boundary fixtures.
# 1e-9 degrees is far below any physically meaningful bearing.
_ANGLE_EPS_DEG = 1e-9


def manhattan(a: Vec2, b: Vec2) -> float:
    return abs(a.x - b.x) + abs(a.y - b.y)


def _on_segment(p: Vec2, a: Vec2, b: Vec2) -> bool:
    # Canonical endpoint order keeps the tolerance band symmetric in (a, b).
    if (b.x, b.y) < (a.x, a.y):
        a, b = b, a
    ab = b - a
    ap = p - a
    scale = max(1.0, ab.norm() * max(1.0, ap.norm()))
    if abs(ab.cross(ap)) > 1e-9 * scale:
        return False
    t = ap.dot(ab)
    return -1e-12 * scale <= t <= ab.norm_sq() + 1e-12 * scale


def _orient_sign(a: Vec2, b: Vec2, c: Vec2) -> int:
    """Sign of the turn a->b->c with a scale-relative zero band."""
    if (b.x, b.y) < (a.x, a.y):
        return -_orient_sign(b, a, c)
    v = (b - a).cross(c - a)
    scale = max(1.0, (b - a).norm() * max(1.0, (c - a).norm(), (c - b).norm()))
    if abs(v) <= 1e-9 * scale:
        return 0
    return 1 if v > 0.0 else -1


def point_in_zone(p: Vec2, zone: Sequence[Vec2]) -> bool:
    """Even-odd membership test, boundary inclusive."""
    if len(zone) < 3:
        raise InvalidSceneError("zone polygon needs at least 3 vertices")
    n = len(zone)
    for i in range(n):
        if _on_segment(p, zone[i], zone[(i + 1) % n]):
            return True
    inside = False
    for i in range(n):
        a = zone[i]
        b = zone[(i + 1) % n]
        if (a.y > p.y) != (b.y > p.y):
            x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y)
            if p.x < x_cross:
                inside = not inside
    return inside


def point_strictly_inside(p: Vec2, zone: Sequence[Vec2]) -> bool:
    n = len(zone)
    for i in range(n):
        if _on_segment(p, zone[i], zone[(i + 1) % n]):
            return False
    return point_in_zone(p, zone)


def segments_intersect(a1: Vec2, a2: Vec2, b1: Vec2, b2: Vec2) -> bool:
    """True when closed segments a1-a2 and b1-b2 share any point."""
    o1 = _orient_sign(a1, a2, b1)
    o2 = _orient_sign(a1, a2, b2)
    o3 = _orient_sign(b1, b2, a1)
    o4 = _orient_sign(b1, b2, a2)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return True
    if o1 == 0 and _on_segment(b1, a1, a2):
        return True
    if o2 == 0 and _on_segment(b2, a1, a2):
        return True
    if o3 == 0 and _on_segment(a1, b1, b2):
        return True
    if o4 == 0 and _on_segment(a2, b1, b2):
        return True
    return False


def bearing_deg(heading: Vec2, offset: Vec2) -> float:
    """Angle from heading to offset in degrees, normalized to [0, 360)."""
    if offset.norm_sq() == 0.0:
        return 0.0
    ang = math.degrees(math.atan2(heading.cross(offset), heading.dot(offset))) % 360.0
    return 0.0 if ang >= 360.0 else ang


def within_cone(heading: Vec2, offset: Vec2, half_angle_deg: float) -> bool:
    """Boundary-inclusive cone test around heading."""
    if half_angle_deg >= 180.0:
        return True
    theta = bearing_deg(heading, offset)
    return (
        theta <= half_angle_deg + _ANGLE_EPS_DEG
        or theta >= 360.0 - half_angle_deg - _ANGLE_EPS_DEG
    )


def nearest_point_on_segment(p: Vec2, a: Vec2, b: Vec2) -> Vec2:
    ab = b - a
    denom = ab.norm_sq()
    if denom == 0.0:
        return a
    t = (p - a).dot(ab) / denom
    t = min(1.0, max(0.0, t))
    return a + ab * t


def nearest_point_on_polygon(p: Vec2, poly: Sequence[Vec2]) -> tuple[Vec2, float]:
    """Closest boundary point of poly to p and its distance."""
    best: Vec2 | None = None
    best_d = math.inf
    n = len(poly)
    for i in range(n):
        q = nearest_point_on_segment(p, poly[i], poly[(i + 1) % n])
        d = p.distance_to(q)
        if d < best_d:
            best = q
            best_d = d
    assert best is not None
    return best, best_d


def polygon_signed_area(poly: Sequence[Vec2]) -> float:
    area = 0.0
    n = len(poly)
    for i in range(n):
        a = poly[i]
        b = poly[(i + 1) % n]
        area += a.cross(b)
    return 0.5 * area


def _crossing_params(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> list[float]:
    """Parameters t in [0, 1] along a->b where it meets segment c->d."""
    ab = b - a
    cd = d - c
    denom = ab.cross(cd)
    ac = c - a
    if denom != 0.0:
        t = ac.cross(cd) / denom
        u = ac.cross(ab) / denom
        if -1e-12 <= t <= 1.0 + 1e-12 and -1e-12 <= u <= 1.0 + 1e-12:
            return [min(1.0, max(0.0, t))]
        return []
    # Parallel. Only a collinear overlap yields crossings.
    if ab.cross(ac) != 0.0:
        return []
    denom_sq = ab.norm_sq()
    if denom_sq == 0.0:
        return []
    t0 = (c - a).dot(ab) / denom_sq
    t1 = (d - a).dot(ab) / denom_sq
    lo, hi = min(t0, t1), max(t0, t1)
    lo = max(0.0, lo)
    hi = min(1.0, hi)
    if lo > hi:
        return []
    return [lo, hi]


def segment_clear_of_polygon(a: Vec2, b: Vec2, poly: Sequence[Vec2]) -> bool:
    """True when segment a-b avoids the polygon interior (grazing the
    boundary is allowed)."""
    if a.distance_to(b) == 0.0:
        return not point_strictly_inside(a, poly)
    params = {0.0, 1.0}
    n = len(poly)
    for i in range(n):
        for t in _crossing_params(a, b, poly[i], poly[(i + 1) % n]):
            params.add(t)
    ordered = sorted(params)
    ab = b - a
    for t0, t1 in zip(ordered, ordered[1:]):
        mid = a + ab * ((t0 + t1) / 2.0)
        if point_strictly_inside(mid, poly):
            return False
    return True


def _validate_simple_polygon(poly: Sequence[Vec2], label: str) -> None:
    n = len(poly)
    if n < 3:
        raise InvalidSceneError(f"{label}: polygon needs at least 3 vertices")
    for v in poly:
        if not v.is_finite():
            raise InvalidSceneError(f"{label}: non-finite vertex")
    if abs(polygon_signed_area(poly)) == 0.0:
        raise InvalidSceneError(f"{label}: zero-area polygon")
    for i in range(n):
        a1, a2 = poly[i], poly[(i + 1) % n]
        for j in range(i + 1, n):
            # Adjacent edges legitimately share an endpoint.
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue
            if segments_intersect(a1, a2, poly[j], poly[(j + 1) % n]):
                raise InvalidSceneError(f"{label}: self-intersecting polygon")
