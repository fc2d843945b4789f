import json

import pytest

from helpers import car, ped
from sharedspace.geometry import InvalidSceneError, Vec2
from sharedspace.scene import (
    AgentKind,
    AgentState,
    Rect,
    Scene,
    in_field_of_view,
    in_intersection_zone,
    in_road_zone,
    load_scene,
    save_scene,
)


def square(cx, cy, half):
    return (
        Vec2(cx - half, cy - half),
        Vec2(cx + half, cy - half),
        Vec2(cx + half, cy + half),
        Vec2(cx - half, cy + half),
    )


def make_scene(**kw):
    defaults = dict(
        obstacles=(square(10, 10, 2),),
        intersection_zones=(square(0, 0, 5),),
        road_zones=(square(20, 0, 5),),
        bounds=Rect(-50, -50, 50, 50),
        meters_per_unit=1.0,
    )
    defaults.update(kw)
    return Scene(**defaults)


class TestSceneValidation:
    def test_valid_scene_passes(self):
        make_scene().validate()

    def test_degenerate_obstacle_rejected(self):
        scene = make_scene(obstacles=((Vec2(0, 0), Vec2(1, 0), Vec2(2, 0)),))
        with pytest.raises(InvalidSceneError):
            scene.validate()

    def test_self_intersecting_polygon_rejected(self):
        bowtie = (Vec2(0, 0), Vec2(2, 2), Vec2(2, 0), Vec2(0, 2))
        scene = make_scene(obstacles=(bowtie,))
        with pytest.raises(InvalidSceneError):
            scene.validate()

    def test_inverted_bounds_rejected(self):
        scene = make_scene(bounds=Rect(10, 0, -10, 5))
        with pytest.raises(InvalidSceneError):
            scene.validate()

    def test_nonpositive_scale_rejected(self):
        scene = make_scene(meters_per_unit=0.0)
        with pytest.raises(InvalidSceneError):
            scene.validate()


class TestZoneQueries:
    def test_intersection_zone_membership(self):
        scene = make_scene()
        assert in_intersection_zone(Vec2(0, 0), scene)
        assert in_intersection_zone(Vec2(5, 0), scene)  # boundary counts
        assert not in_intersection_zone(Vec2(20, 0), scene)

    def test_road_zone_membership(self):
        scene = make_scene()
        assert in_road_zone(Vec2(20, 0), scene)
        assert not in_road_zone(Vec2(0, 0), scene)


class TestRect:
    def test_contains(self):
        r = Rect(0, 0, 10, 5)
        assert r.contains(Vec2(5, 2))
        assert r.contains(Vec2(0, 0))
        assert not r.contains(Vec2(11, 2))


class TestAgentState:
    def test_speed_property(self):
        a = car(speed=3.0)
        assert a.speed == pytest.approx(3.0)

    def test_radius_is_half_diameter(self):
        assert car(diameter=2.0).radius() == 1.0
        assert ped(diameter=0.5).radius() == 0.25

    def test_next_waypoint_defaults_to_goal(self):
        a = car(goal=Vec2(9, 9))
        assert a.next_waypoint() == Vec2(9, 9)
        a.waypoints = [Vec2(1, 1), Vec2(2, 2)]
        assert a.next_waypoint() == Vec2(1, 1)


class TestFieldOfView:
    def test_target_ahead_in_range(self):
        a = ped(position=Vec2(0, 0), heading=Vec2(1, 0))
        assert in_field_of_view(a, Vec2(5, 0), half_angle_deg=113.0, range_m=18.4)

    def test_target_beyond_range(self):
        a = ped(position=Vec2(0, 0), heading=Vec2(1, 0))
        assert not in_field_of_view(a, Vec2(20, 0), half_angle_deg=113.0, range_m=18.4)

    def test_target_behind_outside_cone(self):
        a = ped(position=Vec2(0, 0), heading=Vec2(1, 0))
        assert not in_field_of_view(a, Vec2(-5, 0.1), half_angle_deg=113.0, range_m=18.4)

    def test_range_boundary_inclusive(self):
        a = ped(position=Vec2(0, 0), heading=Vec2(1, 0))
        assert in_field_of_view(a, Vec2(18.4, 0), half_angle_deg=113.0, range_m=18.4)


class TestSceneIO:
    def test_round_trip(self, tmp_path):
        scene = make_scene()
        path = tmp_path / "scene.json"
        save_scene(scene, path)
        loaded = load_scene(path)
        assert loaded == scene

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "scene.json"
        payload = {
            "obstacles": [],
            "intersection_zones": [],
            "road_zones": [],
            "bounds": [-1, -1, 1, 1],
            "meters_per_unit": 1.0,
            "zoom": 3,
        }
        path.write_text(json.dumps(payload))
        with pytest.raises(InvalidSceneError, match="zoom"):
            load_scene(path)

    def test_meters_per_unit_scales_coordinates(self, tmp_path):
        path = tmp_path / "scene.json"
        payload = {
            "obstacles": [[[0, 0], [10, 0], [10, 10], [0, 10]]],
            "intersection_zones": [],
            "road_zones": [],
            "bounds": [-100, -100, 100, 100],
            "meters_per_unit": 0.5,
        }
        path.write_text(json.dumps(payload))
        scene = load_scene(path)
        assert scene.obstacles[0][1] == Vec2(5.0, 0.0)
        assert scene.bounds == Rect(-50, -50, 50, 50)

    def test_invalid_scene_rejected_at_load(self, tmp_path):
        path = tmp_path / "scene.json"
        payload = {
            "obstacles": [[[0, 0], [1, 1]]],
            "intersection_zones": [],
            "road_zones": [],
            "bounds": [-1, -1, 1, 1],
            "meters_per_unit": 1.0,
        }
        path.write_text(json.dumps(payload))
        with pytest.raises(InvalidSceneError):
            load_scene(path)
