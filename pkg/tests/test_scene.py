import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from aos_swarm import scene
from aos_swarm.errors import InputError

HA = (0.0, 0.0, 100.0, 100.0)


def test_tree_count():
    assert len(scene.generate_forest(1, 300, HA).trees) == 300
    assert len(scene.generate_forest(1, 250, (0, 0, 50, 100)).trees) == 125


def test_empty_forest_never_occludes():
    f = scene.generate_forest(7, 0, HA)
    assert f.trees == []
    rng = np.random.default_rng(0)
    for _ in range(20):
        a = np.r_[rng.uniform(0, 100, 2), 50.0]
        b = np.r_[rng.uniform(0, 100, 2), 0.0]
        assert not scene.ray_occluded(f, a, b)


def test_regeneration_is_identical():
    a = scene.generate_forest(5, 400, HA)
    b = scene.generate_forest(5, 400, HA)
    assert a.to_json() == b.to_json()


def test_json_round_trip(tmp_path):
    f = scene.generate_forest(3, 20, HA)
    f.save(tmp_path / "s.json")
    g = scene.ForestScene.load(tmp_path / "s.json")
    assert g.to_json() == f.to_json()
    assert np.array_equal(g.discs, f.discs)


@pytest.mark.parametrize("density", [-1.0, float("nan"), float("inf")])
def test_bad_density(density):
    with pytest.raises(InputError):
        scene.generate_forest(1, density, HA)


@pytest.mark.parametrize("seed", range(5))
def test_tree_geometry_invariants(seed):
    f = scene.generate_forest(seed, 300, HA)
    for t in f.trees:
        assert t.trunk_height < t.height
        z = t.crown[:, 2]
        assert np.all(z >= t.trunk_height) and np.all(z <= t.height)
        x, y, r = t.crown[:, 0], t.crown[:, 1], t.crown[:, 3]
        assert np.all(x - r >= 0) and np.all(x + r <= 100)
        assert np.all(y - r >= 0) and np.all(y + r <= 100)


def test_exclusion_zone():
    f = scene.generate_forest(2, 500, HA, exclude=(50.0, 50.0, 3.0))
    assert min(math.hypot(t.x - 50, t.y - 50) for t in f.trees) > 3.0


def test_direct_disc_hit():
    f = scene.generate_forest(4, 5, HA)
    cx, cy, cz, _ = f.discs[0]
    assert scene.ray_occluded(f, (cx, cy, cz + 10.0), (cx, cy, cz - 10.0))


def test_trunk_hit_and_miss():
    t = scene.Tree(50.0, 50.0, 6.0, 0.3, 20.0, np.zeros((0, 4)))
    f = scene.ForestScene(0, HA, 1.0, [t])
    assert scene.ray_occluded(f, (45.0, 50.0, 4.0), (55.0, 50.0, 3.0))
    assert not scene.ray_occluded(f, (45.0, 50.0, 9.0), (55.0, 50.0, 7.0))
    assert not scene.ray_occluded(f, (45.0, 51.0, 4.0), (55.0, 51.0, 3.0))


def test_segment_errors():
    f = scene.generate_forest(1, 1, HA)
    with pytest.raises(InputError):
        scene.ray_occluded(f, (1, 1, 1), (1, 1, 1))
    with pytest.raises(InputError):
        scene.ray_occluded(f, (1, 1, 0), (1, 1, 5))


@pytest.mark.parametrize("preset", sorted(scene.DENSITY_PRESETS))
def test_preset_occlusion_calibration(preset):
    p = scene.DENSITY_PRESETS[preset]
    params = scene.TreeParams(discs_per_tree=p["discs_per_tree"])
    fracs = [scene.occluded_fraction_vertical(scene.generate_forest(s, p["density"], HA, params))
             for s in (1, 2, 3)]
    assert np.mean(fracs) == pytest.approx(p["occlusion"], abs=0.03)


def test_occlusion_increases_with_density():
    fr = []
    for d in (300, 400, 500):
        fr.append(np.mean([scene.occluded_fraction_vertical(scene.generate_forest(s, d, HA), n=60)
                           for s in range(1, 21)]))
    assert fr[0] <= fr[1] <= fr[2]


def test_target_hits():
    tb = scene.TargetBody(10.0, 10.0)
    assert scene.ray_hits_target(tb, 0.0, (10.0, 10.0, 30.0), (10.0, 10.0, 0.0))
    for z in (0.5, 1.0, 30.0):
        assert not scene.ray_hits_target(tb, 0.0, (20.0, 10.0, z + 1), (20.0, 10.0, 0.0))


def _silhouette_area(tb, cam, cell=0.01, half=1.5):
    xs = np.arange(tb.x - half, tb.x + half, cell) + cell / 2
    gx, gy = np.meshgrid(xs, np.arange(tb.y - half, tb.y + half, cell) + cell / 2)
    ends = np.stack([gx.ravel(), gy.ravel(), np.zeros(gx.size)], axis=1)
    starts = np.tile(np.asarray(cam, dtype=float), (len(ends), 1))
    from aos_swarm import kernels
    hit = kernels.segments_hit_box(starts, ends, tb.box(0.0))
    return hit.sum() * cell * cell


def test_oblique_silhouette_matches_projection_oracle():
    tb = scene.TargetBody(50.0, 50.0, heading=0.0)
    nadir = _silhouette_area(tb, (50.0, 50.0, 35.0))
    oblique = _silhouette_area(tb, (70.0, 50.0, 35.0))
    # shadow of the box on the ground from a point light at height H:
    # top face scaled by H/(H-h), plus the side face swept along x
    H, h = 35.0, tb.height
    s = H / (H - h)
    top = (tb.depth * s) * (tb.width * s)
    shift = 20.0 * (s - 1.0)
    # union of the base rectangle and the scaled top rectangle shifted away
    # from the camera; their convex hull along x has this area
    expected_oblique = tb.width * s * (tb.depth * s + shift) - 0.5 * (tb.width * s - tb.width) * shift
    expected_nadir = top
    assert nadir == pytest.approx(expected_nadir, rel=0.05)
    assert oblique > nadir
    assert oblique == pytest.approx(expected_oblique, rel=0.05)


def test_static_target_pose():
    tb = scene.TargetBody(1.0, 2.0)
    p, v = scene.target_pose_at(tb, 5.0)
    assert np.allclose(p, (1, 2)) and np.allclose(v, 0)


def test_move_and_rest_timing():
    tb = scene.TargetBody(0.0, 13.0, script=[("move", (0.0, 0.0), 4.0), ("rest", 2.0)])
    assert tb.script_end == pytest.approx(3.25 + 2.0)
    p, v = scene.target_pose_at(tb, 1.0)
    assert np.allclose(p, (0, 9)) and np.allclose(v, (0, -4))
    p, v = scene.target_pose_at(tb, 3.25)
    assert np.allclose(p, (0, 0)) and np.allclose(v, 0)
    p, v = scene.target_pose_at(tb, 100.0)
    assert np.allclose(p, (0, 0)) and np.allclose(v, 0)


def test_moving_target_protocol_track():
    tb = scene.TargetBody(50.0, 50.0, script=scene.walk_rest_script((50.0, 50.0)))
    down = 13 / 4
    assert np.allclose(scene.target_pose_at(tb, down)[0], (50, 37))
    assert np.allclose(scene.target_pose_at(tb, down + 6.0)[1], 0)
    up_end = down + 12 + 55 / 4
    assert np.allclose(scene.target_pose_at(tb, up_end)[0], (50, 92))
    assert np.allclose(scene.target_pose_at(tb, down + 12 + 1.0)[1], (0, 4))


@given(st.floats(0, 30))
def test_track_is_continuous(t):
    tb = scene.TargetBody(50.0, 50.0, script=scene.walk_rest_script((50.0, 50.0)))
    a, _ = scene.target_pose_at(tb, t)
    b, _ = scene.target_pose_at(tb, t + 1e-6)
    assert np.hypot(*(a - b)) <= 4.0 * 1e-6 + 1e-9


def test_negative_time_rejected():
    with pytest.raises(InputError):
        scene.target_pose_at(scene.TargetBody(0, 0), -1.0)
