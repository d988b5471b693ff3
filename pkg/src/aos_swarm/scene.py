"""Procedural forest occluders, the target body, and ray queries against them.

Each tree is one opaque trunk cylinder plus a set of opaque horizontal crown
discs whose centres are uniform inside a vertical ellipsoid spanning the
crown. The target is an upright cuboid that follows a piecewise-linear
motion script.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from . import kernels
from .errors import InputError


@dataclass(frozen=True)
class TreeParams:
    trunk_height: tuple = (4.0, 8.0)
    trunk_radius: tuple = (0.20, 0.50)
    tree_height: tuple = (20.0, 25.0)
    crown_radius: tuple = (1.6, 2.8)
    disc_radius: tuple = (0.2, 0.8)
    discs_per_tree: int = 150


@dataclass(frozen=True)
class Appearance:
    """Band means (R, G, B, thermal) and per-cell texture amplitudes."""

    ground: tuple = (0.36, 0.31, 0.22, 0.45)
    ground_texture: tuple = (0.04, 0.04, 0.03, 0.025)
    foliage: tuple = (0.18, 0.38, 0.14, 0.33)
    foliage_tint: tuple = (0.03, 0.04, 0.02, 0.015)
    foliage_texture: tuple = (0.04, 0.05, 0.03, 0.02)
    trunk: tuple = (0.30, 0.22, 0.15, 0.40)
    trunk_texture: tuple = (0.03, 0.03, 0.02, 0.02)
    target_texture: tuple = (0.02, 0.02, 0.02, 0.01)
    # thermal rises linearly with hit height on the body
    target_thermal_gain: float = 0.05


# Discs per tree per density preset, chosen so that the fraction of occluded
# vertical rays (occluded_fraction_vertical) is close to 0.5 / 0.6 / 0.7.
DENSITY_PRESETS = {
    "sparse": {"density": 300.0, "discs_per_tree": 150, "occlusion": 0.5},
    "medium": {"density": 400.0, "discs_per_tree": 150, "occlusion": 0.6},
    "dense": {"density": 500.0, "discs_per_tree": 150, "occlusion": 0.7},
}


@dataclass
class Tree:
    x: float
    y: float
    trunk_height: float
    trunk_radius: float
    height: float
    crown: np.ndarray  # (K, 4): x, y, z, radius

    def to_dict(self):
        return {
            "x": self.x, "y": self.y, "trunk_height": self.trunk_height,
            "trunk_radius": self.trunk_radius, "height": self.height,
            "crown": self.crown.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        crown = np.asarray(d["crown"], dtype=np.float64).reshape(-1, 4)
        return cls(float(d["x"]), float(d["y"]), float(d["trunk_height"]),
                   float(d["trunk_radius"]), float(d["height"]), crown)


@dataclass
class ForestScene:
    seed: int
    bounds: tuple  # (xmin, ymin, xmax, ymax)
    density: float
    trees: list
    params: TreeParams = field(default_factory=TreeParams)
    appearance: Appearance = field(default_factory=Appearance)
    ground_z: float = 0.0

    @cached_property
    def discs(self):
        if not self.trees:
            return np.zeros((0, 4))
        return np.concatenate([t.crown for t in self.trees])

    @cached_property
    def trunks(self):
        return np.array([[t.x, t.y, t.trunk_radius, t.trunk_height] for t in self.trees],
                        dtype=np.float64).reshape(-1, 4)

    @cached_property
    def max_height(self):
        return max((t.height for t in self.trees), default=0.0)

    @cached_property
    def prim_colors(self):
        """(base, texture amplitude) per primitive, discs first then trunks."""
        app = self.appearance
        nd = len(self.discs)
        rng = np.random.default_rng(np.random.SeedSequence([self.seed, 0xC010]))
        tint = rng.uniform(-1.0, 1.0, size=(nd, 4)) * np.asarray(app.foliage_tint)
        base = np.concatenate([np.asarray(app.foliage) + tint,
                               np.tile(app.trunk, (len(self.trunks), 1))]).reshape(-1, 4)
        amp = np.concatenate([np.tile(app.foliage_texture, (nd, 1)),
                              np.tile(app.trunk_texture, (len(self.trunks), 1))]).reshape(-1, 4)
        return base, amp

    def without_occluders(self):
        return ForestScene(self.seed, self.bounds, 0.0, [], self.params, self.appearance)

    # -- serialization -------------------------------------------------

    def to_json(self):
        doc = {
            "seed": self.seed,
            "bounds": list(self.bounds),
            "density": self.density,
            "params": asdict(self.params),
            "appearance": asdict(self.appearance),
            "trees": [t.to_dict() for t in self.trees],
        }
        return json.dumps(doc, sort_keys=True, indent=1)

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text)
        params = TreeParams(**{k: tuple(v) if isinstance(v, list) else v
                               for k, v in doc["params"].items()})
        app = Appearance(**{k: tuple(v) if isinstance(v, list) else v
                            for k, v in doc["appearance"].items()})
        return cls(int(doc["seed"]), tuple(doc["bounds"]), float(doc["density"]),
                   [Tree.from_dict(t) for t in doc["trees"]], params, app)

    def save(self, path):
        Path(path).write_text(self.to_json())

    @classmethod
    def load(cls, path):
        return cls.from_json(Path(path).read_text())


def _uniform_in_ball(rng, k):
    v = rng.normal(size=(k, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return v * rng.random(k)[:, None] ** (1.0 / 3.0)


def generate_forest(seed, density, bounds=(0.0, 0.0, 100.0, 100.0), params=None,
                    appearance=None, exclude=None):
    """Seeded forest with round(density * area_ha) trees.

    ``exclude`` optionally holds (x, y, radius): no trunk axis is placed
    within that radius, so the target never stands inside a trunk.
    """
    params = params or TreeParams()
    if not np.isfinite(density) or density < 0:
        raise InputError(f"density must be finite and >= 0, got {density}")
    xmin, ymin, xmax, ymax = bounds
    if not (xmax > xmin and ymax > ymin):
        raise InputError(f"bounds have no area: {bounds}")
    count = int(round(density * (xmax - xmin) * (ymax - ymin) / 1e4))
    margin = params.crown_radius[1] + params.disc_radius[1]
    if count and (xmax - xmin <= 2 * margin or ymax - ymin <= 2 * margin):
        raise InputError("bounds too small to hold a crown")

    trees = []
    # one child stream per tree: tree index major, attribute minor
    streams = np.random.SeedSequence(int(seed)).spawn(count)
    for ss in streams:
        rng = np.random.default_rng(ss)
        while True:
            x = rng.uniform(xmin + margin, xmax - margin)
            y = rng.uniform(ymin + margin, ymax - margin)
            if exclude is None or math.hypot(x - exclude[0], y - exclude[1]) > exclude[2]:
                break
        th = rng.uniform(*params.trunk_height)
        tr = rng.uniform(*params.trunk_radius)
        h = rng.uniform(*params.tree_height)
        rc = rng.uniform(*params.crown_radius)
        k = params.discs_per_tree
        u = _uniform_in_ball(rng, k)
        half = (h - th) / 2.0
        crown = np.empty((k, 4))
        crown[:, 0] = x + u[:, 0] * rc
        crown[:, 1] = y + u[:, 1] * rc
        crown[:, 2] = th + half + u[:, 2] * half
        crown[:, 3] = rng.uniform(*params.disc_radius, size=k)
        trees.append(Tree(float(x), float(y), float(th), float(tr), float(h), crown))
    return ForestScene(int(seed), tuple(float(b) for b in bounds), float(density), trees,
                       params, appearance or Appearance())


def _check_segment(p_from, p_to):
    a = np.asarray(p_from, dtype=np.float64)
    b = np.asarray(p_to, dtype=np.float64)
    if np.array_equal(a, b):
        raise InputError("degenerate segment")
    return a, b


def ray_occluded(scene, p_from, p_to):
    """True iff the open segment hits a trunk or crown disc."""
    a, b = _check_segment(p_from, p_to)
    if not a[2] > b[2]:
        raise InputError("ray must point downward (from.z > to.z)")
    return bool(kernels.segments_occluded(a[None], b[None], scene.discs, scene.trunks)[0])


def rays_occluded(scene, starts, ends):
    return kernels.segments_occluded(starts, ends, scene.discs, scene.trunks)


def occluded_fraction_vertical(scene, n=200, margin=10.0):
    """Fraction of vertical rays blocked over an n x n grid inside the bounds."""
    xmin, ymin, xmax, ymax = scene.bounds
    xs = np.linspace(xmin + margin, xmax - margin, n)
    ys = np.linspace(ymin + margin, ymax - margin, n)
    gx, gy = np.meshgrid(xs, ys)
    ends = np.stack([gx.ravel(), gy.ravel(), np.zeros(gx.size)], axis=1)
    starts = ends.copy()
    starts[:, 2] = 1000.0
    return float(rays_occluded(scene, starts, ends).mean())


# ---------------------------------------------------------------- target


@dataclass
class TargetBody:
    x: float
    y: float
    heading: float = 0.0
    height: float = 1.8
    width: float = 0.5
    depth: float = 0.3
    color: tuple = (0.15, 0.20, 0.60)
    thermal: float = 0.95
    script: list = field(default_factory=list)

    def __post_init__(self):
        if not self.height > 0:
            raise InputError("target height must be positive")
        t = 0.0
        pos = np.array([self.x, self.y], dtype=np.float64)
        knots = [(t, pos.copy(), np.zeros(2))]
        for seg in self.script:
            kind = seg[0]
            if kind == "move":
                dest = np.asarray(seg[1], dtype=np.float64)
                speed = float(seg[2])
                if speed <= 0:
                    raise InputError("move speed must be positive")
                dist = float(np.linalg.norm(dest - pos))
                dur = dist / speed
                vel = (dest - pos) / dur if dur > 0 else np.zeros(2)
                knots[-1] = (knots[-1][0], knots[-1][1], vel)
                t += dur
                pos = dest
            elif kind == "rest":
                dur = float(seg[1])
                if dur < 0:
                    raise InputError("rest duration must be nonnegative")
                knots[-1] = (knots[-1][0], knots[-1][1], np.zeros(2))
                t += dur
            else:
                raise InputError(f"unknown script segment {kind!r}")
            knots.append((t, pos.copy(), np.zeros(2)))
        self._knots = knots

    @property
    def base_values(self):
        return np.array([*self.color, self.thermal], dtype=np.float64)

    @property
    def script_end(self):
        return self._knots[-1][0]

    def box(self, t):
        p, _ = target_pose_at(self, t)
        return np.array([p[0], p[1], self.heading, self.depth / 2, self.width / 2, self.height])


def target_pose_at(target, t):
    """(position, velocity) at time t; holds the final position after the script."""
    if t < 0:
        raise InputError("t must be nonnegative")
    knots = target._knots
    for (t0, p0, v0), (t1, _, _) in zip(knots, knots[1:]):
        if t0 <= t < t1:
            return p0 + v0 * (t - t0), v0.copy()
    return knots[-1][1].copy(), np.zeros(2)


def ray_hits_target(target, t, p_from, p_to):
    a, b = _check_segment(p_from, p_to)
    return bool(kernels.segments_hit_box(a[None], b[None], target.box(t))[0])


def walk_rest_script(start, speed=4.0, down=13.0, rest=12.0, up=55.0, final_rest=10.0):
    """Walk down, rest, walk up, rest: the moving-target protocol."""
    x, y = start
    return [("move", (x, y - down), speed), ("rest", rest),
            ("move", (x, y - down + up), speed), ("rest", final_rest)]
