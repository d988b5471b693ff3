"""Scenario execution: swarm runs, blind baselines, metrics and normalization."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import aperture, detection, imaging, scene, swarm
from .errors import ConfigError, InputError

SAMPLERS = ("SWARM", "BLIND_SEQUENTIAL", "BLIND_PARALLEL", "SWARM_CLASSIC_PSO")

# Swarm hyperparameters per swarm size as flown in the experiments.
SIZE_PRESETS = {
    10: dict(n=10, h_l=35.0, c1=1.0, c2=2.0, c4=4.2, s=4.2),
    5: dict(n=5, h_l=39.0, c1=0.445, c2=0.89, c4=1.87, s=1.87),
    3: dict(n=3, h_l=38.0, c1=0.22, c2=0.44, c4=0.933, s=0.933),
}

# Objective thresholds (% of the reference contour) per (density preset, n),
# produced by ``calibrate_threshold`` on target-free seeds 1001-1005.
THRESHOLDS_PCT = {
    ("sparse", 10): 68.75, ("sparse", 5): 44.0, ("sparse", 3): 33.0,
    ("medium", 10): 55.0, ("medium", 5): 33.0, ("medium", 3): 33.0,
    ("dense", 10): 55.0, ("dense", 5): 33.0, ("dense", 3): 33.0,
}


@dataclass(frozen=True)
class ScenarioConfig:
    sampler: str = "SWARM"
    # scene
    scene_seed: int = 1
    preset: str = "sparse"
    density: float = None  # trees/ha; preset value when None
    discs_per_tree: int = None  # preset value when None
    bounds: tuple = (0.0, 0.0, 100.0, 100.0)
    # target
    target_x: float = 50.0
    target_y: float = 50.0
    target_heading: float = 0.0
    target_present: bool = True
    motion: str = "static"  # static | walk_rest
    target_speed: float = 4.0
    # imaging and detection
    cell: float = 0.25
    fov_deg: float = 50.0
    px: int = 512 * 512
    quantile: float = 0.9995
    tau: int = 3
    # swarm
    hp: swarm.Hyperparams = field(default_factory=swarm.Hyperparams)
    T_pct: float = None  # threshold in % of the reference contour; overrides hp.T
    swarm_seed: int = 0
    start_offset: float = 19.0  # the swarm starts this far before the target along SD
    sd_deg: float = 90.0
    # blind samplers
    blind_altitude: float = 40.0
    seq_extent: tuple = (36.0, 38.0)
    seq_step: tuple = (4.0, 2.0)
    par_cameras: int = 10
    par_spacing: float = 1.0
    par_step: float = 2.0
    par_length: float = 30.0
    # classic PSO ablation
    classic_inertia: float = 0.5
    # run
    duration: float = 30.0

    def __post_init__(self):
        if self.sampler not in SAMPLERS:
            raise ConfigError(f"sampler must be one of {SAMPLERS}, got {self.sampler!r}")
        if self.preset not in scene.DENSITY_PRESETS:
            raise ConfigError(f"unknown preset {self.preset!r}")
        if self.motion not in ("static", "walk_rest"):
            raise ConfigError(f"motion must be static or walk_rest, got {self.motion!r}")
        if not self.cell > 0:
            raise ConfigError("cell must be positive")
        if not 0.0 <= self.quantile <= 1.0:
            raise ConfigError("quantile must be in [0, 1]")
        if self.tau < 1:
            raise ConfigError("tau must be >= 1")
        if not self.duration > 0:
            raise ConfigError("duration must be positive")
        try:
            self.hp.validate()
        except InputError as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def tree_density(self):
        return self.density if self.density is not None else scene.DENSITY_PRESETS[self.preset]["density"]

    @property
    def tree_discs(self):
        if self.discs_per_tree is not None:
            return self.discs_per_tree
        return scene.DENSITY_PRESETS[self.preset]["discs_per_tree"]


def size_hyperparams(n, **overrides):
    base = dict(SIZE_PRESETS[n])
    base.update(overrides)
    return swarm.Hyperparams(**base)


# ---------------------------------------------------------------- world


@dataclass
class World:
    cfg: ScenarioConfig
    forest: scene.ForestScene
    target: scene.TargetBody
    camera: imaging.CameraModel
    spec: imaging.RasterSpec


def build_forest(cfg):
    params = scene.TreeParams(discs_per_tree=cfg.tree_discs)
    return scene.generate_forest(cfg.scene_seed, cfg.tree_density, cfg.bounds, params,
                                 exclude=(cfg.target_x, cfg.target_y, 1.0))


def build_target(cfg):
    script = []
    if cfg.motion == "walk_rest":
        script = scene.walk_rest_script((cfg.target_x, cfg.target_y), speed=cfg.target_speed)
    return scene.TargetBody(cfg.target_x, cfg.target_y, cfg.target_heading, script=script)


def build_world(cfg, forest=None):
    return World(cfg, forest if forest is not None else build_forest(cfg), build_target(cfg),
                 imaging.CameraModel(cfg.fov_deg, cfg.px),
                 imaging.RasterSpec.from_bounds(cfg.bounds, cfg.cell))


def capture(world, drone_id, pose, t, iteration):
    """Render, detect and package one capture."""
    target = world.target if world.cfg.target_present else None
    img = imaging.render_single(world.forest, target, t, pose, world.camera, world.spec)
    mask = detection.detect(img, world.cfg.quantile, world.spec)
    return imaging.CaptureRecord(drone_id, tuple(pose), t, iteration, img.window, mask,
                                 world.camera.footprint_side(pose[2])), img


def capture_many(world, poses, t, iteration, workers=1):
    jobs = [(i, p) for i, p in enumerate(poses)]
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(workers) as ex:
            out = list(ex.map(lambda j: capture(world, j[0], j[1], t, iteration), jobs))
    else:
        out = [capture(world, i, p, t, iteration) for i, p in jobs]
    return [r for r, _ in out], [im for _, im in out]


# ---------------------------------------------------------------- reference


def _probe_world(target_key, cell, appearance):
    """Occluder-free world around the target on the scenario's grid phase."""
    heading, height, width, depth, x, y, gx, gy = target_key
    x0 = gx + math.floor((x - 60.0 - gx) / cell) * cell
    y0 = gy + math.floor((y - 60.0 - gy) / cell) * cell
    side = int(math.ceil(120.0 / cell))
    spec = imaging.RasterSpec(x0, y0, cell, side, side)
    forest = scene.ForestScene(0, (x0, y0, x0 + side * cell, y0 + side * cell), 0.0, [],
                               appearance=appearance)
    return forest, scene.TargetBody(x, y, heading, height, width, depth), spec


def probe_poses(x, y):
    poses = [(x, y)]
    for off in range(1, 26):
        for k in range(16):
            a = 2.0 * math.pi * k / 16
            poses.append((x + off * math.cos(a), y + off * math.sin(a)))
    return poses


@lru_cache(maxsize=64)
def _reference(target_key, cell, fov_deg, px, quantile, h_l, appearance):
    forest, target, spec = _probe_world(target_key, cell, appearance)
    camera = imaging.CameraModel(fov_deg, px)
    best = 0
    poses = probe_poses(target.x, target.y)
    for px_, py_ in poses:
        img = imaging.render_single(forest, target, 0.0, (px_, py_, h_l), camera, spec)
        if not (img.labels == scene.kernels.TARGET).any():
            continue
        mask = detection.detect(img, quantile, spec)
        rec = imaging.CaptureRecord(0, (px_, py_, h_l), 0.0, 0, img.window, mask)
        integral = imaging.integrate_all([rec], img.window, spec)
        best = max(best, detection.evaluate(integral, spec).score)
    return best


def reference_contour(cfg, nadir_only=False):
    """Largest single-capture objective of the unoccluded target over probe poses."""
    t = build_target(cfg)
    key = (t.heading, t.height, t.width, t.depth, t.x, t.y, cfg.bounds[0], cfg.bounds[1])
    app = scene.Appearance()
    fn = _nadir_reference if nadir_only else _reference
    best = fn(key, cfg.cell, cfg.fov_deg, cfg.px, cfg.quantile, cfg.hp.h_l, app)
    if best == 0:
        raise ConfigError("target is not visible from any probe pose")
    return best


@lru_cache(maxsize=64)
def _nadir_reference(target_key, cell, fov_deg, px, quantile, h_l, appearance):
    forest, target, spec = _probe_world(target_key, cell, appearance)
    x, y = target.x, target.y
    img = imaging.render_single(forest, target, 0.0, (x, y, h_l), imaging.CameraModel(fov_deg, px), spec)
    mask = detection.detect(img, quantile, spec)
    rec = imaging.CaptureRecord(0, (x, y, h_l), 0.0, 0, img.window, mask)
    return detection.evaluate(imaging.integrate_all([rec], img.window, spec), spec).score


# ---------------------------------------------------------------- metrics


METRIC_COLUMNS = ("iteration", "t", "mode", "O", "visibility_pct", "over_100", "coverage_m2",
                  "est_x", "est_y", "est_t", "est_speed", "est_heading_deg",
                  "true_x", "true_y", "true_speed", "true_heading_deg",
                  "pos_err", "speed_err", "dir_err_deg")


@dataclass
class MetricsRow:
    iteration: int
    t: float
    mode: str
    O: int
    visibility_pct: float
    coverage_m2: float
    est_x: float = None
    est_y: float = None
    est_t: float = None
    est_speed: float = None
    est_heading_deg: float = None
    true_x: float = None
    true_y: float = None
    true_speed: float = None
    true_heading_deg: float = None
    pos_err: float = None
    speed_err: float = None
    dir_err_deg: float = None

    @property
    def over_100(self):
        return int(self.visibility_pct > 100.0)

    def values(self):
        def f(v, nd=6):
            return "" if v is None else f"{v:.{nd}f}"
        return [str(self.iteration), f(self.t), self.mode, str(self.O), f(self.visibility_pct, 4),
                str(self.over_100), f(self.coverage_m2, 4), f(self.est_x), f(self.est_y),
                f(self.est_t), f(self.est_speed), f(self.est_heading_deg, 4), f(self.true_x),
                f(self.true_y), f(self.true_speed), f(self.true_heading_deg, 4), f(self.pos_err),
                f(self.speed_err), f(self.dir_err_deg, 4)]


def metrics_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(METRIC_COLUMNS)
    for r in rows:
        w.writerow(r.values())
    return buf.getvalue()


def _heading_deg(v):
    return math.degrees(math.atan2(v[1], v[0]))


def _angle_between(a, b):
    d = abs(_heading_deg(a) - _heading_deg(b)) % 360.0
    return min(d, 360.0 - d)


def fill_truth(row, target, est_xy, est_t, est_speed=None, est_heading=None):
    """Attach ground truth at the estimate's time and the resulting errors."""
    if est_xy is None:
        return row
    p, v = scene.target_pose_at(target, est_t)
    spd = float(math.hypot(*v))
    row.est_x, row.est_y, row.est_t = float(est_xy[0]), float(est_xy[1]), float(est_t)
    row.true_x, row.true_y, row.true_speed = float(p[0]), float(p[1]), spd
    row.true_heading_deg = _heading_deg(v) if spd > 0 else None
    row.pos_err = float(math.hypot(est_xy[0] - p[0], est_xy[1] - p[1]))
    if est_speed is not None:
        row.est_speed = float(est_speed)
        row.speed_err = abs(est_speed - spd)
        if est_heading is not None:
            row.est_heading_deg = _heading_deg(est_heading)
            if spd > 0:
                row.dir_err_deg = _angle_between(est_heading, v)
    return row


@dataclass
class RunResult:
    config: ScenarioConfig
    rows: list
    reference: int
    trajectory: list = field(default_factory=list)
    min_pair_distance: list = field(default_factory=list)  # per iteration, swarm only
    converged_steps: list = field(default_factory=list)  # max displacement per CONVERGED iteration
    travel_ok: bool = True

    @property
    def mtv(self):
        return max((r.visibility_pct for r in self.rows), default=0.0)

    def mtv_until(self, t_end):
        return max((r.visibility_pct for r in self.rows if r.t <= t_end + 1e-9), default=0.0)

    def time_to_reach(self, level):
        """Earliest time at which visibility reached ``level`` (inf if never)."""
        for r in self.rows:
            if r.visibility_pct >= level - 1e-9:
                return r.t
        return math.inf

    def csv(self):
        return metrics_csv(self.rows)


def tracking_errors(rows):
    """Mean (position, speed, direction) errors over detected iterations, or None."""
    det = [r for r in rows if r.pos_err is not None]
    if len(det) < 2:
        return None
    pos = float(np.mean([r.pos_err for r in det]))
    sp = [r.speed_err for r in det if r.speed_err is not None]
    dr = [r.dir_err_deg for r in det if r.dir_err_deg is not None]
    return (pos, float(np.mean(sp)) if sp else math.nan, float(np.mean(dr)) if dr else math.nan)


def _visibility(score, ref):
    return 100.0 * score / ref


# ---------------------------------------------------------------- blind samplers


def sequential_waypoints(center, extent, step):
    """Serpentine grid: columns along y, alternating direction."""
    nx = int(round(extent[0] / step[0])) + 1
    ny = int(round(extent[1] / step[1])) + 1
    xs = center[0] - extent[0] / 2 + step[0] * np.arange(nx)
    ys = center[1] - extent[1] / 2 + step[1] * np.arange(ny)
    pts = []
    for i, x in enumerate(xs):
        col = ys if i % 2 == 0 else ys[::-1]
        pts.extend((float(x), float(y)) for y in col)
    return pts


def _blind_row(world, ref, k, t, records, mode="BLIND"):
    win = imaging.union_window(records, world.spec)
    integral = imaging.integrate_all(records, win, world.spec)
    ev = detection.evaluate(integral, world.spec)
    row = MetricsRow(k, t, mode, ev.score, _visibility(ev.score, ref),
                     imaging.coverage_area(records, world.spec))
    if ev.position is not None and ev.score >= world.cfg.hp.T:
        te = swarm.estimate_time(records, ev.blob_idx)
        fill_truth(row, world.target, ev.position, te if te is not None else t)
    return row


def run_blind_sequential(cfg, world=None, workers=1):
    if cfg.sampler != "BLIND_SEQUENTIAL":
        raise ConfigError("sampler kind must be BLIND_SEQUENTIAL")
    world = world or build_world(cfg)
    ref = reference_contour(cfg)
    wps = sequential_waypoints((cfg.target_x, cfg.target_y), cfg.seq_extent, cfg.seq_step)
    speed = cfg.hp.speed
    t = 0.0
    records, rows, traj = [], [], []
    for k, (x, y) in enumerate(wps):
        if k:
            px, py = wps[k - 1]
            t += math.hypot(x - px, y - py) / speed
        rec, _ = capture(world, 0, (x, y, cfg.blind_altitude), t, k)
        records.append(rec)
        rows.append(_blind_row(world, ref, k, t, records))
        traj.append((f"{t:.6f}", 0, f"{x:.6f}", f"{y:.6f}", f"{cfg.blind_altitude:.3f}", "BLIND",
                     rows[-1].O, 0))
    return RunResult(cfg, rows, ref, traj)


def run_blind_parallel(cfg, world=None, workers=1):
    if cfg.sampler != "BLIND_PARALLEL":
        raise ConfigError("sampler kind must be BLIND_PARALLEL")
    world = world or build_world(cfg)
    ref = reference_contour(cfg)
    steps = int(round(cfg.par_length / cfg.par_step))
    xs = cfg.target_x + (np.arange(cfg.par_cameras) - (cfg.par_cameras - 1) / 2) * cfg.par_spacing
    y0 = cfg.target_y - cfg.par_length / 2
    records, rows, traj = [], [], []
    for k in range(steps + 1):
        t = k * cfg.par_step / cfg.hp.speed
        poses = [(float(x), y0 + k * cfg.par_step, cfg.blind_altitude) for x in xs]
        recs, _ = capture_many(world, poses, t, k, workers)
        records.extend(recs)
        rows.append(_blind_row(world, ref, k, t, records))
        traj.extend((f"{t:.6f}", i, f"{p[0]:.6f}", f"{p[1]:.6f}", f"{p[2]:.3f}", "BLIND",
                     rows[-1].O, 0) for i, p in enumerate(poses))
    return RunResult(cfg, rows, ref, traj)


# ---------------------------------------------------------------- swarm


def threshold_cells(cfg, ref):
    if cfg.T_pct is not None:
        return cfg.T_pct * ref / 100.0
    return cfg.hp.T


def initial_swarm(cfg):
    hp = cfg.hp
    sd = np.array([math.cos(math.radians(cfg.sd_deg)), math.sin(math.radians(cfg.sd_deg))])
    center = np.array([cfg.target_x, cfg.target_y]) - cfg.start_offset * sd
    plan = aperture.assign_altitudes(hp.n, hp.h_l, hp.dh)
    return swarm.initial_state(hp, center, sd, plan.slots)


def _min_pair(p):
    if len(p) < 2:
        return math.inf
    d = np.hypot(p[:, None, 0] - p[None, :, 0], p[:, None, 1] - p[None, :, 1])
    return float(d[np.triu_indices(len(p), 1)].min())


def run_swarm(cfg, world=None, workers=1, dump_dir=None):
    if cfg.sampler not in ("SWARM", "SWARM_CLASSIC_PSO"):
        raise ConfigError("sampler kind must be SWARM or SWARM_CLASSIC_PSO")
    world = world or build_world(cfg)
    ref = reference_contour(cfg)
    hp = replace(cfg.hp, T=threshold_cells(cfg, ref))
    rng = np.random.default_rng(np.random.SeedSequence([cfg.swarm_seed, cfg.scene_seed]))
    state = initial_swarm(replace(cfg, hp=hp))
    result = RunResult(cfg, [], ref)
    result.min_pair_distance.append(_min_pair(state.positions))

    def capture_fn(st):
        recs, imgs = capture_many(world, st.poses(), st.t, st.iteration, workers)
        if dump_dir is not None:
            for rec, img in zip(recs, imgs):
                imaging.dump_capture(dump_dir, img, rec, world.spec)
        return recs

    classic = cfg.sampler == "SWARM_CLASSIC_PSO"
    vel = np.zeros_like(state.positions)
    pbest = state.positions.copy()
    pbest_score = np.full(state.n, -1.0)
    xmin, ymin, xmax, ymax = cfg.bounds
    while state.t < cfg.duration - 1e-9:
        cx, cy = state.center
        if not (xmin <= cx <= xmax and ymin <= cy <= ymax):
            break  # the swarm has left the forest
        prev = state
        if classic:
            state, res = _classic_iteration(state, hp, capture_fn, world.spec, rng, cfg, vel,
                                            pbest, pbest_score)
            vel = res.commanded - prev.positions
        else:
            state, res = swarm.pso_iteration(state, hp, capture_fn, world.spec, rng, tau=cfg.tau)
        if dump_dir is not None:
            imaging.dump_integral(dump_dir, res.integral, world.spec, prev.t)
        cov = imaging.coverage_area(
            [r for r in res.records + prev.history if r.key in set(res.integral.contributors)],
            world.spec)
        row = MetricsRow(prev.iteration, prev.t, res.mode.value, res.score,
                         _visibility(res.score, ref), cov)
        if res.estimate is not None:
            fresh = state.estimates and state.estimates[-1] is res.estimate and len(state.estimates) == 2
            fill_truth(row, world.target, res.estimate.position, res.estimate.t,
                       state.target_speed if fresh else None,
                       state.target_heading if fresh else None)
        result.rows.append(row)
        result.trajectory.extend(swarm.trajectory_rows(prev, res))
        result.min_pair_distance.append(_min_pair(state.positions))
        step = np.hypot(*(state.positions - prev.positions).T)
        if res.mode is swarm.Mode.CONVERGED:
            result.converged_steps.append(float(step.max()))
        if step.max() > res.duration * hp.speed + 1e-9:
            result.travel_ok = False
    return result


def _classic_iteration(state, hp, capture_fn, spec, rng, cfg, vel, pbest, pbest_score):
    """Classical PSO step on the same objective: per-drone personal bests from
    each drone's own mask, global best from the conditional integral."""
    records = capture_fn(state)
    res = imaging.integrate_conditional(records, state.history,
                                        lambda m: detection.evaluate(m, spec).score, spec)
    ev = detection.evaluate(res.integral, spec)
    for i, rec in enumerate(records):
        own = detection.evaluate(imaging.integrate_all([rec], rec.window, spec), spec).score
        if own > pbest_score[i]:
            pbest_score[i] = own
            pbest[i] = state.positions[i]
    gbest = np.asarray(res.best_pose[:2])
    v = swarm.classic_pso_velocity(vel, state.positions, pbest, gbest, cfg.classic_inertia,
                                   hp.c1, hp.c2, rng)
    if ev.score < hp.T:
        v = v + hp.c3 * state.sd[None, :]
    commanded = swarm.rutherford_repel(state.positions + v, hp.c4, rng) if state.n > 1 else state.positions + v
    travel = float(np.max(np.hypot(*(commanded - state.positions).T)))
    duration = max(travel / hp.speed, swarm.MIN_ITERATION_S)
    mode = swarm.Mode.CONVERGED if (ev.score >= hp.T and ev.score > 0) else swarm.Mode.SCANNING
    estimate = None
    if mode is swarm.Mode.CONVERGED:
        members = {r.key: r for r in records + state.history}
        te = swarm.estimate_time([members[k] for k in res.integral.contributors], ev.blob_idx)
        estimate = swarm.Estimate(np.asarray(ev.position), te if te is not None else state.t)
    keep = [r for r in state.history + records if r.iteration > state.iteration - cfg.tau]
    new = replace(state, positions=commanded, mode=mode, best_pose=res.best_pose,
                  iteration=state.iteration + 1, t=state.t + duration, last_score=ev.score,
                  history=keep)
    return new, swarm.IterationResult(records, ev.score, res.integral, res.best_pose, estimate,
                                      mode, duration, commanded, res.log)


def run(cfg, workers=1, dump_dir=None):
    world = build_world(cfg)
    if cfg.sampler == "BLIND_SEQUENTIAL":
        return run_blind_sequential(cfg, world, workers)
    if cfg.sampler == "BLIND_PARALLEL":
        return run_blind_parallel(cfg, world, workers)
    return run_swarm(cfg, world, workers, dump_dir)


def write_outputs(result, outdir, config_text=None):
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "metrics.csv").write_text(result.csv())
    swarm.write_trajectory(outdir / "trajectory.csv", result.trajectory)
    if config_text is not None:
        (outdir / "config_echo.ini").write_text(config_text)


# ---------------------------------------------------------------- calibration


CALIBRATION_SEEDS = (1001, 1002, 1003, 1004, 1005)


def false_positive_max(cfg, seeds=CALIBRATION_SEEDS, workers=1):
    """Largest objective seen by a forced-scanning swarm over target-free scenes."""
    worst = 0
    for seed in seeds:
        c = replace(cfg, scene_seed=seed, target_present=False, T_pct=None,
                    hp=replace(cfg.hp, T=math.inf), sampler="SWARM")
        res = run_swarm(c, workers=workers)
        worst = max(worst, max((r.O for r in res.rows), default=0))
    return worst


def calibrate_threshold(cfg, seeds=CALIBRATION_SEEDS, factor=1.1, workers=1):
    """(T in cells, T in % of the reference contour, largest false positive)."""
    fp = false_positive_max(cfg, seeds, workers)
    ref = reference_contour(cfg)
    t_cells = factor * fp
    return t_cells, 100.0 * t_cells / ref, fp
