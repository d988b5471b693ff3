"""Explorative PSO for a drone swarm: line scanning, convergence, and repulsion.

Positions are horizontal (x, y); each drone keeps the altitude it was
assigned at take-off. One call to ``pso_iteration`` captures at the current
poses, scores the best conditional integral and commands the next poses.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .errors import ConstraintInfeasible, InputError
from .imaging import integrate_conditional
from .detection import evaluate

MAX_SWEEPS = 1000
# smallest simulated duration of one iteration (capture and processing)
MIN_ITERATION_S = 0.1


class Mode(enum.Enum):
    SCANNING = "SCANNING"
    CONVERGED = "CONVERGED"


@dataclass(frozen=True)
class Hyperparams:
    c1: float = 1.0
    c2: float = 2.0
    c3: float = 2.0
    c4: float = 4.2
    c5: float = 0.3
    s: float = 4.2
    T: float = math.inf  # objective threshold in contour cells
    n: int = 10
    speed: float = 10.0
    fov_deg: float = 50.0
    h_l: float = 35.0
    dh: float = 1.0
    min_baseline: float = 0.0

    def validate(self):
        tol = 1e-9
        for name in ("c1", "c2", "c4", "s", "speed", "h_l"):
            if not getattr(self, name) > 0:
                raise InputError(f"{name} must be positive")
        if self.c3 < 0 or self.dh < 0 or self.min_baseline < 0:
            raise InputError("c3, dh and min_baseline must be nonnegative")
        if self.n < 1:
            raise InputError("n must be >= 1")
        if self.c1 > self.c2 + tol:
            raise InputError(f"c1 <= c2 violated: c1={self.c1} > c2={self.c2}")
        if self.c1 + self.c2 > self.c4 + tol:
            raise InputError(f"c1 + c2 <= c4 violated: {self.c1 + self.c2} > {self.c4}")
        if self.s < self.c4 - tol:
            raise InputError(f"s >= c4 violated: s={self.s} < c4={self.c4}")
        if not 0.0 < self.c5 <= 1.0:
            raise InputError(f"c5 must be in (0, 1], got {self.c5}")
        if self.c2 - self.c1 < self.min_baseline - tol:
            raise InputError(f"c2 - c1 = {self.c2 - self.c1} is below the minimum baseline "
                             f"{self.min_baseline}")
        if not 0.0 < self.fov_deg < 180.0:
            raise InputError("fov must be in (0, 180)")
        if math.isnan(self.T):
            raise InputError("T must not be NaN")
        return self


@dataclass
class Estimate:
    position: np.ndarray
    t: float


@dataclass
class SwarmState:
    positions: np.ndarray  # (n, 2)
    altitudes: np.ndarray  # (n,)
    sd: np.ndarray  # unit scan direction
    c3: float
    mode: Mode = Mode.SCANNING
    best_pose: tuple = None
    estimates: list = field(default_factory=list)  # last two Estimate
    target_speed: float = 0.0
    target_heading: np.ndarray = None
    iteration: int = 0
    t: float = 0.0
    last_score: float = 0.0
    history: list = field(default_factory=list)  # CaptureRecord of earlier iterations

    @property
    def n(self):
        return len(self.positions)

    @property
    def center(self):
        return self.positions.mean(axis=0)

    def poses(self):
        return [(float(p[0]), float(p[1]), float(a)) for p, a in zip(self.positions, self.altitudes)]


def _unit(v):
    v = np.asarray(v, dtype=np.float64)
    nrm = math.hypot(v[0], v[1])
    return v / nrm if nrm > 0 else np.zeros(2)


def line_axis(sd):
    """Axis of the scan line, perpendicular to SD."""
    return np.array([-sd[1], sd[0]], dtype=np.float64)


def default_line_positions(center, sd, s, n):
    sd = _unit(sd)
    axis = line_axis(sd)
    offsets = (np.arange(n) - (n - 1) / 2.0) * s
    return np.asarray(center, dtype=np.float64)[None, :] + offsets[:, None] * axis[None, :]


def rutherford_repel(positions, c4, rng):
    """Push pairs closer than c4 apart symmetrically until all are separated."""
    angles = rng.uniform(0.0, 2.0 * np.pi, size=64)
    p, _, ok = kernels.repel(positions, c4, angles, MAX_SWEEPS)
    if not ok:
        raise ConstraintInfeasible(f"repulsion did not reach c4={c4} within {MAX_SWEEPS} sweeps")
    return p


def assign_slots(positions, slots, sd):
    """Pair drones with line slots in order of their coordinate along the line."""
    axis = line_axis(_unit(sd))
    order_d = np.argsort(positions @ axis, kind="stable")
    order_s = np.argsort(slots @ axis, kind="stable")
    out = np.empty_like(slots)
    out[order_d] = slots[order_s]
    return out


def scan_step(state, hp, rng=None):
    """Blend towards the default line, then translate by c3 along SD."""
    line = default_line_positions(state.center, state.sd, hp.s, state.n)
    target = assign_slots(state.positions, line, state.sd)
    new = state.positions + state.c3 * state.sd[None, :] + hp.c5 * (target - state.positions)
    if rng is not None and state.n > 1:
        new = rutherford_repel(new, hp.c4, rng)
    return new


def converge_velocity(positions, best_xy, hp, rng):
    n = len(positions)
    a = rng.uniform(0.0, 2.0 * np.pi, size=n)
    rand = np.stack([np.cos(a), np.sin(a)], axis=1)
    social = np.array([_unit(best_xy - p) for p in positions])
    return hp.c1 * rand + hp.c2 * social


def converge_step(state, hp, best_pose, rng):
    """Cognitive random step plus social step towards the best pose.

    Repulsion restores the c4 spacing; when it would push a drone beyond
    c1 + c2 the whole step is shortened (halving) until both hold, and the
    swarm holds position if no shortened step works.
    """
    old = state.positions
    best_xy = np.asarray(best_pose[:2], dtype=np.float64)
    vel = converge_velocity(old, best_xy, hp, rng)
    bound = hp.c1 + hp.c2 + 1e-9
    angles = rng.uniform(0.0, 2.0 * np.pi, size=64)
    scale = 1.0
    for _ in range(12):
        trial = old + scale * vel
        p, _, ok = kernels.repel(trial, hp.c4, angles, MAX_SWEEPS)
        if ok and np.all(np.hypot(*(p - old).T) <= bound):
            return p
        scale *= 0.5
    return old.copy()


def update_scan_heading(prev, cur, center, duration, hp, cell, prev_sd):
    """(SD, c3, target speed, target heading) from two time-stamped estimates."""
    sd = _unit(np.asarray(cur.position) - np.asarray(center))
    if not sd.any():
        sd = np.asarray(prev_sd, dtype=np.float64)
    delta = np.asarray(cur.position) - np.asarray(prev.position)
    dt = cur.t - prev.t
    if math.hypot(*delta) < cell or dt <= 0:
        return np.asarray(prev_sd, dtype=np.float64), 0.0, 0.0, None
    speed = math.hypot(*delta) / dt
    c3 = min(speed * duration * 1.25, hp.speed * duration)
    return sd, c3, speed, _unit(delta)


def predicted_position(state):
    """Last estimate advanced along the tracked heading to the current time."""
    if not state.estimates:
        return None
    last = state.estimates[-1]
    pos = np.asarray(last.position, dtype=np.float64)
    if state.target_heading is not None and state.target_speed > 0:
        pos = pos + state.target_speed * max(state.t - last.t, 0.0) * np.asarray(state.target_heading)
    return pos


def lost_heading(state, hp, cell):
    """SD and c3 for a scanning step.

    Once the target has been seen, the swarm heads for its predicted
    position and moves at least min(hp.c3, remaining distance) per step, so
    a swarm that lost a static target away from it returns instead of
    circling where it is.
    """
    pred = predicted_position(state)
    if pred is None:
        return state.sd, state.c3
    towards = pred - state.center
    dist = math.hypot(*towards)
    if dist < cell:
        return state.sd, state.c3
    return _unit(towards), max(state.c3, min(hp.c3, dist))


def classic_pso_velocity(v, p, pbest, gbest, c0, c1, c2, rng):
    """Inertia plus cognitive and social pulls with uniform random weights."""
    v = np.asarray(v, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    r1 = rng.random(p.shape[:-1] + (1,)) if p.ndim > 1 else rng.random()
    r2 = rng.random(p.shape[:-1] + (1,)) if p.ndim > 1 else rng.random()
    return c0 * v + c1 * r1 * (np.asarray(pbest) - p) + c2 * r2 * (np.asarray(gbest) - p)


# ---------------------------------------------------------------- iteration


@dataclass
class IterationResult:
    records: list  # captures of this iteration
    score: float
    integral: object
    best_pose: tuple
    estimate: Estimate  # None when not detected
    mode: Mode
    duration: float
    commanded: np.ndarray  # positions for the next iteration
    log: list


def estimate_time(integral_members, blob_idx):
    """Capture time the blob represents: member times weighted by blob cells seen."""
    weights, times = [], []
    for rec in integral_members:
        k = np.intersect1d(rec.mask_idx, blob_idx, assume_unique=True).size
        if k:
            weights.append(k)
            times.append(rec.t)
    if not weights:
        return None
    return float(np.average(times, weights=weights))


def initial_state(hp, center, sd, plan_slots):
    sd = _unit(sd)
    pos = default_line_positions(center, sd, hp.s, hp.n)
    return SwarmState(pos, np.asarray(plan_slots, dtype=np.float64), sd, hp.c3)


def pso_iteration(state, hp, capture_fn, spec, rng, tau=3, cell=None):
    """One iteration: capture, integrate, decide mode, command next poses.

    ``capture_fn(state)`` returns the CaptureRecords of the current poses.
    ``tau`` counts time instances integrated, the current one included.
    """
    cell = spec.cell if cell is None else cell
    records = capture_fn(state)
    result = integrate_conditional(records, state.history, lambda m: evaluate(m, spec).score, spec)
    ev = evaluate(result.integral, spec)
    score = ev.score
    members = {r.key: r for r in records + state.history}
    contrib = [members[k] for k in result.integral.contributors]

    estimate = None
    new_sd, new_c3 = state.sd, state.c3
    est_list = list(state.estimates)
    speed, heading = state.target_speed, state.target_heading
    if score >= hp.T and score > 0:
        mode = Mode.CONVERGED
        commanded = converge_step(state, hp, result.best_pose, rng)
        te = estimate_time(contrib, ev.blob_idx)
        estimate = Estimate(np.asarray(ev.position), te if te is not None else state.t)
        if not est_list or estimate.t > est_list[-1].t + 1e-9:
            est_list = (est_list + [estimate])[-2:]
    else:
        mode = Mode.SCANNING
        new_sd, c3 = lost_heading(state, hp, cell)
        commanded = scan_step(replace(state, sd=new_sd, c3=c3), hp, rng)

    travel = float(np.max(np.hypot(*(commanded - state.positions).T))) if state.n else 0.0
    duration = max(travel / hp.speed, MIN_ITERATION_S)

    if mode is Mode.CONVERGED and len(est_list) == 2 and est_list[-1] is estimate:
        new_sd, new_c3, speed, heading = update_scan_heading(
            est_list[0], est_list[1], state.center, duration, hp, cell, state.sd)
    elif mode is Mode.CONVERGED and estimate is not None:
        towards = _unit(estimate.position - state.center)
        if towards.any():
            new_sd = towards

    keep = [r for r in state.history + records if r.iteration > state.iteration - tau]
    new_state = replace(
        state, positions=commanded, sd=new_sd, c3=new_c3, mode=mode,
        best_pose=result.best_pose, estimates=est_list, target_speed=speed,
        target_heading=heading, iteration=state.iteration + 1, t=state.t + duration,
        last_score=score, history=keep)
    return new_state, IterationResult(records, score, result.integral, result.best_pose,
                                      estimate, mode, duration, commanded, result.log)


TRAJECTORY_COLUMNS = ("t", "drone_id", "x", "y", "altitude", "mode", "O", "best_pose")


def trajectory_rows(state, res):
    """Rows describing the poses captured in one iteration."""
    rows = []
    for r in res.records:
        x, y, alt = r.pose
        rows.append((f"{r.t:.6f}", r.drone_id, f"{x:.6f}", f"{y:.6f}", f"{alt:.3f}",
                     res.mode.value, int(res.score), int(tuple(r.pose) == tuple(res.best_pose))))
    return rows


def write_trajectory(path, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(TRAJECTORY_COLUMNS)
        w.writerows(rows)
