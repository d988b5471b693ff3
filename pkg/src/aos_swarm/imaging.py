"""Image formation on a common world ground raster and conditional mask integration.

Cameras look straight down and the ground is the plane z = 0, so every
capture is orthorectified exactly by sampling the ray camera -> cell centre
for the cells inside the camera's square ground footprint. Masks from all
drones therefore share one world grid and integration is a cell-wise OR.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from .errors import InputError


@dataclass(frozen=True)
class CameraModel:
    fov_deg: float = 50.0
    px: int = 512 * 512

    def __post_init__(self):
        if not 0.0 < self.fov_deg < 180.0:
            raise InputError(f"fov must be in (0, 180), got {self.fov_deg}")

    def footprint_side(self, altitude):
        return 2.0 * altitude * math.tan(math.radians(self.fov_deg) / 2.0)


@dataclass(frozen=True)
class RasterSpec:
    """World grid: cell (i, j) has its centre at origin + ((j, i) + 0.5) * cell."""

    x0: float
    y0: float
    cell: float
    width: int
    height: int

    def __post_init__(self):
        if not self.cell > 0:
            raise InputError("cell size must be positive")

    @classmethod
    def from_bounds(cls, bounds, cell=0.25):
        xmin, ymin, xmax, ymax = bounds
        return cls(float(xmin), float(ymin), float(cell),
                   int(round((xmax - xmin) / cell)), int(round((ymax - ymin) / cell)))

    @property
    def grid(self):
        return (self.x0, self.y0, self.cell)

    def cell_center(self, i, j):
        return (self.x0 + (np.asarray(j) + 0.5) * self.cell,
                self.y0 + (np.asarray(i) + 0.5) * self.cell)

    def footprint_window(self, x, y, side):
        """(i0, j0, h, w) of cells whose centres lie in the square, clipped."""
        half = side / 2.0
        j0 = max(math.ceil((x - half - self.x0) / self.cell - 0.5), 0)
        j1 = min(math.floor((x + half - self.x0) / self.cell - 0.5), self.width - 1)
        i0 = max(math.ceil((y - half - self.y0) / self.cell - 0.5), 0)
        i1 = min(math.floor((y + half - self.y0) / self.cell - 0.5), self.height - 1)
        h, w = max(i1 - i0 + 1, 0), max(j1 - j0 + 1, 0)
        if h == 0 or w == 0:
            return (min(i0, self.height), min(j0, self.width), 0, 0)
        return (i0, j0, h, w)


def window_area_cells(win):
    return win[2] * win[3]


def windows_overlap(a, b):
    return (a[0] < b[0] + b[2] and b[0] < a[0] + a[2]
            and a[1] < b[1] + b[3] and b[1] < a[1] + a[3]
            and min(a[2], a[3], b[2], b[3]) > 0)


def to_local(idx, spec, win):
    """Global flat cell indices -> sorted window-local flat indices (others dropped)."""
    idx = np.asarray(idx, dtype=np.int64)
    r = idx // spec.width - win[0]
    c = idx % spec.width - win[1]
    keep = (r >= 0) & (r < win[2]) & (c >= 0) & (c < win[3])
    return r[keep] * win[3] + c[keep]


def to_global(local, spec, win):
    local = np.asarray(local, dtype=np.int64)
    return (local // win[3] + win[0]) * spec.width + (local % win[3] + win[1])


@dataclass
class GroundRaster:
    """4-band raster over a window of the world grid."""

    spec: RasterSpec
    window: tuple
    channels: np.ndarray  # (h, w, 4)
    coverage: np.ndarray  # (h, w) bool
    labels: np.ndarray = None  # primitive code of the first hit, for diagnostics

    @property
    def shape(self):
        return self.channels.shape[:2]

    def covered_values(self):
        return self.channels[self.coverage]


@dataclass
class CaptureRecord:
    drone_id: int
    pose: tuple  # (x, y, altitude)
    t: float
    iteration: int
    window: tuple
    mask_idx: np.ndarray  # sorted global flat indices of flagged cells
    footprint_side: float = 0.0

    @property
    def key(self):
        return (self.iteration, self.drone_id)

    def dense_mask(self, spec):
        m = np.zeros(self.window[2] * self.window[3], dtype=bool)
        m[to_local(self.mask_idx, spec, self.window)] = True
        return m.reshape(self.window[2], self.window[3])


@dataclass
class IntegralMask:
    reference_pose: tuple
    window: tuple
    mask_idx: np.ndarray  # sorted global flat indices, restricted to window
    contributors: list = field(default_factory=list)  # capture keys

    def local(self, spec):
        return to_local(self.mask_idx, spec, self.window)


def render_single(scene, target, t, pose, camera, spec, include_target=True):
    """Render one nadir capture onto the world raster window under its footprint."""
    x, y, alt = pose
    if not alt > scene.max_height:
        raise InputError(f"camera altitude {alt} is not above the canopy ({scene.max_height})")
    win = spec.footprint_window(x, y, camera.footprint_side(alt))
    box = target.box(t) if (include_target and target is not None) else None
    depth, code = kernels.zbuffer((x, y, alt), win, spec.grid, scene.discs, scene.trunks, box)
    base, amp = scene.prim_colors
    app = scene.appearance
    if target is not None:
        tb, ta, th = target.base_values, np.asarray(app.target_texture), target.height
    else:
        tb, ta, th = np.zeros(4), np.zeros(4), 1.0
    channels = kernels.shade(code, depth, win, spec.width, scene.seed, base, amp,
                             np.asarray(app.ground), np.asarray(app.ground_texture),
                             tb, ta, th, app.target_thermal_gain)
    coverage = np.ones(code.shape, dtype=bool)
    return GroundRaster(spec, win, channels, coverage, code)


def _union(records, spec, win):
    parts = [to_local(r.mask_idx, spec, win) for r in records]
    if not parts:
        return np.zeros(0, dtype=np.int64)
    return np.unique(np.concatenate(parts))


def _integral(ref, members, spec):
    local = _union(members, spec, ref.window)
    return IntegralMask(ref.pose, ref.window, to_global(local, spec, ref.window),
                        [m.key for m in members])


@dataclass
class IntegrationResult:
    integral: IntegralMask
    best_pose: tuple
    score: float
    reference: CaptureRecord
    log: list  # (action, capture key, score before, score after)


def integrate_conditional(latest, history, objective_fn, spec):
    """Best-reference conditional integration of binary anomaly masks.

    1. every latest capture is tried as reference; the OR of all latest masks
       cropped to its footprint is scored; best wins (ties: lowest drone id);
    2. history records, most recent first, are added if their footprint
       overlaps the reference footprint and the score strictly increases;
       the pass repeats until it adds nothing;
    3. latest records are removed (ascending drone id) if that strictly
       increases the score.
    """
    if not latest:
        raise InputError("integrate_conditional needs at least one latest capture")
    for r in list(latest) + list(history):
        if r.mask_idx.size and (r.mask_idx.max() >= spec.width * spec.height):
            raise InputError("capture mask does not match the raster spec")
        if r.window[0] + r.window[2] > spec.height or r.window[1] + r.window[3] > spec.width:
            raise InputError("capture window does not match the raster spec")
    latest = sorted(latest, key=lambda r: r.drone_id)
    best = None
    for ref in latest:
        score = objective_fn(_integral(ref, latest, spec))
        if best is None or score > best[1]:
            best = (ref, score)
    ref, score = best
    members = list(latest)
    log = []
    seen = {m.key for m in members}
    candidates = [r for r in sorted(history, key=lambda r: (-r.t, -r.iteration, r.drone_id))
                  if r.key not in seen and windows_overlap(r.window, ref.window)]
    # repeat the most-recent-first pass: a record can become useful once a
    # later-scanned record has bridged it to the blob
    added = True
    while added:
        added = False
        for rec in candidates:
            if rec.key in seen:
                continue
            trial = objective_fn(_integral(ref, members + [rec], spec))
            if trial > score:
                log.append(("add", rec.key, score, trial))
                members.append(rec)
                seen.add(rec.key)
                score = trial
                added = True
    for rec in latest:
        if len(members) == 1:
            break
        rest = [m for m in members if m.key != rec.key]
        trial = objective_fn(_integral(ref, rest, spec))
        if trial > score:
            log.append(("remove", rec.key, score, trial))
            members = rest
            score = trial
    return IntegrationResult(_integral(ref, members, spec), ref.pose, score, ref, log)


def integrate_all(records, ref_window, spec, pose=None):
    """Unconditional OR of every record, cropped to ``ref_window``."""
    local = _union(records, spec, ref_window)
    return IntegralMask(pose, ref_window, to_global(local, spec, ref_window),
                        [r.key for r in records])


def union_window(records, spec):
    """Smallest window covering all record footprints."""
    if not records:
        return (0, 0, 0, 0)
    i0 = min(r.window[0] for r in records)
    j0 = min(r.window[1] for r in records)
    i1 = max(r.window[0] + r.window[2] for r in records)
    j1 = max(r.window[1] + r.window[3] for r in records)
    return (i0, j0, i1 - i0, j1 - j0)


def coverage_area(records, spec, win=None):
    """Area (m^2) of the union of the records' footprints."""
    if not records:
        return 0.0
    win = win or union_window(records, spec)
    m = np.zeros((win[2], win[3]), dtype=bool)
    for r in records:
        a = max(r.window[0] - win[0], 0)
        b = max(r.window[1] - win[1], 0)
        m[a:max(r.window[0] + r.window[2] - win[0], 0), b:max(r.window[1] + r.window[3] - win[1], 0)] = True
    return float(m.sum()) * spec.cell ** 2


# ---------------------------------------------------------------- raster dumps


def _header(kind, w, h, spec, win, maxval):
    ox, oy = spec.cell_center(win[0], win[1])
    ox, oy = float(ox) - spec.cell / 2, float(oy) - spec.cell / 2
    return (f"{kind}\n# cell_m {spec.cell!r}\n# origin_m {ox!r} {oy!r}\n"
            f"{w} {h}\n{maxval}\n")


def write_pgm(path, values, spec, win, maxval=255):
    """Plain (ASCII) graymap; rows written north (max y) first."""
    v = np.asarray(values)
    if v.dtype == bool:
        q = v.astype(int) * maxval
    else:
        lo, hi = float(np.min(v)), float(np.max(v))
        q = np.zeros(v.shape, dtype=int) if hi <= lo else np.rint((v - lo) / (hi - lo) * maxval).astype(int)
    q = q[::-1]
    lines = [" ".join(map(str, row)) for row in q]
    Path(path).write_text(_header("P2", v.shape[1], v.shape[0], spec, win, maxval) + "\n".join(lines) + "\n")


def write_ppm(path, rgb, spec, win, maxval=255):
    q = np.clip(np.rint(np.asarray(rgb) * maxval), 0, maxval).astype(int)[::-1]
    lines = [" ".join(map(str, row.ravel())) for row in q]
    Path(path).write_text(_header("P3", q.shape[1], q.shape[0], spec, win, maxval) + "\n".join(lines) + "\n")


def read_pnm(path):
    """Parse a plain P2/P3 file written by write_pgm/write_ppm.

    Returns (array rows-south-first, cell size, origin).
    """
    text = Path(path).read_text().splitlines()
    kind = text[0].strip()
    meta = {}
    body = []
    for line in text[1:]:
        if line.startswith("#"):
            k, *vals = line[1:].split()
            meta[k] = [float(v) for v in vals]
        else:
            body.extend(line.split())
    w, h, _ = int(body[0]), int(body[1]), int(body[2])
    data = np.array(body[3:], dtype=int)
    arr = data.reshape(h, w, 3) if kind == "P3" else data.reshape(h, w)
    return arr[::-1], meta["cell_m"][0], tuple(meta["origin_m"])


def dump_capture(outdir, image, record, spec):
    """Write RGB, thermal and mask rasters for one capture."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    stem = f"t{record.t:09.3f}_d{record.drone_id:02d}"
    write_ppm(outdir / f"{stem}_rgb.ppm", image.channels[..., :3], spec, image.window)
    write_pgm(outdir / f"{stem}_thermal.pgm", image.channels[..., 3], spec, image.window)
    write_pgm(outdir / f"{stem}_mask.pgm", record.dense_mask(spec), spec, record.window)


def dump_integral(outdir, integral, spec, t):
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    m = np.zeros(integral.window[2] * integral.window[3], dtype=bool)
    m[integral.local(spec)] = True
    write_pgm(outdir / f"t{t:09.3f}_integral.pgm", m.reshape(integral.window[2], integral.window[3]),
              spec, integral.window)
