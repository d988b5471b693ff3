"""Pure-numpy implementations of the hot kernels.

Every function here has a twin with the same signature in
``kernels_numba``; ``kernels`` picks one of the two at import time.
Results must agree bit-for-bit on integer outputs and to rounding on floats.

Primitive codes used by the z-buffer and shading kernels:
    0            ground
    1            target
    2 .. 2+D-1   crown discs
    2+D ..       trunks
"""

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

GROUND = 0
TARGET = 1
PRIM_OFFSET = 2

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0
_SQRT3 = np.sqrt(3.0)


def _splitmix(x):
    z = x + _GOLDEN
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def cell_noise(seed, prim, cell, channel):
    """Unit-variance, zero-mean noise keyed on integers (Irwin-Hall of 4)."""
    with np.errstate(over="ignore"):
        h = _splitmix(np.uint64(seed) + np.zeros_like(np.asarray(cell, dtype=np.uint64)))
        h = _splitmix(h ^ np.asarray(prim).astype(np.uint64))
        h = _splitmix(h ^ np.asarray(cell).astype(np.uint64))
        acc = np.zeros(np.shape(h), dtype=np.float64)
        for k in range(4):
            tag = np.uint64(channel * 4 + k + 1)
            u = (_splitmix(h ^ tag) >> _S11).astype(np.float64) * _INV53
            acc = acc + u
    return (acc - 2.0) * _SQRT3


# ---------------------------------------------------------------- geometry


def _disc_s(p0, p1, disc):
    """Segment parameter where the segment crosses the disc plane, or nan."""
    cx, cy, cz, r = disc
    dz = p1[..., 2] - p0[..., 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        s = (cz - p0[..., 2]) / dz
    x = p0[..., 0] + s * (p1[..., 0] - p0[..., 0])
    y = p0[..., 1] + s * (p1[..., 1] - p0[..., 1])
    ok = (s > 0.0) & (s < 1.0) & ((x - cx) ** 2 + (y - cy) ** 2 <= r * r)
    return np.where(ok, s, np.nan)


def _trunk_s(p0, p1, trunk):
    """Smallest segment parameter inside a vertical cylinder, or nan."""
    tx, ty, r, h = trunk
    dx = p1[..., 0] - p0[..., 0]
    dy = p1[..., 1] - p0[..., 1]
    dz = p1[..., 2] - p0[..., 2]
    qx = p0[..., 0] - tx
    qy = p0[..., 1] - ty
    a = dx * dx + dy * dy
    b = qx * dx + qy * dy
    c = qx * qx + qy * qy - r * r
    disc = b * b - a * c
    with np.errstate(divide="ignore", invalid="ignore"):
        sq = np.sqrt(np.maximum(disc, 0.0))
        lo = np.where(a > 0.0, (-b - sq) / a, np.where(c <= 0.0, -np.inf, np.inf))
        hi = np.where(a > 0.0, (-b + sq) / a, np.where(c <= 0.0, np.inf, -np.inf))
        lo = np.where((a > 0.0) & (disc < 0.0), np.inf, lo)
        # z in [0, h]
        zlo = np.where(dz != 0.0, np.minimum(-p0[..., 2] / dz, (h - p0[..., 2]) / dz), -np.inf)
        zhi = np.where(dz != 0.0, np.maximum(-p0[..., 2] / dz, (h - p0[..., 2]) / dz), np.inf)
    inside_z = (dz != 0.0) | ((p0[..., 2] >= 0.0) & (p0[..., 2] <= h))
    s_in = np.maximum(np.maximum(lo, zlo), 0.0)
    s_out = np.minimum(np.minimum(hi, zhi), 1.0)
    ok = inside_z & (s_in <= s_out) & (s_out > 0.0) & (s_in < 1.0)
    return np.where(ok, s_in, np.nan)


def _box_s(p0, p1, box):
    """Entry parameter into an upright oriented box, or nan.

    box = (cx, cy, heading, half_depth, half_width, height)
    """
    cx, cy, th, hd, hw, hz = box
    c, s = np.cos(th), np.sin(th)
    ax0 = (p0[..., 0] - cx) * c + (p0[..., 1] - cy) * s
    bx0 = -(p0[..., 0] - cx) * s + (p0[..., 1] - cy) * c
    ax1 = (p1[..., 0] - cx) * c + (p1[..., 1] - cy) * s
    bx1 = -(p1[..., 0] - cx) * s + (p1[..., 1] - cy) * c
    s_in = np.zeros(np.shape(ax0))
    s_out = np.ones(np.shape(ax0))
    ok = np.ones(np.shape(ax0), dtype=bool)
    for v0, v1, lo, hi in ((ax0, ax1, -hd, hd), (bx0, bx1, -hw, hw),
                           (p0[..., 2], p1[..., 2], 0.0, hz)):
        d = v1 - v0
        par = d == 0.0
        ok &= ~par | ((v0 >= lo) & (v0 <= hi))
        with np.errstate(divide="ignore", invalid="ignore"):
            t0 = (lo - v0) / d
            t1 = (hi - v0) / d
        tmin = np.where(par, -np.inf, np.minimum(t0, t1))
        tmax = np.where(par, np.inf, np.maximum(t0, t1))
        s_in = np.maximum(s_in, tmin)
        s_out = np.minimum(s_out, tmax)
    ok &= s_in <= s_out
    return np.where(ok, s_in, np.nan)


def segments_occluded(starts, ends, discs, trunks):
    """Boolean per segment: does the open segment hit any disc or trunk."""
    starts = np.asarray(starts, dtype=np.float64)
    ends = np.asarray(ends, dtype=np.float64)
    hit = np.zeros(len(starts), dtype=bool)
    lo = np.minimum(starts, ends)
    hi = np.maximum(starts, ends)
    for d in discs:
        cand = ((lo[:, 2] < d[2]) & (hi[:, 2] > d[2])
                & (lo[:, 0] <= d[0] + d[3]) & (hi[:, 0] >= d[0] - d[3])
                & (lo[:, 1] <= d[1] + d[3]) & (hi[:, 1] >= d[1] - d[3]) & ~hit)
        if cand.any():
            idx = np.flatnonzero(cand)
            hit[idx] = ~np.isnan(_disc_s(starts[idx], ends[idx], d))
    for t in trunks:
        cand = ((lo[:, 2] < t[3]) & (lo[:, 0] <= t[0] + t[2]) & (hi[:, 0] >= t[0] - t[2])
                & (lo[:, 1] <= t[1] + t[2]) & (hi[:, 1] >= t[1] - t[2]) & ~hit)
        if cand.any():
            idx = np.flatnonzero(cand)
            s = _trunk_s(starts[idx], ends[idx], t)
            hit[idx] = ~np.isnan(s) & (s < 1.0)
    return hit


def segments_hit_box(starts, ends, box):
    s = _box_s(np.asarray(starts, float), np.asarray(ends, float), box)
    return ~np.isnan(s) & (s < 1.0)


# ---------------------------------------------------------------- rendering


def _window_centers(win, grid):
    i0, j0, h, w = win
    x0, y0, cell = grid[0], grid[1], grid[2]
    ys = y0 + (np.arange(i0, i0 + h) + 0.5) * cell
    xs = x0 + (np.arange(j0, j0 + w) + 0.5) * cell
    return xs, ys


def _bbox_cells(xmin, xmax, ymin, ymax, win, grid):
    i0, j0, h, w = win
    x0, y0, cell = grid[0], grid[1], grid[2]
    ja = max(int(np.floor((xmin - x0) / cell - 0.5)) - j0, 0)
    jb = min(int(np.ceil((xmax - x0) / cell - 0.5)) - j0, w - 1)
    ia = max(int(np.floor((ymin - y0) / cell - 0.5)) - i0, 0)
    ib = min(int(np.ceil((ymax - y0) / cell - 0.5)) - i0, h - 1)
    return ia, ib, ja, jb


def zbuffer(cam, win, grid, discs, trunks, box):
    """First-hit z-buffer of a nadir camera over a raster window.

    Returns (depth, code): depth is the height of the first surface hit by
    the ray camera -> cell centre (0 for bare ground), code the primitive.
    """
    i0, j0, h, w = win
    xs, ys = _window_centers(win, grid)
    depth = np.zeros((h, w))
    code = np.zeros((h, w), dtype=np.int64)
    cx, cy, cz = cam
    nd = len(discs)

    def splat(ia, ib, ja, jb, fn, prim, code_value):
        if ia > ib or ja > jb:
            return
        gx, gy = np.meshgrid(xs[ja:jb + 1], ys[ia:ib + 1])
        ends = np.stack([gx, gy, np.zeros_like(gx)], axis=-1)
        starts = np.broadcast_to(np.array([cx, cy, cz]), ends.shape)
        s = fn(starts, ends, prim)
        z = cz * (1.0 - s)
        sub_d = depth[ia:ib + 1, ja:jb + 1]
        sub_c = code[ia:ib + 1, ja:jb + 1]
        upd = ~np.isnan(s) & (s < 1.0) & (z > sub_d)
        sub_d[upd] = z[upd]
        sub_c[upd] = code_value

    if nd:
        f = cz / (cz - discs[:, 2])
        px = cx + (discs[:, 0] - cx) * f
        py = cy + (discs[:, 1] - cy) * f
        pr = discs[:, 3] * f
        xs_lo, xs_hi = xs[0] if w else 0, xs[-1] if w else 0
        ys_lo, ys_hi = ys[0] if h else 0, ys[-1] if h else 0
        vis = ((discs[:, 2] < cz) & (px + pr >= xs_lo) & (px - pr <= xs_hi)
               & (py + pr >= ys_lo) & (py - pr <= ys_hi))
        for k in np.flatnonzero(vis):
            ia, ib, ja, jb = _bbox_cells(px[k] - pr[k], px[k] + pr[k],
                                         py[k] - pr[k], py[k] + pr[k], win, grid)
            splat(ia, ib, ja, jb, _disc_s, discs[k], PRIM_OFFSET + k)
    for k, t in enumerate(trunks):
        if t[3] >= cz:
            continue
        f = cz / (cz - t[3])
        tx = cx + (t[0] - cx) * f
        ty = cy + (t[1] - cy) * f
        tr = t[2] * f
        ia, ib, ja, jb = _bbox_cells(min(t[0] - t[2], tx - tr), max(t[0] + t[2], tx + tr),
                                     min(t[1] - t[2], ty - tr), max(t[1] + t[2], ty + tr),
                                     win, grid)
        splat(ia, ib, ja, jb, _trunk_s, t, PRIM_OFFSET + nd + k)
    if box is not None:
        bx, by, th, hd, hw, hz = box
        c, s = np.cos(th), np.sin(th)
        px, py = [], []
        for a in (-hd, hd):
            for b in (-hw, hw):
                x = bx + a * c - b * s
                y = by + a * s + b * c
                px.append(x)
                py.append(y)
                f = cz / (cz - hz)
                px.append(cx + (x - cx) * f)
                py.append(cy + (y - cy) * f)
        ia, ib, ja, jb = _bbox_cells(min(px), max(px), min(py), max(py), win, grid)
        splat(ia, ib, ja, jb, _box_s, box, TARGET)
    return depth, code


def shade(code, depth, win, world_w, seed, prim_base, prim_amp,
          ground_base, ground_amp, target_base, target_amp, target_height, target_gain):
    """Channel values for every cell of a z-buffer (4 bands)."""
    i0, j0, h, w = win
    ii, jj = np.meshgrid(np.arange(i0, i0 + h), np.arange(j0, j0 + w), indexing="ij")
    cell = (ii * world_w + jj).astype(np.int64)
    out = np.empty((h, w, 4))
    is_g = code == GROUND
    is_t = code == TARGET
    is_p = ~(is_g | is_t)
    pidx = np.where(is_p, code - PRIM_OFFSET, 0)
    for ch in range(4):
        nz = cell_noise(seed, code, cell, ch)
        base = np.where(is_g, ground_base[ch], np.where(is_t, target_base[ch], prim_base[pidx, ch]))
        amp = np.where(is_g, ground_amp[ch], np.where(is_t, target_amp[ch], prim_amp[pidx, ch]))
        out[..., ch] = base + amp * nz
    out[..., 3] += np.where(is_t, target_gain * (depth / target_height - 0.5), 0.0)
    return out


# ---------------------------------------------------------------- swarm


def repel(pos, c4, angles, max_sweeps):
    """Pairwise symmetric push-apart until every pair is >= c4 apart.

    Returns (positions, sweeps_used, converged). ``angles`` supplies the
    separation directions for coincident pairs, consumed cyclically.
    """
    p = np.array(pos, dtype=np.float64)
    n = len(p)
    used = 0
    for sweep in range(max_sweeps):
        moved = False
        for i in range(n):
            for j in range(i + 1, n):
                dx = p[j, 0] - p[i, 0]
                dy = p[j, 1] - p[i, 1]
                d = np.sqrt(dx * dx + dy * dy)
                if d >= c4:
                    continue
                if d == 0.0:
                    a = angles[used % len(angles)]
                    used += 1
                    ux, uy = np.cos(a), np.sin(a)
                else:
                    ux, uy = dx / d, dy / d
                push = (c4 - d) / 2.0 + 1e-6
                p[i, 0] -= ux * push
                p[i, 1] -= uy * push
                p[j, 0] += ux * push
                p[j, 1] += uy * push
                moved = True
        if not moved:
            return p, sweep, True
    return p, max_sweeps, False


# ---------------------------------------------------------------- blobs


def label_sparse(idx, width, height):
    """8-connected component labels for sorted unique flat cell indices.

    Labels are numbered 0.. in order of each component's first cell in
    raster order.
    """
    idx = np.asarray(idx, dtype=np.int64)
    n = len(idx)
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    r = idx // width
    c = idx % width
    rows, cols = [], []
    for dr, dc in ((0, -1), (-1, -1), (-1, 0), (-1, 1)):
        nr, nc = r + dr, c + dc
        ok = (nr >= 0) & (nc >= 0) & (nc < width)
        nb = nr * width + nc
        pos = np.searchsorted(idx, nb)
        pos_c = np.minimum(pos, n - 1)
        found = ok & (pos < n) & (idx[pos_c] == nb)
        rows.append(np.flatnonzero(found))
        cols.append(pos_c[found])
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    g = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    _, raw = connected_components(g, directed=False)
    first = np.full(raw.max() + 1, n, dtype=np.int64)
    np.minimum.at(first, raw, np.arange(n))
    order = np.argsort(first, kind="stable")
    remap = np.empty_like(order)
    remap[order] = np.arange(len(order))
    return remap[raw]


def border_flags(idx, width, height):
    """True for cells with at least one 4-neighbour absent or off-window."""
    idx = np.asarray(idx, dtype=np.int64)
    n = len(idx)
    out = np.zeros(n, dtype=bool)
    if n == 0:
        return out
    r = idx // width
    c = idx % width
    for dr, dc in ((0, -1), (0, 1), (-1, 0), (1, 0)):
        nr, nc = r + dr, c + dc
        ok = (nr >= 0) & (nr < height) & (nc >= 0) & (nc < width)
        nb = nr * width + nc
        pos = np.minimum(np.searchsorted(idx, nb), n - 1)
        out |= ~(ok & (idx[pos] == nb))
    return out
