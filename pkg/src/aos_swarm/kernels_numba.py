"""numba-compiled twins of ``kernels_numpy``. Same signatures, same results."""

import math

import numpy as np
from numba import njit

from .kernels_numpy import GROUND, PRIM_OFFSET, TARGET

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0
_SQRT3 = math.sqrt(3.0)

_jit = njit(cache=True, nogil=True)


@_jit
def _splitmix(x):
    z = x + _GOLDEN
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@_jit
def _noise1(seed, prim, cell, channel):
    h = _splitmix(np.uint64(seed))
    h = _splitmix(h ^ np.uint64(prim))
    h = _splitmix(h ^ np.uint64(cell))
    acc = 0.0
    for k in range(4):
        tag = np.uint64(channel * 4 + k + 1)
        acc += float(_splitmix(h ^ tag) >> _S11) * _INV53
    return (acc - 2.0) * _SQRT3


@_jit
def _cell_noise(seed, prim, cell, channel):
    out = np.empty(prim.shape[0])
    for k in range(prim.shape[0]):
        out[k] = _noise1(seed, prim[k], cell[k], channel)
    return out


def cell_noise(seed, prim, cell, channel):
    prim = np.asarray(prim, dtype=np.int64)
    cell = np.broadcast_to(np.asarray(cell, dtype=np.int64), prim.shape)
    shape = prim.shape
    return _cell_noise(int(seed), prim.ravel().copy(), cell.ravel().copy(),
                       int(channel)).reshape(shape)


# ---------------------------------------------------------------- geometry


@_jit
def _disc_s(x0, y0, z0, x1, y1, z1, cx, cy, cz, r):
    dz = z1 - z0
    if dz == 0.0:
        return np.nan
    s = (cz - z0) / dz
    if not (s > 0.0 and s < 1.0):
        return np.nan
    x = x0 + s * (x1 - x0)
    y = y0 + s * (y1 - y0)
    if (x - cx) ** 2 + (y - cy) ** 2 <= r * r:
        return s
    return np.nan


@_jit
def _trunk_s(x0, y0, z0, x1, y1, z1, tx, ty, r, h):
    dx = x1 - x0
    dy = y1 - y0
    dz = z1 - z0
    qx = x0 - tx
    qy = y0 - ty
    a = dx * dx + dy * dy
    b = qx * dx + qy * dy
    c = qx * qx + qy * qy - r * r
    disc = b * b - a * c
    if a > 0.0:
        if disc < 0.0:
            return np.nan
        sq = math.sqrt(max(disc, 0.0))
        lo = (-b - sq) / a
        hi = (-b + sq) / a
    else:
        if c <= 0.0:
            lo = -np.inf
            hi = np.inf
        else:
            return np.nan
    if dz != 0.0:
        za = -z0 / dz
        zb = (h - z0) / dz
        zlo = min(za, zb)
        zhi = max(za, zb)
    else:
        if z0 < 0.0 or z0 > h:
            return np.nan
        zlo = -np.inf
        zhi = np.inf
    s_in = max(max(lo, zlo), 0.0)
    s_out = min(min(hi, zhi), 1.0)
    if s_in <= s_out and s_out > 0.0 and s_in < 1.0:
        return s_in
    return np.nan


@_jit
def _box_s(x0, y0, z0, x1, y1, z1, cx, cy, th, hd, hw, hz):
    c = math.cos(th)
    s = math.sin(th)
    ax0 = (x0 - cx) * c + (y0 - cy) * s
    bx0 = -(x0 - cx) * s + (y0 - cy) * c
    ax1 = (x1 - cx) * c + (y1 - cy) * s
    bx1 = -(x1 - cx) * s + (y1 - cy) * c
    s_in = 0.0
    s_out = 1.0
    v0s = (ax0, bx0, z0)
    v1s = (ax1, bx1, z1)
    los = (-hd, -hw, 0.0)
    his = (hd, hw, hz)
    for k in range(3):
        v0 = v0s[k]
        d = v1s[k] - v0
        lo = los[k]
        hi = his[k]
        if d == 0.0:
            if v0 < lo or v0 > hi:
                return np.nan
            continue
        t0 = (lo - v0) / d
        t1 = (hi - v0) / d
        s_in = max(s_in, min(t0, t1))
        s_out = min(s_out, max(t0, t1))
    if s_in <= s_out:
        return s_in
    return np.nan


@_jit
def _segments_occluded(starts, ends, discs, trunks):
    n = starts.shape[0]
    hit = np.zeros(n, dtype=np.bool_)
    for q in range(n):
        x0, y0, z0 = starts[q, 0], starts[q, 1], starts[q, 2]
        x1, y1, z1 = ends[q, 0], ends[q, 1], ends[q, 2]
        lx, hx = min(x0, x1), max(x0, x1)
        ly, hy = min(y0, y1), max(y0, y1)
        lz, hz = min(z0, z1), max(z0, z1)
        found = False
        for k in range(discs.shape[0]):
            cx, cy, cz, r = discs[k, 0], discs[k, 1], discs[k, 2], discs[k, 3]
            if not (lz < cz < hz):
                continue
            if lx > cx + r or hx < cx - r or ly > cy + r or hy < cy - r:
                continue
            if not np.isnan(_disc_s(x0, y0, z0, x1, y1, z1, cx, cy, cz, r)):
                found = True
                break
        if not found:
            for k in range(trunks.shape[0]):
                tx, ty, r, h = trunks[k, 0], trunks[k, 1], trunks[k, 2], trunks[k, 3]
                if lz >= h:
                    continue
                if lx > tx + r or hx < tx - r or ly > ty + r or hy < ty - r:
                    continue
                s = _trunk_s(x0, y0, z0, x1, y1, z1, tx, ty, r, h)
                if not np.isnan(s) and s < 1.0:
                    found = True
                    break
        hit[q] = found
    return hit


def segments_occluded(starts, ends, discs, trunks):
    return _segments_occluded(np.ascontiguousarray(starts, dtype=np.float64).reshape(-1, 3),
                              np.ascontiguousarray(ends, dtype=np.float64).reshape(-1, 3),
                              np.ascontiguousarray(discs, dtype=np.float64).reshape(-1, 4),
                              np.ascontiguousarray(trunks, dtype=np.float64).reshape(-1, 4))


@_jit
def _segments_hit_box(starts, ends, box):
    n = starts.shape[0]
    out = np.zeros(n, dtype=np.bool_)
    for q in range(n):
        s = _box_s(starts[q, 0], starts[q, 1], starts[q, 2],
                   ends[q, 0], ends[q, 1], ends[q, 2],
                   box[0], box[1], box[2], box[3], box[4], box[5])
        out[q] = (not np.isnan(s)) and s < 1.0
    return out


def segments_hit_box(starts, ends, box):
    return _segments_hit_box(np.ascontiguousarray(starts, dtype=np.float64),
                             np.ascontiguousarray(ends, dtype=np.float64),
                             np.asarray(box, dtype=np.float64))


# ---------------------------------------------------------------- rendering


@_jit
def _bbox_cells(xmin, xmax, ymin, ymax, i0, j0, h, w, x0, y0, cell):
    ja = max(int(math.floor((xmin - x0) / cell - 0.5)) - j0, 0)
    jb = min(int(math.ceil((xmax - x0) / cell - 0.5)) - j0, w - 1)
    ia = max(int(math.floor((ymin - y0) / cell - 0.5)) - i0, 0)
    ib = min(int(math.ceil((ymax - y0) / cell - 0.5)) - i0, h - 1)
    return ia, ib, ja, jb


@_jit
def _zbuffer(cam, win, grid, discs, trunks, box, has_box):
    i0, j0, h, w = win[0], win[1], win[2], win[3]
    x0, y0, cell = grid[0], grid[1], grid[2]
    cx, cy, cz = cam[0], cam[1], cam[2]
    depth = np.zeros((h, w))
    code = np.zeros((h, w), dtype=np.int64)
    nd = discs.shape[0]
    if h == 0 or w == 0:
        return depth, code
    xs_lo = x0 + (j0 + 0.5) * cell
    xs_hi = x0 + (j0 + w - 1 + 0.5) * cell
    ys_lo = y0 + (i0 + 0.5) * cell
    ys_hi = y0 + (i0 + h - 1 + 0.5) * cell
    for k in range(nd):
        dzk = discs[k, 2]
        if dzk >= cz:
            continue
        f = cz / (cz - dzk)
        px = cx + (discs[k, 0] - cx) * f
        py = cy + (discs[k, 1] - cy) * f
        pr = discs[k, 3] * f
        if px + pr < xs_lo or px - pr > xs_hi or py + pr < ys_lo or py - pr > ys_hi:
            continue
        ia, ib, ja, jb = _bbox_cells(px - pr, px + pr, py - pr, py + pr,
                                     i0, j0, h, w, x0, y0, cell)
        for i in range(ia, ib + 1):
            gy = y0 + (i0 + i + 0.5) * cell
            for j in range(ja, jb + 1):
                gx = x0 + (j0 + j + 0.5) * cell
                s = _disc_s(cx, cy, cz, gx, gy, 0.0,
                            discs[k, 0], discs[k, 1], dzk, discs[k, 3])
                if not np.isnan(s) and s < 1.0:
                    z = cz * (1.0 - s)
                    if z > depth[i, j]:
                        depth[i, j] = z
                        code[i, j] = PRIM_OFFSET + k
    for k in range(trunks.shape[0]):
        tx, ty, r, th = trunks[k, 0], trunks[k, 1], trunks[k, 2], trunks[k, 3]
        if th >= cz:
            continue
        f = cz / (cz - th)
        px = cx + (tx - cx) * f
        py = cy + (ty - cy) * f
        pr = r * f
        ia, ib, ja, jb = _bbox_cells(min(tx - r, px - pr), max(tx + r, px + pr),
                                     min(ty - r, py - pr), max(ty + r, py + pr),
                                     i0, j0, h, w, x0, y0, cell)
        for i in range(ia, ib + 1):
            gy = y0 + (i0 + i + 0.5) * cell
            for j in range(ja, jb + 1):
                gx = x0 + (j0 + j + 0.5) * cell
                s = _trunk_s(cx, cy, cz, gx, gy, 0.0, tx, ty, r, th)
                if not np.isnan(s) and s < 1.0:
                    z = cz * (1.0 - s)
                    if z > depth[i, j]:
                        depth[i, j] = z
                        code[i, j] = PRIM_OFFSET + nd + k
    if has_box:
        bx, by, bth, hd, hw, hz = box[0], box[1], box[2], box[3], box[4], box[5]
        c = math.cos(bth)
        sn = math.sin(bth)
        f = cz / (cz - hz)
        xmin = np.inf
        xmax = -np.inf
        ymin = np.inf
        ymax = -np.inf
        for a in (-hd, hd):
            for b in (-hw, hw):
                x = bx + a * c - b * sn
                y = by + a * sn + b * c
                xt = cx + (x - cx) * f
                yt = cy + (y - cy) * f
                xmin = min(xmin, x, xt)
                xmax = max(xmax, x, xt)
                ymin = min(ymin, y, yt)
                ymax = max(ymax, y, yt)
        ia, ib, ja, jb = _bbox_cells(xmin, xmax, ymin, ymax, i0, j0, h, w, x0, y0, cell)
        for i in range(ia, ib + 1):
            gy = y0 + (i0 + i + 0.5) * cell
            for j in range(ja, jb + 1):
                gx = x0 + (j0 + j + 0.5) * cell
                s = _box_s(cx, cy, cz, gx, gy, 0.0, bx, by, bth, hd, hw, hz)
                if not np.isnan(s) and s < 1.0:
                    z = cz * (1.0 - s)
                    if z > depth[i, j]:
                        depth[i, j] = z
                        code[i, j] = TARGET
    return depth, code


def zbuffer(cam, win, grid, discs, trunks, box):
    has_box = box is not None
    b = np.asarray(box if has_box else np.zeros(6), dtype=np.float64)
    return _zbuffer(np.asarray(cam, dtype=np.float64), np.asarray(win, dtype=np.int64),
                    np.asarray(grid, dtype=np.float64),
                    np.ascontiguousarray(discs, dtype=np.float64).reshape(-1, 4),
                    np.ascontiguousarray(trunks, dtype=np.float64).reshape(-1, 4),
                    b, has_box)


@_jit
def _shade(code, depth, i0, j0, world_w, seed, prim_base, prim_amp,
           ground_base, ground_amp, target_base, target_amp, target_height, target_gain):
    h, w = code.shape
    out = np.empty((h, w, 4))
    for i in range(h):
        for j in range(w):
            k = code[i, j]
            cell = (i0 + i) * world_w + (j0 + j)
            for ch in range(4):
                nz = _noise1(seed, k, cell, ch)
                if k == GROUND:
                    v = ground_base[ch] + ground_amp[ch] * nz
                elif k == TARGET:
                    v = target_base[ch] + target_amp[ch] * nz
                    if ch == 3:
                        v += target_gain * (depth[i, j] / target_height - 0.5)
                else:
                    p = k - PRIM_OFFSET
                    v = prim_base[p, ch] + prim_amp[p, ch] * nz
                out[i, j, ch] = v
    return out


def shade(code, depth, win, world_w, seed, prim_base, prim_amp,
          ground_base, ground_amp, target_base, target_amp, target_height, target_gain):
    return _shade(code, depth, int(win[0]), int(win[1]), int(world_w), int(seed),
                  np.ascontiguousarray(prim_base, dtype=np.float64).reshape(-1, 4),
                  np.ascontiguousarray(prim_amp, dtype=np.float64).reshape(-1, 4),
                  np.asarray(ground_base, dtype=np.float64),
                  np.asarray(ground_amp, dtype=np.float64),
                  np.asarray(target_base, dtype=np.float64),
                  np.asarray(target_amp, dtype=np.float64),
                  float(target_height), float(target_gain))


# ---------------------------------------------------------------- swarm


@_jit
def _repel(p, c4, angles, max_sweeps):
    n = p.shape[0]
    used = 0
    for sweep in range(max_sweeps):
        moved = False
        for i in range(n):
            for j in range(i + 1, n):
                dx = p[j, 0] - p[i, 0]
                dy = p[j, 1] - p[i, 1]
                d = math.sqrt(dx * dx + dy * dy)
                if d >= c4:
                    continue
                if d == 0.0:
                    a = angles[used % angles.shape[0]]
                    used += 1
                    ux = math.cos(a)
                    uy = math.sin(a)
                else:
                    ux = dx / d
                    uy = dy / d
                push = (c4 - d) / 2.0 + 1e-6
                p[i, 0] -= ux * push
                p[i, 1] -= uy * push
                p[j, 0] += ux * push
                p[j, 1] += uy * push
                moved = True
        if not moved:
            return sweep, True
    return max_sweeps, False


def repel(pos, c4, angles, max_sweeps):
    p = np.array(pos, dtype=np.float64)
    sweeps, ok = _repel(p, float(c4), np.asarray(angles, dtype=np.float64), int(max_sweeps))
    return p, sweeps, ok


# ---------------------------------------------------------------- blobs


@_jit
def _find(parent, a):
    while parent[a] != a:
        parent[a] = parent[parent[a]]
        a = parent[a]
    return a


@_jit
def _label_sparse(idx, width):
    n = idx.shape[0]
    parent = np.arange(n)
    for k in range(n):
        r = idx[k] // width
        c = idx[k] % width
        for t in range(4):
            if t == 0:
                nr, nc = r, c - 1
            elif t == 1:
                nr, nc = r - 1, c - 1
            elif t == 2:
                nr, nc = r - 1, c
            else:
                nr, nc = r - 1, c + 1
            if nr < 0 or nc < 0 or nc >= width:
                continue
            nb = nr * width + nc
            pos = np.searchsorted(idx[:k], nb)
            if pos < k and idx[pos] == nb:
                ra = _find(parent, k)
                rb = _find(parent, pos)
                if ra != rb:
                    if ra < rb:
                        parent[rb] = ra
                    else:
                        parent[ra] = rb
    labels = np.empty(n, dtype=np.int64)
    remap = np.full(n, -1, dtype=np.int64)
    nxt = 0
    for k in range(n):
        root = _find(parent, k)
        if remap[root] < 0:
            remap[root] = nxt
            nxt += 1
        labels[k] = remap[root]
    return labels


def label_sparse(idx, width, height):
    return _label_sparse(np.ascontiguousarray(idx, dtype=np.int64), int(width))


@_jit
def _border_flags(idx, width, height):
    n = idx.shape[0]
    out = np.zeros(n, dtype=np.bool_)
    for k in range(n):
        r = idx[k] // width
        c = idx[k] % width
        for t in range(4):
            if t == 0:
                nr, nc = r, c - 1
            elif t == 1:
                nr, nc = r, c + 1
            elif t == 2:
                nr, nc = r - 1, c
            else:
                nr, nc = r + 1, c
            if nr < 0 or nr >= height or nc < 0 or nc >= width:
                out[k] = True
                break
            nb = nr * width + nc
            pos = np.searchsorted(idx, nb)
            if pos >= n or idx[pos] != nb:
                out[k] = True
                break
    return out


def border_flags(idx, width, height):
    return _border_flags(np.ascontiguousarray(idx, dtype=np.int64), int(width), int(height))
