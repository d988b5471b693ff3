"""Kernel dispatch: numba when available and enabled, numpy otherwise.

Callers import the kernel functions from here, never from the backend
modules, so that ``AOS_SWARM_NUMBA=0`` switches the whole package.
"""

import numpy as np

from . import kernels_numpy
from ._accel import USE_NUMBA

if USE_NUMBA:
    from . import kernels_numba as _impl
else:
    _impl = kernels_numpy

GROUND = kernels_numpy.GROUND
TARGET = kernels_numpy.TARGET
PRIM_OFFSET = kernels_numpy.PRIM_OFFSET


def _rows(a, k):
    return np.ascontiguousarray(a, dtype=np.float64).reshape(-1, k)


def segments_occluded(starts, ends, discs, trunks):
    return _impl.segments_occluded(_rows(starts, 3), _rows(ends, 3), _rows(discs, 4), _rows(trunks, 4))


def segments_hit_box(starts, ends, box):
    return _impl.segments_hit_box(_rows(starts, 3), _rows(ends, 3), np.asarray(box, dtype=np.float64))


def zbuffer(cam, win, grid, discs, trunks, box):
    return _impl.zbuffer(cam, tuple(int(v) for v in win), grid, _rows(discs, 4), _rows(trunks, 4),
                         None if box is None else np.asarray(box, dtype=np.float64))


def shade(code, depth, win, world_w, seed, prim_base, prim_amp, ground_base, ground_amp,
          target_base, target_amp, target_height, target_gain):
    prim_base = _rows(prim_base, 4)
    prim_amp = _rows(prim_amp, 4)
    if len(prim_base) == 0:
        prim_base = np.zeros((1, 4))
        prim_amp = np.zeros((1, 4))
    return _impl.shade(code, depth, win, world_w, seed, prim_base, prim_amp, ground_base,
                       ground_amp, target_base, target_amp, target_height, target_gain)


def cell_noise(seed, prim, cell, channel):
    return _impl.cell_noise(seed, prim, cell, channel)


def repel(pos, c4, angles, max_sweeps):
    return _impl.repel(pos, c4, angles, max_sweeps)


def label_sparse(idx, width, height):
    return _impl.label_sparse(idx, width, height)


def border_flags(idx, width, height):
    return _impl.border_flags(idx, width, height)
