"""Altitude staggering, sampling-loss calculators and synthetic-aperture sizing."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._packings import WITNESSES
from .errors import InputError, UnsupportedSize

PACKING_RATIOS = {n: ratio for n, (ratio, _) in WITNESSES.items()}


@dataclass(frozen=True)
class AltitudePlan:
    h_l: float
    dh: float
    n: int
    altitudes: tuple  # ascending, altitudes[k] = h_l + k * dh
    slots: tuple  # altitude of each line slot, left to right

    @property
    def ranks(self):
        """1-based altitude rank (1 = highest) of each line slot."""
        return tuple(self.n - self.altitudes.index(a) for a in self.slots)


def slot_ranks(n):
    """Altitude ranks per line slot: odd ranks fill from the left inward,
    even ranks from the right inward."""
    left = list(range(1, n + 1, 2))
    right = list(range(2, n + 1, 2))
    return tuple(left + right[::-1])


def assign_altitudes(n, h_l, dh):
    if n < 1:
        raise InputError("n must be >= 1")
    if dh < 0:
        raise InputError("altitude step must be >= 0")
    alts = tuple(h_l + k * dh for k in range(n))
    slots = tuple(alts[n - r] for r in slot_ranks(n))
    return AltitudePlan(float(h_l), float(dh), n, alts, slots)


@dataclass(frozen=True)
class SamplingLossReport:
    n: int
    h_l: float
    dh: float
    fov_deg: float
    px: float
    e: float
    c_l: float
    c_h: float
    c_avg: float
    c_pxl: float
    c_pxh: float
    sl_dh: float
    sl_e: float
    sl: float
    c4: float

    FIELDS = ("c_l", "c_h", "c_avg", "c_pxl", "c_pxh", "sl_dh", "sl_e", "sl", "c4")

    def rows(self):
        return [(k, getattr(self, k)) for k in self.FIELDS]


def sampling_loss(n, h_l, dh, fov_deg=50.0, px=512 * 512, e=0.05):
    """Coverage, sampling-loss ratios and minimal horizontal distance.

    The highest drone flies at h_l + dh * (n - 1); the same span sets c4.
    """
    if n < 1 or not h_l > 0 or dh < 0 or not px > 0 or e < 0:
        raise InputError("n >= 1, h_l > 0, dh >= 0, px > 0 and e >= 0 required")
    if not 0.0 < fov_deg < 180.0:
        raise InputError("fov must be in (0, 180)")
    tan = math.tan(math.radians(fov_deg) / 2.0)
    dh_max = dh * (n - 1)
    c_l = (2.0 * h_l * tan) ** 2
    c_h = (2.0 * (h_l + dh_max) * tan) ** 2
    c_avg = (2.0 * tan) ** 2 * (h_l ** 2 + h_l * dh * (n - 1) + dh ** 2 * (2 * n * n - 3 * n + 1) / 6.0)
    r = dh / h_l
    sl_dh = 1.0 + r * r * (2 * n * n - 3 * n + 1) / 6.0 + r * (n - 1)
    c_pxl = c_l / px
    c_pxh = c_h / px
    sl_e = 1.0 + (4.0 * e * e + 4.0 * e * math.sqrt(c_pxl)) / c_pxl
    return SamplingLossReport(n, float(h_l), float(dh), float(fov_deg), float(px), float(e),
                              c_l, c_h, c_avg, c_pxl, c_pxh, sl_dh, sl_e, sl_e * sl_dh,
                              dh_max * tan)


def mean_footprint_area(altitudes, fov_deg):
    """Direct average of the per-drone footprint areas."""
    tan = math.tan(math.radians(fov_deg) / 2.0)
    return float(np.mean([(2.0 * h * tan) ** 2 for h in altitudes]))


def packing_ratio(n):
    if n not in PACKING_RATIOS:
        raise UnsupportedSize(f"no packing ratio tabulated for n={n} (1..20)")
    return PACKING_RATIOS[n]


def packing_witness(n):
    packing_ratio(n)
    return np.asarray(WITNESSES[n][1], dtype=np.float64)


def aperture_diameter(n, c4):
    return c4 * packing_ratio(n)
