"""Closed-form visibility models and their Monte-Carlo oracle.

Each pixel integrates N = N_p * N_s samples. A sample shows the target
signal S unless it is occluded (Bernoulli D), in which case it shows the
occluder signal C. For a moving target only N_v of the N slots can show the
target at all; the remaining slots always show the occluder. Visibility is
1 - E[(X - S)^2] with X the per-pixel mean of the samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError


@dataclass(frozen=True)
class VisibilityParams:
    D: float
    N_p: float = 1.0
    N_s: float = 1.0
    dt: float = 1.0
    length: float = 1.0
    speed: float = 0.0
    mu_s: float = 0.0
    var_s: float = 1.0
    mu_o: float = 0.0
    var_o: float = 0.0
    # overrides the length / (speed * dt) derivation when given
    n_o: float = None

    def __post_init__(self):
        if not 0.0 <= self.D <= 1.0:
            raise InputError(f"D must be in [0, 1], got {self.D}")
        if self.N_p < 1 or self.N_s < 1:
            raise InputError("N_p and N_s must be >= 1")
        if self.var_s < 0 or self.var_o < 0:
            raise InputError("variances must be >= 0")
        if self.speed < 0 or self.dt <= 0 or self.length < 0:
            raise InputError("speed >= 0, dt > 0 and length >= 0 required")
        if self.n_o is not None and self.n_o < 0:
            raise InputError("N_o must be >= 0")

    @property
    def N(self):
        return self.N_p * self.N_s

    @property
    def N_o(self):
        if self.n_o is not None:
            return self.n_o
        if self.speed == 0:
            return math.inf
        return self.length / (self.speed * self.dt)

    @property
    def N_v(self):
        return self.N_p * min(self.N_o, self.N_s)

    @classmethod
    def unit(cls, D, N_p=1.0, N_s=1.0, **kw):
        """Unit normalization: var_s + (mu_o - mu_s)^2 = 1 and var_o = 0."""
        return cls(D, N_p, N_s, mu_s=0.0, var_s=1.0, mu_o=0.0, var_o=0.0, **kw)


def visibility_static(D, N):
    if not 0.0 <= D <= 1.0 or N < 1:
        raise InputError("0 <= D <= 1 and N >= 1 required")
    return 1.0 - D * D - D * (1.0 - D) / N


def mse_terms(D, N, N_v, var_s, mu_s, mu_o, var_o):
    a = 1.0 - N_v * (1.0 - D) / N
    k = a * a + N_v * D * (1.0 - D) / N ** 2
    return k * (var_s + (mu_o - mu_s) ** 2) + (N_v * D + N - N_v) / N ** 2 * var_o


def mse_moving(p):
    return mse_terms(p.D, p.N, p.N_v, p.var_s, p.mu_s, p.mu_o, p.var_o)


def visibility_moving(p):
    return 1.0 - mse_moving(p)


# ---------------------------------------------------------------- Monte Carlo


def _draw(rng, dist, mean, var, size):
    sd = math.sqrt(var)
    if dist == "gaussian":
        return rng.normal(mean, sd, size)
    if dist == "uniform":
        half = sd * math.sqrt(3.0)
        return rng.uniform(mean - half, mean + half, size)
    raise InputError(f"unknown distribution {dist!r}")


def _shard(p, pixels, seed_seq, dist):
    """Sum and sum of squares of the per-pixel squared error for one shard."""
    rng = np.random.default_rng(seed_seq)
    n_total = p.N
    n_slots = int(math.ceil(n_total - 1e-12))
    n_v = min(p.N_v, n_total)
    full = int(math.floor(n_v + 1e-12))
    frac = n_v - full
    s = _draw(rng, dist, p.mu_s, p.var_s, pixels)
    # X - S = (sum of occluder samples - occluder weight * S) / N, which is
    # exactly zero when every slot shows the target
    occ_sum = np.zeros(pixels)
    occ_w = np.zeros(pixels)
    for slot in range(n_slots):
        # weight of this slot in the mean; the last slot of a fractional N
        # contributes only its fractional part
        w = min(1.0, n_total - slot)
        c = _draw(rng, dist, p.mu_o, p.var_o, pixels)
        if slot < full:
            capable = np.ones(pixels, dtype=bool)
        elif slot == full and frac > 0:
            capable = rng.random(pixels) < frac
        else:
            capable = np.zeros(pixels, dtype=bool)
        z = rng.random(pixels) < p.D
        occluded = ~(capable & ~z)
        occ_sum += np.where(occluded, w * c, 0.0)
        occ_w += np.where(occluded, w, 0.0)
    err = ((occ_sum - occ_w * s) / n_total) ** 2
    return float(err.sum()), float((err * err).sum())


def monte_carlo_visibility(p, pixels, seed, shard_size=100_000, dist="gaussian", workers=1):
    """Empirical visibility and its standard error.

    Pixels are split into fixed-size shards whose seeds derive from
    ``seed`` and the shard index, so the result does not depend on how
    shards are distributed over workers.
    """
    if pixels < 1:
        raise InputError("pixels must be >= 1")
    sizes = [shard_size] * (pixels // shard_size)
    if pixels % shard_size:
        sizes.append(pixels % shard_size)
    seqs = np.random.SeedSequence(int(seed)).spawn(len(sizes))
    jobs = list(zip(sizes, seqs))
    if workers > 1 and len(jobs) > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(workers) as ex:
            parts = list(ex.map(_shard, [p] * len(jobs), sizes, seqs, [dist] * len(jobs)))
    else:
        parts = [_shard(p, k, ss, dist) for k, ss in jobs]
    total = math.fsum(a for a, _ in parts)
    total_sq = math.fsum(b for _, b in parts)
    mean = total / pixels
    var = max(total_sq / pixels - mean * mean, 0.0)
    se = math.sqrt(var / pixels) if pixels > 1 else 0.0
    return 1.0 - mean, se
