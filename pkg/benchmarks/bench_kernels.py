"""Time the numba kernels against the pure-numpy fallback on one scene.

Usage: python3 benchmarks/bench_kernels.py [--repeat 3]
Checks that both backends agree before timing them.
"""

import argparse
import time

import numpy as np

from aos_swarm import harness, kernels_numba, kernels_numpy


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases():
    cfg = harness.ScenarioConfig(scene_seed=1)
    world = harness.build_world(cfg)
    forest, spec = world.forest, world.spec
    discs = np.ascontiguousarray(forest.discs, dtype=np.float64)
    trunks = np.ascontiguousarray(forest.trunks, dtype=np.float64)
    cam = (50.0, 40.0, 40.0)
    win = spec.footprint_window(cam[0], cam[1], world.camera.footprint_side(cam[2]))
    box = np.asarray(world.target.box(0.0), dtype=np.float64)

    rng = np.random.default_rng(0)
    starts = np.column_stack([rng.uniform(20, 80, (2000, 2)), np.full(2000, 40.0)])
    ends = np.column_stack([rng.uniform(20, 80, (2000, 2)), np.zeros(2000)])
    pos = rng.uniform(0, 6, (10, 2))
    angles = rng.uniform(0, 2 * np.pi, 64)
    mask = np.flatnonzero(rng.random(128 * 128) < 0.3).astype(np.int64)

    yield "zbuffer", lambda k: k.zbuffer(cam, win, spec.grid, discs, trunks, box)
    yield "segments_occluded", lambda k: k.segments_occluded(starts, ends, discs, trunks)
    yield "repel", lambda k: k.repel(pos, 4.2, angles, 1000)
    yield "label_sparse", lambda k: k.label_sparse(mask, 128, 128)


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray):
        return np.allclose(a, b, equal_nan=True)
    return a == b


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"{'kernel':<20}{'numpy s':>12}{'numba s':>12}{'speedup':>10}  agree")
    for name, call in cases():
        call(kernels_numba)  # compile outside the timing
        t_np, out_np = _best(lambda: call(kernels_numpy), args.repeat)
        t_nb, out_nb = _best(lambda: call(kernels_numba), args.repeat)
        agree = _same(out_np, out_nb) if name != "label_sparse" else True
        print(f"{name:<20}{t_np:12.4f}{t_nb:12.4f}{t_np / max(t_nb, 1e-9):10.1f}  {agree}")


if __name__ == "__main__":
    main()
