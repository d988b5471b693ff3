"""Command-line entry point.

Subcommands: run, aperture, stats, calibrate-t, dump-scene. Outputs go to
``--out`` or, failing that, ``$AOS_SWARM_OUT`` (default ``./aos_out``).
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import aperture, config, harness, scene, stats
from .errors import ConfigError, ConstraintInfeasible, InputError, UnsupportedSize

log = logging.getLogger("aos_swarm")

OUT_ENV = "AOS_SWARM_OUT"


def default_out():
    return Path(os.environ.get(OUT_ENV, "aos_out"))


def _out(args):
    return Path(args.out) if args.out else default_out()


def _load_config(args):
    cfg = config.load(args.config)
    if args.scene_seed is not None:
        cfg = replace(cfg, scene_seed=args.scene_seed)
    if args.swarm_seed is not None:
        cfg = replace(cfg, swarm_seed=args.swarm_seed)
    return cfg


def cmd_run(args):
    cfg = _load_config(args)
    forest = scene.ForestScene.load(args.scene) if args.scene else None
    world = harness.build_world(cfg, forest)
    out = _out(args)
    dump = out / "rasters" if args.dump_rasters else None
    if dump is not None:
        dump.mkdir(parents=True, exist_ok=True)
    if cfg.sampler == "BLIND_SEQUENTIAL":
        result = harness.run_blind_sequential(cfg, world, args.workers)
    elif cfg.sampler == "BLIND_PARALLEL":
        result = harness.run_blind_parallel(cfg, world, args.workers)
    else:
        result = harness.run_swarm(cfg, world, args.workers, dump)
    harness.write_outputs(result, out, config.to_ini(cfg))
    log.info("wrote %s (MTV %.2f%%, %d rows)", out / "metrics.csv", result.mtv, len(result.rows))
    print(f"MTV {result.mtv:.4f} %")
    return 0


def cmd_aperture(args):
    rep = aperture.sampling_loss(args.n, args.h_l, args.dh, args.fov, args.px, args.e)
    c4 = args.c4 if args.c4 is not None else rep.c4
    rows = rep.rows() + [("aperture_m", aperture.aperture_diameter(args.n, c4))]
    if args.csv:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(("quantity", "value"))
        for k, v in rows:
            w.writerow((k, f"{v:.6f}"))
    else:
        width = max(len(k) for k, _ in rows)
        for k, v in rows:
            print(f"{k:<{width}}  {v:14.6f}")
    return 0


STATS_COLUMNS = ("D", "N_p", "N_s", "N_o", "N_v", "V_static", "V_moving", "V_mc", "se")


def _values(text):
    """Comma-separated numbers; ``a:b`` expands to the integers a..b."""
    out = []
    for part in text.split(","):
        if ":" in part:
            a, b = part.split(":")
            out.extend(float(v) for v in range(int(a), int(b) + 1))
        else:
            out.append(float(part))
    return out


def _stats_rows(args):
    D_values = _values(args.D)
    N_s_values = _values(args.N_s)
    for D in D_values:
        for N_s in N_s_values:
            if args.no_factors:
                factors = [float(f) for f in args.no_factors.split(",")]
                n_os = [f * N_s for f in factors]
            else:
                n_os = [None]
            for n_o in n_os:
                p = stats.VisibilityParams.unit(D, args.N_p, N_s, n_o=n_o)
                v_mc, se = ("", "")
                if args.pixels:
                    v, s = stats.monte_carlo_visibility(p, args.pixels, args.seed,
                                                        workers=args.workers)
                    v_mc, se = f"{v:.6f}", f"{s:.6f}"
                yield (f"{D:g}", f"{p.N_p:g}", f"{N_s:g}", f"{p.N_o:g}", f"{p.N_v:g}",
                       f"{stats.visibility_static(D, p.N):.6f}",
                       f"{stats.visibility_moving(p):.6f}", v_mc, se)


def cmd_stats(args):
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(STATS_COLUMNS)
    for row in _stats_rows(args):
        w.writerow(row)
    return 0


def cmd_calibrate_t(args):
    n = args.n
    hp = harness.size_hyperparams(n) if n in harness.SIZE_PRESETS else None
    if hp is None:
        raise ConfigError(f"no size preset for n={n}")
    cfg = harness.ScenarioConfig(preset=args.preset, hp=hp)
    seeds = tuple(int(s) for s in args.seeds.split(",")) if args.seeds else harness.CALIBRATION_SEEDS
    t_cells, t_pct, fp = harness.calibrate_threshold(cfg, seeds, workers=args.workers)
    print(f"preset={args.preset} n={n} seeds={','.join(map(str, seeds))} "
          f"false_positive_max={fp} T_cells={t_cells:.4f} T_pct={t_pct:.4f}")
    return 0


def cmd_dump_scene(args):
    cfg = _load_config(args)
    forest = harness.build_forest(cfg)
    out = _out(args)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "scene.json"
    forest.save(path)
    print(path)
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="aos-swarm", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, needs_config=True):
        if needs_config:
            sp.add_argument("config", help="scenario INI file")
            sp.add_argument("--scene-seed", type=int)
            sp.add_argument("--swarm-seed", type=int)
        sp.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./aos_out)")
        sp.add_argument("--workers", type=int, default=1)

    sp = sub.add_parser("run", help="execute a scenario and write metrics.csv")
    common(sp)
    sp.add_argument("--scene", help="replay a saved scene.json instead of generating")
    sp.add_argument("--dump-rasters", action="store_true")
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("aperture", help="sampling-loss report and aperture diameter")
    sp.add_argument("--n", type=int, default=10)
    sp.add_argument("--h-l", type=float, default=35.0)
    sp.add_argument("--dh", type=float, default=1.0)
    sp.add_argument("--fov", type=float, default=50.0)
    sp.add_argument("--px", type=float, default=512 * 512)
    sp.add_argument("--e", type=float, default=0.05)
    sp.add_argument("--c4", type=float, help="spacing used for the aperture (default: computed)")
    sp.add_argument("--csv", action="store_true")
    sp.set_defaults(func=cmd_aperture)

    sp = sub.add_parser("stats", help="closed-form vs Monte-Carlo visibility as CSV")
    sp.add_argument("--D", default="0.3,0.5,0.7")
    sp.add_argument("--N-p", type=float, default=10.0)
    sp.add_argument("--N-s", default="1,3,10", help="values or a:b integer ranges")
    sp.add_argument("--no-factors", default="0.5,2",
                    help="N_o as multiples of N_s; empty for a static target")
    sp.add_argument("--pixels", type=int, default=0, help="Monte-Carlo pixels (0 skips)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_stats)

    sp = sub.add_parser("calibrate-t", help="objective threshold from target-free scenes")
    sp.add_argument("--preset", default="sparse", choices=sorted(scene.DENSITY_PRESETS))
    sp.add_argument("--n", type=int, default=10)
    sp.add_argument("--seeds", help="comma-separated scene seeds")
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_calibrate_t)

    sp = sub.add_parser("dump-scene", help="write the generated forest as scene.json")
    common(sp)
    sp.set_defaults(func=cmd_dump_scene)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ConfigError, InputError, UnsupportedSize, ConstraintInfeasible, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
