"""Command-line interface: simulate, sweep, and cost subcommands."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ConfigError, SystemConfig, read_config
from .harness import (SCHEME_ORDER, compute_costs, parse_dsnr, parse_ld,
                      run_experiment, sweep_snr_ld, write_cost_table,
                      write_outputs, write_sweep, fmt_float)


def _add_common(p):
    p.add_argument("--config", type=Path, default=None,
                   help="key = value config file (defaults apply otherwise)")
    p.add_argument("--seed", type=int, default=None,
                   help="override the master seed")
    p.add_argument("--drops", type=int, default=None,
                   help="override the number of user drops")
    p.add_argument("--out", type=Path, required=True,
                   help="output directory (created if missing)")


def _load_config(args) -> SystemConfig:
    cfg = read_config(args.config) if args.config else SystemConfig()
    over = {}
    if getattr(args, "seed", None) is not None:
        over["seed"] = args.seed
    if getattr(args, "drops", None) is not None:
        over["drops"] = args.drops
    return cfg.replace(**over) if over else cfg


def _split_list(text: str) -> tuple:
    return tuple(t.strip() for t in text.split(",") if t.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stripesim",
        description="Cell-free massive MIMO uplink simulator for radio "
                    "stripes: MRC, centralized LMMSE, sequential LMMSE, "
                    "and Gram-recovery equalization over an MRC fronthaul.")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate",
                         help="Monte Carlo SE run; writes se_samples.csv, "
                              "cdf_*.csv, cost.csv, summary.json")
    _add_common(sim)
    sim.add_argument("--schemes", default=",".join(SCHEME_ORDER),
                     help="comma list from: %s" % ", ".join(SCHEME_ORDER))
    sim.add_argument("--uc", default="off",
                     help="comma list from: on, off")
    sim.add_argument("--jobs", type=int, default=1,
                     help="worker processes (drops are distributed)")

    swp = sub.add_parser("sweep",
                         help="mean SE over SNR offsets and data block "
                              "lengths; writes sweep.csv")
    _add_common(swp)
    swp.add_argument("--dsnr", default="0",
                     help="dB offsets, 'start:step:stop' or comma list")
    swp.add_argument("--ld", default=None,
                     help="comma list of block lengths; 'inf' selects the "
                          "exact-statistics variant (default: config value)")
    swp.add_argument("--schemes", default=",".join(SCHEME_ORDER))
    swp.add_argument("--jobs", type=int, default=1)

    cost = sub.add_parser("cost",
                          help="fronthaul and complexity table; writes "
                               "cost.csv")
    _add_common(cost)
    cost.add_argument("--schemes", default=",".join(SCHEME_ORDER))
    cost.add_argument("--uc", default="off,on")
    return parser


def cmd_simulate(args) -> int:
    cfg = _load_config(args)
    schemes = _split_list(args.schemes)
    uc_modes = _split_list(args.uc)
    result = run_experiment(cfg, schemes=schemes, uc_modes=uc_modes,
                            jobs=args.jobs)
    written = write_outputs(result, args.out)
    for key, stats in result.summary().items():
        rep = result.costs[key]
        print("%-12s mean SE %s  p10 %s  fronthaul %d  c_total %d  c_cpu %d"
              % (key, fmt_float(stats["mean"]), fmt_float(stats["p10"]),
                 rep.fronthaul_reals, rep.c_total, rep.c_cpu))
    if result.skipped_blocks:
        print("skipped blocks: %d of %d"
              % (result.skipped_blocks, result.total_blocks))
    print("wrote %d files to %s (%.1f s)"
          % (len(written), args.out, result.manifest.elapsed_s))
    return 0


def cmd_sweep(args) -> int:
    cfg = _load_config(args)
    dsnr = parse_dsnr(args.dsnr)
    ld = parse_ld(args.ld) if args.ld else (cfg.L_D,)
    rows = sweep_snr_ld(cfg, dsnr, ld, schemes=_split_list(args.schemes),
                        jobs=args.jobs)
    path = write_sweep(rows, args.out)
    print("wrote %s (%d rows)" % (path, len(rows)))
    return 0


def cmd_cost(args) -> int:
    cfg = _load_config(args)
    costs = compute_costs(cfg, schemes=_split_list(args.schemes),
                          uc_modes=_split_list(args.uc))
    path = write_cost_table(costs, args.out)
    for key, rep in costs.items():
        print("%-12s fronthaul %d  c_serial %d  c_parallel %d  c_total %d  "
              "c_cpu %d" % (key, rep.fronthaul_reals, rep.c_serial,
                            rep.c_parallel, rep.c_total, rep.c_cpu))
    print("wrote %s" % path)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            return cmd_simulate(args)
        if args.command == "sweep":
            return cmd_sweep(args)
        return cmd_cost(args)
    except (ConfigError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
