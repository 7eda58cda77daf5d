"""Command-line front end.

::

    banditgne run --preset figure1 --out results/fig1
    banditgne run --config my.yaml --runs 2 --horizon 500
    banditgne validate my.yaml
    banditgne oracle --preset figure1 --horizon 500 --out results/traj
    banditgne presets list
"""

from __future__ import annotations

import argparse
import sys

from .config import PRESET_NOTES, PRESETS, RunConfig, load_config, preset_config, validate, validate_config
from .errors import BanditGNEError, ConfigError
from .experiment import run_experiment, run_oracle


def _resolve(args) -> RunConfig:
    if args.config:
        cfg = load_config(args.config, preset=args.preset)
    elif args.preset:
        cfg = preset_config(args.preset)
    else:
        raise ConfigError("give --config PATH or --preset NAME")
    for key in ("seed", "out", "runs", "horizon", "workers"):
        val = getattr(args, key, None)
        if val is not None:
            setattr(cfg, key, val)
    if getattr(args, "record", False):
        cfg.assertion_mode = "record"
    return cfg


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="PATH")
    p.add_argument("--preset", metavar="NAME", choices=sorted(PRESETS))
    p.add_argument("--seed", type=int, metavar="U64")
    p.add_argument("--out", metavar="DIR")
    p.add_argument("--runs", type=int, metavar="R")
    p.add_argument("--horizon", type=int, metavar="T")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="banditgne", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute R seeded runs and write CSVs plus a summary")
    _add_common(p_run)
    p_run.add_argument("--workers", type=int, metavar="K", help="worker processes")
    p_run.add_argument("--record", action="store_true", help="log bound violations instead of aborting")

    p_val = sub.add_parser("validate", help="check a config without running anything")
    p_val.add_argument("path", nargs="?")
    p_val.add_argument("--config", metavar="PATH")
    p_val.add_argument("--preset", metavar="NAME", choices=sorted(PRESETS))

    p_orc = sub.add_parser("oracle", help="solve and cache the GNE trajectory only")
    _add_common(p_orc)

    p_pre = sub.add_parser("presets", help="list shipped presets")
    p_pre.add_argument("action", choices=["list"])
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "presets":
            for name in PRESETS:
                print(f"{name:<11} {PRESET_NOTES[name]}")
            return 0
        if args.command == "validate":
            path = args.path or args.config
            report = validate_config(path) if path else validate(preset_config(args.preset or "figure1"))
            print(report)
            return 0 if report.ok else 1
        cfg = _resolve(args)
        if args.command == "oracle":
            _, traj = run_oracle(cfg)
            print(f"solved {traj.x_star.shape[0]} rounds" + (" (cached)" if traj.cached else ""))
            if cfg.out:
                print(f"trajectory written under {cfg.out}")
            return 0
        res = run_experiment(cfg)
        if res.status != 0:
            print(res.message, file=sys.stderr)
            return res.status
        s = res.summary
        print(f"{cfg.runs} runs x {cfg.horizon} rounds, sigma_m = {s['sigma_m']:.6g}")
        print(f"final mean R_g(T)/T = {s['final_mean_violation_over_t']:.6g}")
        print(f"final mean Reg_i(T)/T, max over players = {max(s['final_mean_regret_over_t']):.6g}")
        print(f"assertions: {s['assertions_checked']} checked, {s['assertions_failed']} failed")
        if cfg.out:
            print(f"wrote {len(res.files)} files to {cfg.out}")
        return 0
    except BanditGNEError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
