"""Command line entry point.

    rcmlab <kind> --n N --d D [--z-re X --z-im Y --trials T --seed S --out DIR]
                  [--preset relaxed] [--config FILE]

Exit codes: 0 success, 2 configuration error, 3 numerical backend failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import KINDS, ConfigError, ExperimentConfig
from .runner import run
from .spectral import NumericalBackendError

EXIT_CONFIG = 2
EXIT_NUMERIC = 3

# CLI flag -> config key, for flags that override a loaded config
_OVERRIDES = {
    "n": "n", "d": "d", "m": "m", "d_values": "d_values", "z_re": "z_re", "z_im": "z_im",
    "trials": "trials", "seed": "seed", "out": "out", "preset": "preset", "k": "k", "p": "p",
    "eps": "eps", "tau": "tau", "model": "model", "s_threshold": "s_threshold",
    "a1": "a1", "a2": "a2", "a3": "a3", "C2": "C2", "c1": "c1",
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rcmlab", description="Sparse random combinatorial matrix experiments.")
    ap.add_argument("kind", choices=KINDS)
    ap.add_argument("--config", type=Path, help="flat JSON config; explicit flags override it")
    ap.add_argument("--n", type=int)
    ap.add_argument("--d", type=int)
    ap.add_argument("--m", type=int, help="row count (norm sweeps); defaults to n")
    ap.add_argument("--d-values", dest="d_values", type=lambda s: [int(x) for x in s.split(",")],
                    help="comma-separated list of d for sweeps")
    ap.add_argument("--z-re", dest="z_re", type=float)
    ap.add_argument("--z-im", dest="z_im", type=float)
    ap.add_argument("--trials", type=int)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--out", type=str)
    ap.add_argument("--preset", choices=("default", "relaxed"))
    ap.add_argument("--k", type=int, help="subspace dimension (distance) or set size (expansion)")
    ap.add_argument("--p", type=float, help="Bernoulli parameter (distance); defaults to d/n")
    ap.add_argument("--eps", type=float)
    ap.add_argument("--tau", type=float)
    ap.add_argument("--model", choices=("bernoulli", "fixed_sum"))
    ap.add_argument("--s-threshold", dest="s_threshold", type=float)
    for name in ("a1", "a2", "a3", "C2", "c1"):
        ap.add_argument(f"--{name}", type=float)
    ap.add_argument("--workers", type=int, help="worker processes (also capped by RCMLAB_THREADS)")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def config_from_args(args) -> ExperimentConfig:
    obj = {}
    if args.config is not None:
        try:
            obj = json.loads(args.config.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(obj, dict):
            raise ConfigError("config must be a JSON object")
    obj["kind"] = args.kind
    for flag, key in _OVERRIDES.items():
        val = getattr(args, flag)
        if val is not None:
            obj[key] = val
    return ExperimentConfig.from_dict(obj)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = config_from_args(args)
        summary = run(cfg, workers=args.workers)
    except ConfigError as exc:
        print(f"rcmlab: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalBackendError as exc:
        print(f"rcmlab: numerical backend failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    print(json.dumps({"out": str(cfg.out), "kind": summary.get("kind")}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
