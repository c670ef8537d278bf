"""Command-line entry point: ``rmtesff run [--config FILE] [--key value ...]``."""
from __future__ import annotations

import argparse
import logging
import sys

from .errors import ConfigurationError
from .experiment import emit_results, load_config_file, make_config, run_experiment


def _parser():
    parser = argparse.ArgumentParser(prog="rmtesff", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a Monte Carlo experiment and write results")
    run.add_argument("--config", help="flat 'key = value' file; flags override it")
    run.add_argument("--model", choices=["rmte", "rotors"])
    run.add_argument("--N")
    run.add_argument("--L")
    run.add_argument("--epsilon")
    run.add_argument("--gamma")
    run.add_argument("--dist", choices=["uniform_pi", "cosine_of_uniform", "gaussian"])
    run.add_argument("--sigma")
    run.add_argument("--realizations")
    run.add_argument("--tmax")
    run.add_argument("--moments", help="comma-separated orders, e.g. 1,2")
    run.add_argument("--seed")
    run.add_argument("--window", help="odd integer or 'auto'")
    run.add_argument("--format", choices=["csv", "json"])
    run.add_argument("--k1")
    run.add_argument("--k2")
    run.add_argument("--perturbative")
    run.add_argument("--out", default=".", help="output directory")
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    values = {}
    try:
        if args.config:
            values.update(load_config_file(args.config))
        out = values.pop("out", None)
        workers = int(values.pop("workers", args.workers))
        flags = vars(args)
        for key in ("model", "N", "L", "epsilon", "gamma", "dist", "sigma", "realizations",
                    "tmax", "moments", "seed", "window", "format", "k1", "k2", "perturbative"):
            if flags[key] is not None:
                values[key] = flags[key]
        if args.out != "." or out is None:
            out = args.out
        cfg = make_config(**values)
        bundle = run_experiment(cfg, workers=workers)
        for path in emit_results(bundle, cfg.format, out):
            print(path)
    except (ConfigurationError, ValueError, OSError, RuntimeError) as exc:
        print(f"rmtesff: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
