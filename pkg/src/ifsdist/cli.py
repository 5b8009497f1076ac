"""Command-line driver.

Subcommands: approximate (quantile system for a known CDF), edf-ifs (exact
e.d.f. system), invert (collage inverse problem), estimate (empirical
quantile estimator), simulate (seeded estimator-vs-e.d.f. sweep).

Exit codes: 0 success, 1 validation/usage error, 2 I/O error.  ``--config``
reads key=value lines as flag defaults; the environment variable IFS_SEED
is the seed fallback.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from . import __version__
from .constructions import edf_ifs, quantile_estimator, quantile_ifs
from .distfn import (
    UniformDF,
    edf_from_sample,
    read_function_csv,
    read_sample_file,
    write_function_csv,
)
from .ifs import default_mesh, iterate_exact, write_system_json
from .inverse import CollageProblem, solve_inverse
from .ifs import AffineMap
from .randstats import BetaDF, BetaParams, parse_distribution
from .sim import TrialConfig, run_table


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def _build_parser() -> _Parser:
    parser = _Parser(prog="ifsdist", description=__doc__)
    parser.add_argument("--version", action="version", version=f"ifsdist {__version__}")
    parser.add_argument("--verbose", action="store_true", help="log at INFO level")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("approximate", help="quantile IFS for a known CDF, dumped as CSV")
    p.add_argument("--dist", required=True, help="target CDF, e.g. beta:2,2 or uniform")
    p.add_argument("--points", type=int, required=True, help="number of interior quantiles")
    p.add_argument("--iters", type=int, default=4)
    p.add_argument("--out", required=True)
    p.add_argument("--config", default=None)

    p = sub.add_parser("edf-ifs", help="exact e.d.f. IFS of a sample, dumped as JSON")
    p.add_argument("--sample", required=True, help="file with one value per line")
    p.add_argument("--out", required=True)
    p.add_argument("--config", default=None)

    p = sub.add_parser("invert", help="solve the collage inverse problem")
    p.add_argument("--target", required=True,
                   help="dist spec, edf:<samplefile>, or an x,value CSV path")
    p.add_argument("--target-mode", default="linear", choices=["linear", "step"],
                   help="interpolation mode when the target is a CSV dump")
    p.add_argument("--partition", required=True,
                   help="auto:N, sample:<file>, or a file of interior breakpoints")
    p.add_argument("--out", required=True)
    p.add_argument("--config", default=None)

    p = sub.add_parser("estimate", help="empirical quantile estimator, dumped as CSV")
    p.add_argument("--sample", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--iters", type=int, default=4)
    p.add_argument("--out", required=True)
    p.add_argument("--config", default=None)

    p = sub.add_parser("simulate", help="estimator vs e.d.f. comparison sweep")
    p.add_argument("--dist", required=True)
    p.add_argument("--n", required=True, help="comma-separated sample sizes")
    p.add_argument("--k", default="auto", help="quantile count or 'auto' (= ceil(n/2))")
    p.add_argument("--trials", type=int, default=30)
    p.add_argument("--seed", default=None)
    p.add_argument("--eval-points", type=int, default=20)
    p.add_argument("--iters", type=int, default=4)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--exact-sup", action="store_true",
                   help="augment the evaluation points with all breakpoints")
    p.add_argument("--out", required=True)
    p.add_argument("--config", default=None)

    return parser


def _apply_config_file(argv: list[str]) -> list[str]:
    """Insert key=value pairs from --config as flags before the explicit ones."""
    if "--config" not in argv:
        return argv
    at = argv.index("--config")
    if at + 1 >= len(argv):
        return argv
    path = argv[at + 1]
    injected: list[str] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            if "=" not in text:
                raise ValueError(f"{path}:{line_no}: expected key=value, got {text!r}")
            key, value = text.split("=", 1)
            flag = "--" + key.strip().replace("_", "-")
            value = value.strip()
            if value.lower() in ("true", "false"):
                if value.lower() == "true":
                    injected.append(flag)
            else:
                injected.extend([flag, value])
    # insert right after the subcommand token so explicit flags win
    for i, token in enumerate(argv):
        if token in _COMMANDS:
            return argv[: i + 1] + injected + argv[i + 1:]
    return argv + injected


def _target_from_spec(spec: str, mode: str):
    if spec.startswith("edf:"):
        return edf_from_sample(read_sample_file(spec[len("edf:"):]))
    try:
        return BetaDF(parse_distribution(spec))
    except ValueError:
        pass
    return read_function_csv(spec, mode=mode)


def _partition_maps(spec: str):
    if spec.startswith("auto:"):
        cells = int(spec[len("auto:"):])
        if cells < 1:
            raise ValueError("auto partition needs at least one cell")
        cuts = np.linspace(0.0, 1.0, cells + 1)
    elif spec.startswith("sample:"):
        xs = np.sort(read_sample_file(spec[len("sample:"):]))
        if np.any(xs <= 0.0) or np.any(xs >= 1.0) or np.any(np.diff(xs) == 0.0):
            raise ValueError("partition sample must be distinct values inside (0,1)")
        cuts = np.concatenate([[0.0], xs, [1.0]])
    else:
        xs = np.sort(read_sample_file(spec))
        if np.any(xs <= 0.0) or np.any(xs >= 1.0) or np.any(np.diff(xs) == 0.0):
            raise ValueError("breakpoints must be distinct values inside (0,1)")
        cuts = np.concatenate([[0.0], xs, [1.0]])
    return [AffineMap.identity(cuts[i], cuts[i + 1]) for i in range(len(cuts) - 1)]


def _cmd_approximate(args) -> int:
    target = BetaDF(parse_distribution(args.dist))
    system = quantile_ifs(target, args.points)
    it = iterate_exact(system, UniformDF(), args.iters)
    write_function_csv(it, args.out, mesh=default_mesh(system))
    return 0


def _cmd_edf_ifs(args) -> int:
    sample = read_sample_file(args.sample)
    write_system_json(edf_ifs(sample), args.out)
    return 0


def _cmd_invert(args) -> int:
    target = _target_from_spec(args.target, args.target_mode)
    maps = _partition_maps(args.partition)
    problem = CollageProblem(target, maps, np.zeros(len(maps) - 1))
    solution = solve_inverse(problem)
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(solution.to_json(), fh, indent=2)
        fh.write("\n")
    return 0


def _cmd_estimate(args) -> int:
    sample = read_sample_file(args.sample)
    system = quantile_estimator(sample, args.k)
    it = iterate_exact(system, UniformDF(), args.iters)
    write_function_csv(it, args.out, mesh=default_mesh(system))
    return 0


def _cmd_simulate(args) -> int:
    dist = parse_distribution(args.dist)
    sizes = [int(s) for s in str(args.n).split(",") if s.strip()]
    if not sizes:
        raise ValueError("--n needs at least one sample size")
    if args.seed is not None:
        seed = int(args.seed)
    else:
        seed = int(os.environ.get("IFS_SEED", "0"))
    k = args.k if args.k == "auto" else int(args.k)
    configs = [
        TrialConfig(
            distribution=dist,
            n=n,
            k=k,
            iters=args.iters,
            eval_points=args.eval_points,
            trials=args.trials,
            seed=seed,
            exact_sup=args.exact_sup,
        )
        for n in sizes
    ]
    table = run_table(configs, jobs=args.jobs)
    table.write_csv(args.out)
    return 0


_COMMANDS = {
    "approximate": _cmd_approximate,
    "edf-ifs": _cmd_edf_ifs,
    "invert": _cmd_invert,
    "estimate": _cmd_estimate,
    "simulate": _cmd_simulate,
}


def cli_main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        argv = _apply_config_file(argv)
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    raise SystemExit(cli_main())


if __name__ == "__main__":
    main()
