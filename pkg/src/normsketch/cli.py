"""Command-line front end: ``solve``, ``bench``, ``synth`` and ``diag``.

Exit codes: 0 success, 2 input error, 3 numerical failure.
"""
import argparse
import json
import logging
import sys

from . import diagnostics, io, synth
from .bench import METHODS, ExperimentConfig, parse_norm, read_config_file, run_benchmark, run_one
from .errors import InputError, NumericalError
from .rng import derive_seed
from .sketch import apply_symsketch, build_symsketch

log = logging.getLogger("normsketch")

EXIT_OK, EXIT_INPUT, EXIT_NUMERICAL = 0, 2, 3


def _add_data_flags(p):
    p.add_argument("--data", help="dataset file")
    p.add_argument("--format", choices=io.FORMATS, help="dataset format (default csv)")


def build_parser():
    parser = argparse.ArgumentParser(prog="normsketch", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one regression instance")
    _add_data_flags(p)
    p.add_argument("--norm", default="huber:0.1")
    p.add_argument("--method", choices=METHODS, default="orlicz_sampling")
    p.add_argument("--eps", type=float, default=0.3)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--size", type=int, default=None,
                   help="target rows as a multiple of d (sampling and sketch methods)")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("bench", help="run a benchmark grid and write CSV reports")
    p.add_argument("--config", help="key=value config file; flags override it")
    _add_data_flags(p)
    p.add_argument("--norm")
    p.add_argument("--method", help="one or more methods, comma separated")
    p.add_argument("--sizes", help="size multipliers of d, e.g. 5,10,15,20")
    p.add_argument("--reps", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--deterministic", action="store_true", default=None,
                   help="leave wall times out of the main report (byte-reproducible)")

    p = sub.add_parser("synth", help="write a seeded synthetic instance")
    p.add_argument("--kind", choices=synth.KINDS, default="gaussian")
    p.add_argument("--n", type=int, default=5000)
    p.add_argument("--d", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=io.FORMATS, default="csv")
    p.add_argument("--out", required=True)

    p = sub.add_parser("diag", help="median / mmc / distortion reports for a norm")
    p.add_argument("what", choices=("median", "mmc", "distortion"))
    p.add_argument("--norm", default="l2")
    p.add_argument("--n", type=int, default=1024)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    _add_data_flags(p)
    return parser


def _solve(args):
    if not args.data:
        raise InputError("--data is required")
    A, b = io.ingest_dataset(args.data, args.format or "csv")
    cfg = ExperimentConfig(norm=args.norm, method=(args.method,), eps=args.eps,
                           delta=args.delta, seed=args.seed, reps=1)
    norm = parse_norm(args.norm, A.shape[0])
    loss, rows, x = run_one(args.method, A, b, norm, args.size,
                            derive_seed(args.seed, args.method), cfg)
    print(json.dumps({"method": args.method, "norm": args.norm, "loss": loss, "rows": rows,
                      "x": [float(v) for v in x]}))


def _bench(args):
    mapping = read_config_file(args.config) if args.config else {}
    for key in ("data", "format", "norm", "method", "sizes", "reps", "eps", "delta", "seed", "out",
                "deterministic"):
        value = getattr(args, key)
        if value is not None:
            mapping[key] = value
    cfg = ExperimentConfig.from_mapping(mapping)
    records = run_benchmark(cfg, progress=lambda r: log.info(
        "%s size=%d rep=%d loss=%.6g", r.method, r.size_param, r.rep, r.loss))
    path = io.emit_report(records, cfg.out, include_timing=not cfg.deterministic)
    print(f"wrote {len(records)} records to {path} and {io.summary_path(path)}")


def _synth(args):
    A, b = synth.make_instance(args.kind, args.n, args.d, args.seed)
    try:
        io.emit_dataset(A, b, args.out, args.format)
    except OSError as exc:
        raise InputError(f"cannot write {args.out}: {exc}") from exc
    print(f"wrote {args.kind} instance n={args.n} d={args.d} to {args.out}")


def _diag(args):
    if args.what == "distortion":
        if not args.data:
            raise InputError("distortion needs --data")
        A, b = io.ingest_dataset(args.data, args.format or "csv")
        norm = parse_norm(args.norm, A.shape[0])
        S = build_symsketch(norm, A.shape[0], A.shape[1], derive_seed(args.seed, "diag"))
        rep = diagnostics.measure_distortion(lambda Y: apply_symsketch(S, Y), A, norm,
                                             args.trials, args.seed)
        print(json.dumps({"min_ratio": rep.min_ratio, "median_ratio": rep.median_ratio,
                          "max_ratio": rep.max_ratio, "spread": rep.spread,
                          "trials": rep.trials, "skipped": rep.skipped}))
        return
    norm = parse_norm(args.norm, args.n)
    if args.what == "median":
        value = diagnostics.estimate_median(norm, args.n, args.trials, args.seed)
    else:
        value = diagnostics.empirical_mmc(norm, args.n, args.seed)
    print(json.dumps({args.what: value, "norm": args.norm, "n": args.n}))


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    handler = {"solve": _solve, "bench": _bench, "synth": _synth, "diag": _diag}[args.command]
    try:
        handler(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
