"""Command-line entry point: ``sympman {feasibility,nearest,subspace} [flags]``.

Exit codes: 0 on success, 1 on usage errors, 2 when a numerical domain
failure aborts the experiment.
"""

import argparse
import sys

from . import experiments as ex
from .errors import DimensionError, SympmanError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERIC = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _csv_list(text):
    items = tuple(s.strip() for s in text.split(",") if s.strip())
    if not items:
        raise argparse.ArgumentTypeError("expected a comma-separated list")
    return items


def build_parser():
    parser = _Parser(prog="sympman", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "feasibility": "feasibility residual along geodesics and retractions",
        "nearest": "nearest symplectic matrix by gradient descent",
        "subspace": "best symplectic subspace for a data matrix",
    }
    for name in ex.COMMANDS:
        p = sub.add_parser(name, help=helps[name])
        p.add_argument("--n", type=int, default=100)
        p.add_argument("--k", type=int, default=10)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--runs", type=int, default=10)
        p.add_argument("--retractions", type=_csv_list, default=None,
                       help="comma list; default " + ",".join(ex.DEFAULT_RETRACTIONS[name]))
        p.add_argument("--metrics", type=_csv_list, default=None,
                       help="comma list of stiefel,grassmann")
        p.add_argument("--t-max", type=float, default=1e3)
        p.add_argument("--t-samples", type=int, default=500)
        p.add_argument("--max-iters", type=int, default=100)
        p.add_argument("--scale-a", type=float, default=1.0)
        p.add_argument("--noise", type=float, default=1.0, help="0 disables the perturbation")
        p.add_argument("--out", default=f"{name}.csv")
    return parser


def config_from_args(args):
    return ex.ExperimentConfig(
        command=args.command, n=args.n, k=args.k, seed=args.seed, runs=args.runs,
        retractions=args.retractions, metrics=args.metrics, t_max=args.t_max,
        t_samples=args.t_samples, max_iters=args.max_iters, scale_a=args.scale_a,
        noise=args.noise, output_path=args.out,
    )


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        cfg = config_from_args(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (DimensionError, ValueError) as exc:
        print(f"sympman: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        result = ex.run(cfg)
    except SympmanError as exc:
        print(f"sympman: numerical failure in {cfg.command}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    try:
        paths = ex.write_result(result, cfg.output_path)
    except OSError as exc:
        print(f"sympman: cannot write output: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(ex.format_summary(result))
    print("wrote " + ", ".join(paths))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
