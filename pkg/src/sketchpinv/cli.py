"""
Command-line experiment runner.

    sketchpinv run --method satax_uni --tau 5 --gen gaussian:m=500,n=20,r=15
    sketchpinv compare --methods ns,ns-satax --tau 5 --gen gaussian:m=500,n=20,r=15
    sketchpinv certify --gen sym:n=3 --dist rep:tau=2 --rate saxas

``run`` and ``compare`` write CSV traces. Wall time covers solver steps only;
residual evaluation and I/O are excluded from both ``time_s`` and ``flops``.
Exit codes: 0 tolerance reached, 2 iteration budget exhausted, 1 error.
"""
import argparse
import csv
import json
import logging
import sys

import numpy as np

from . import flops as fl
from .analysis import (
    convenient_distribution,
    saxas_rate_bound,
    satax_rate_exact,
)
from .linalg import pinv_exact, range_projector
from .matrices import GeneratorSpec, MatrixParseError, read_matrix
from .sketching import (
    full_sketch,
    singletons,
    uniform_batch_distribution,
    with_replacement_distribution,
)
from .solvers import METHODS, SolverConfig, run

log = logging.getLogger("sketchpinv")

EXIT_OK, EXIT_ERROR, EXIT_MAXITER = 0, 1, 2


class CliError(Exception):
    pass


def _matrix_args(p):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--matrix", metavar="PATH", help="Matrix Market or LIBSVM file")
    src.add_argument("--gen", metavar="SPEC",
                     help="generator, e.g. gaussian:m=500,n=20,r=15 | sym:n=50,r=10 | "
                          "gram:path=FILE | diag:values=2;1")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for the generator and the sketch stream (default 0)")


def _solver_args(p):
    p.add_argument("--tau", type=int, default=1)
    p.add_argument("--max-iters", type=int, default=1000)
    p.add_argument("--tol", type=float, default=1e-8,
                   help="stop when ||AXA - A||_F <= tol * ||A||_F")
    p.add_argument("--trace-every", type=int, default=None,
                   help="residual cadence; default one effective pass (1 for ns)")
    p.add_argument("--oracle", choices=("on", "off"), default="off",
                   help="also trace ||X_k - A^+||_F (||X_k - A A^+||_F for project)")
    p.add_argument("--out", metavar="PATH", help="write CSV here instead of stdout")
    p.add_argument("--explain-flops", action="store_true",
                   help="print the flop model to stderr and continue")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sketchpinv",
        description="Stochastic sketch-and-project pseudoinverse experiments.",
        epilog="time_s covers solver steps only; residual evaluation and I/O are excluded.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="trace one method")
    p.add_argument("--method", choices=METHODS, required=True)
    _matrix_args(p)
    _solver_args(p)

    p = sub.add_parser("compare", help="trace several methods on one matrix")
    p.add_argument("--methods", required=True, help="comma separated method names")
    _matrix_args(p)
    _solver_args(p)

    p = sub.add_parser("certify", help="theoretical rate and convergence certificate")
    _matrix_args(p)
    p.add_argument("--dist", default="singletons",
                   help="uniform:tau=K | rep:tau=K | singletons | full")
    p.add_argument("--rate", choices=("satax", "saxas"), default="satax")
    p.add_argument("--convenient", action="store_true",
                   help="reweight samples with the convenient probabilities (satax)")
    p.add_argument("--json", action="store_true")
    return parser


def load_matrix(args):
    if args.matrix:
        return read_matrix(args.matrix)
    return GeneratorSpec.parse(args.gen, seed=args.seed).build()


def parse_dist(text, n):
    kind, _, rest = text.partition(":")
    opts = dict(item.split("=", 1) for item in rest.split(",") if item)
    if kind == "singletons":
        return singletons(n)
    if kind == "full":
        return full_sketch(n)
    if kind in ("uniform", "rep"):
        if "tau" not in opts:
            raise CliError(f"--dist {kind} needs tau=K")
        tau = int(opts["tau"])
        if kind == "uniform":
            return uniform_batch_distribution(n, tau)
        return with_replacement_distribution(n, tau)
    raise CliError(f"unknown distribution {text!r}")


def _oracle(A, method):
    return range_projector(A) if method == "project" else pinv_exact(A)


def _cfg(args, method, seed):
    return SolverConfig(
        method=method, tau=args.tau, seed=seed, max_iters=args.max_iters,
        tol_residual=args.tol, trace_every=args.trace_every,
    )


def _fmt(x):
    return repr(float(x))


def _rows(result, with_oracle, method=None):
    for row in result.trace:
        out = [] if method is None else [method]
        out += [row.iteration, row.phase, f"{row.elapsed_s:.6f}", row.flops, _fmt(row.residual)]
        if with_oracle:
            out.append(_fmt(row.error_to_oracle))
        yield out


def _open_out(path):
    if path:
        return open(path, "w", newline="")
    return sys.stdout


def split_seeds(seed, count):
    """Independent child streams for ``count`` methods: ``SeedSequence(seed).spawn(count)``."""
    return np.random.SeedSequence(seed).spawn(count)


def cmd_run(args):
    A = load_matrix(args)
    with_oracle = args.oracle == "on"
    oracle = _oracle(A, args.method) if with_oracle else None
    result = run(A, _cfg(args, args.method, args.seed), oracle)
    header = ["iter", "phase", "time_s", "flops", "residual"] + (["err_oracle"] if with_oracle else [])
    fh = _open_out(args.out)
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(_rows(result, with_oracle))
    finally:
        if fh is not sys.stdout:
            fh.close()
    if result.status == "diverged":
        raise CliError("Newton-Schulz phase diverged")
    return EXIT_OK if result.converged else EXIT_MAXITER


def cmd_compare(args):
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    for m in methods:
        if m not in METHODS:
            raise CliError(f"unknown method {m!r}")
    A = load_matrix(args)
    with_oracle = args.oracle == "on"
    results = []
    for method, seed in zip(methods, split_seeds(args.seed, len(methods))):
        oracle = _oracle(A, method) if with_oracle else None
        results.append((method, run(A, _cfg(args, method, seed), oracle)))
    header = ["method", "iter", "phase", "time_s", "flops", "residual"]
    header += ["err_oracle"] if with_oracle else []
    fh = _open_out(args.out)
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for method, res in results:
            w.writerows(_rows(res, with_oracle, method))
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK if all(r.converged for _, r in results) else EXIT_MAXITER


def cmd_certify(args):
    A = load_matrix(args)
    n = A.shape[1]
    dist = parse_dist(args.dist, n)
    if args.rate == "satax":
        if args.convenient:
            dist = convenient_distribution(A, dist.samples)
        report = satax_rate_exact(A, dist)
    else:
        if A.shape[0] != n or not np.allclose(A, A.T, rtol=0, atol=1e-12 * np.linalg.norm(A)):
            raise CliError("saxas rate needs a symmetric matrix")
        report = saxas_rate_bound(A, dist)
    if args.json:
        print(json.dumps(report.as_dict(), sort_keys=True))
    else:
        for key, value in report.as_dict().items():
            print(f"{key}: {value}")
    return EXIT_OK


COMMANDS = {"run": cmd_run, "compare": cmd_compare, "certify": cmd_certify}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "explain_flops", False):
        sys.stderr.write(fl.EXPLANATION)
    try:
        return COMMANDS[args.command](args)
    except (CliError, MatrixParseError, ValueError, ArithmeticError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
