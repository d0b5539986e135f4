"""Command-line interface over T3B tensor files.

Exit codes: 0 success, 2 I/O or parse failure, 3 parameter validation,
4 numerical failure.
"""

import argparse
import json
import sys

import numpy as np
from threadpoolctl import threadpool_limits

from . import bench as bench_mod
from .core import tprod
from .errors import (
    FormatError,
    ImaginaryResidual,
    IndexOutOfRange,
    InvalidParams,
    ShapeMismatch,
    SvdNoConvergence,
    TriangularBreakdown,
    ZeroReference,
)
from .factor import t_singular_values, tail_energy, tubal_rank
from .io import read_t3b, write_t3b
from .sketch import (
    SketchParams,
    build_sketch,
    load_sketch,
    recover_basic,
    recover_stable,
    save_sketch,
)

_EXIT_IO = 2
_EXIT_PARAMS = 3
_EXIT_NUMERICAL = 4


def cmd_singvals(args):
    a = read_t3b(args.infile)
    sv = t_singular_values(a)
    rank = int(np.count_nonzero(sv > args.tol * sv[0] * max(a.shape[0], a.shape[1])))
    tails = [float(np.sum(sv[j:] ** 2)) for j in range(sv.size + 1)]
    if args.json:
        print(json.dumps({
            "singular_values": [float(s) for s in sv],
            "tubal_rank": rank,
            "tail_energies": tails,
        }))
        return 0
    for s in sv:
        print(repr(float(s)))
    print(f"rank {rank}")
    for j, t in enumerate(tails, start=1):
        print(f"tail {j} {t!r}")
    return 0


def cmd_gen(args):
    if args.n < 1 or args.p < 1:
        raise InvalidParams("dimensions must be positive")
    if args.kind == "lowrank":
        if not 1 <= args.r <= args.n:
            raise InvalidParams(f"need 1 <= r <= n, got r={args.r}, n={args.n}")
        rng = np.random.default_rng(args.seed)
        x = rng.standard_normal((args.n, args.r, args.p))
        y = rng.standard_normal((args.r, args.n, args.p))
        a = tprod(x, y)
    else:
        spec = bench_mod.SpectrumSpec(
            kind=args.kind, n=args.n, p_slices=args.p,
            r=args.r, decay=args.decay,
        )
        gen = bench_mod.gen_poly_decay if args.kind == "poly" else bench_mod.gen_exp_decay
        a = gen(spec)
    write_t3b(args.out, a)
    return 0


def cmd_sketch(args):
    a = read_t3b(args.infile)
    params = SketchParams(k=args.k, l=args.l, seed=args.seed)
    state = build_sketch(a, params, orthonormalize=args.orth)
    save_sketch(args.out, state)
    return 0


def cmd_recover(args):
    state = load_sketch(args.sketch)
    recover = recover_basic if args.method == "basic" else recover_stable
    ahat = recover(state)
    write_t3b(args.out, ahat)
    if args.ref is not None:
        ref = read_t3b(args.ref)
        print(f"relative_error {bench_mod.relative_error(ref, ahat)!r}")
    return 0


def cmd_bench(args):
    spec = bench_mod.load_experiment_spec(args.spec)
    rows = bench_mod.run_experiment(spec)
    bench_mod.write_metrics_csv(args.out, rows)
    return 0


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--threads", type=int, default=0, metavar="N",
        help="cap BLAS threads at N (0 uses all cores)",
    )

    ap = argparse.ArgumentParser(
        prog="tsketch",
        description="T-product tensor factorization and single-pass sketching",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("singvals", parents=[common],
                       help="print T-singular values, tubal rank, tail energies")
    p.add_argument("--in", dest="infile", required=True, metavar="FILE")
    p.add_argument("--json", action="store_true")
    p.add_argument("--tol", type=float, default=1e-10,
                   help="relative rank threshold")
    p.set_defaults(func=cmd_singvals)

    p = sub.add_parser("gen", parents=[common],
                       help="generate a synthetic tensor file")
    p.add_argument("--kind", required=True, choices=("poly", "exp", "lowrank"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--r", type=int, default=10)
    p.add_argument("--decay", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, metavar="FILE")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("sketch", parents=[common],
                       help="sketch a tensor into a TSK1 container")
    p.add_argument("--in", dest="infile", required=True, metavar="FILE")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--orth", action="store_true",
                   help="orthonormalize the test slices before sketching")
    p.add_argument("--out", required=True, metavar="SKFILE")
    p.set_defaults(func=cmd_sketch)

    p = sub.add_parser("recover", parents=[common],
                       help="recover an approximation from a sketch alone")
    p.add_argument("--sketch", required=True, metavar="SKFILE")
    p.add_argument("--method", choices=("basic", "stable"), default="stable")
    p.add_argument("--out", required=True, metavar="FILE")
    p.add_argument("--ref", metavar="FILE",
                   help="optional reference tensor; prints relative_error")
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("bench", parents=[common],
                       help="run a sweep described by a key=value spec file")
    p.add_argument("--spec", required=True, metavar="SPECFILE")
    p.add_argument("--out", required=True, metavar="CSV")
    p.set_defaults(func=cmd_bench)

    return ap


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        if args.threads > 0:
            with threadpool_limits(limits=args.threads):
                return args.func(args)
        return args.func(args)
    except (FormatError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return _EXIT_IO
    except (InvalidParams, ShapeMismatch, IndexOutOfRange, ZeroReference) as e:
        print(f"error: {e}", file=sys.stderr)
        return _EXIT_PARAMS
    except (ImaginaryResidual, SvdNoConvergence, TriangularBreakdown) as e:
        print(f"error: {e}", file=sys.stderr)
        return _EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
