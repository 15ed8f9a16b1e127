"""Command-line front end.

Exit codes: 0 Orthogonal (or a passing verification), 1 NotOrthogonal (or a
failing one), 2 Borderline, 3 parse error, 4 shape error, 5 any other error
including usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import io
from .bj import State, bj_orthogonal_minimize
from .cstar import alg_norm_and_norming_blocks, bj_orthogonal_alg, is_smooth, joint_norming_subspace
from .errors import BJError, InvalidShape, NonSquare, ParseError, ShapeMismatch, ZeroElement
from .linalg import numrange_boundary
from .suites import SUITE_NAMES, run_counterexample, run_suite

EXIT_CODES = {State.ORTHOGONAL: 0, State.NOT_ORTHOGONAL: 1, State.BORDERLINE: 2}
EXIT_PARSE, EXIT_SHAPE, EXIT_OTHER = 3, 4, 5


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_OTHER, f"{self.prog}: error: {message}\n")


def _default_seed() -> int:
    try:
        return int(os.environ.get("BJ_SEED", "0"))
    except ValueError:
        return 0


def _vector_json(v) -> str:
    return json.dumps([[float(z.real), float(z.imag)] for z in np.asarray(v).ravel()])


def _verdict_line(v) -> str:
    s = f"{v.state.value} margin={v.margin:.6g}"
    if v.witness is not None:
        s += f" witness={_vector_json(v.witness)}"
    return s


def cmd_check(args) -> int:
    A, B = io.read_element(args.a), io.read_element(args.b)
    if A.shape != B.shape:
        raise ShapeMismatch(f"shapes differ: {A.shape} vs {B.shape}")
    crit = bj_orthogonal_alg(A, B) if args.method != "minimize" else None
    mini = bj_orthogonal_minimize(A.embed(), B.embed()) if args.method != "criterion" else None
    if args.method == "criterion":
        print(_verdict_line(crit))
        return EXIT_CODES[crit.state]
    if args.method == "minimize":
        print(f"{mini.state.value} margin={mini.margin:.6g} lambda={mini.lam:.6g}")
        return EXIT_CODES[mini.state]
    agree = crit.state == mini.state or State.BORDERLINE in (crit.state, mini.state)
    print(_verdict_line(crit))
    print(f"minimize: {mini.state.value} margin={mini.margin:.6g}")
    print(f"agreement={'true' if agree else 'false'}")
    return EXIT_CODES[crit.state]


def cmd_m0(args) -> int:
    A = io.read_element(args.file)
    norm, blocks = alg_norm_and_norming_blocks(A)
    sub = joint_norming_subspace(A)
    print(f"norm={norm:.17g} norming_blocks={sorted(blocks)} dim={sub.dim}")
    for j in range(sub.dim):
        print(f"block={sub.tags[j]} vector={_vector_json(sub.basis[:, j])}")
    return 0


def cmd_smooth(args) -> int:
    A = io.read_element(args.file)
    s = is_smooth(A)
    line = f"smooth={'true' if s.smooth else 'false'}"
    if s.smooth:
        line += f" block={s.block} vector={_vector_json(s.vector)}"
    print(line)
    return 0


def cmd_numrange(args) -> int:
    A = io.read_element(args.file)
    if len(A.shape) != 1:
        raise NonSquare("numrange expects a single square matrix")
    if args.samples < 1:
        raise BJError("--samples must be positive")
    thetas, pts = numrange_boundary(A.blocks[0], args.samples)
    text = io.boundary_csv(thetas, pts)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_verify(args) -> int:
    seed = _default_seed() if args.seed is None else args.seed
    t0 = time.perf_counter()
    report = run_suite(args.suite, args.trials, seed)
    sys.stdout.write(report.render(timing=args.timing))
    if not args.timing:
        for c in report.checks:
            print(f"{c.suite}/{c.check} time={c.seconds:.2f}s", file=sys.stderr)
        print(f"total time={time.perf_counter() - t0:.2f}s", file=sys.stderr)
    return 0 if report.passed else 1


def cmd_counterexample(args) -> int:
    seed = _default_seed() if args.seed is None else args.seed
    report = run_counterexample(args.which, args.pairs, seed)
    sys.stdout.write(report.render())
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bjortho", description="Birkhoff-James orthogonality toolkit.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", help="decide A _|_ B for two algebra files")
    c.add_argument("a")
    c.add_argument("b")
    c.add_argument("--method", choices=("criterion", "minimize", "both"), default="criterion")
    c.set_defaults(fn=cmd_check)

    c = sub.add_parser("m0", help="norm, norming blocks and norm-attainment subspace")
    c.add_argument("file")
    c.set_defaults(fn=cmd_m0)

    c = sub.add_parser("smooth", help="smoothness of an element")
    c.add_argument("file")
    c.set_defaults(fn=cmd_smooth)

    c = sub.add_parser("numrange", help="numerical-range boundary points as CSV")
    c.add_argument("file")
    c.add_argument("--samples", type=int, default=360)
    c.add_argument("--out")
    c.set_defaults(fn=cmd_numrange)

    c = sub.add_parser("verify", help="run seeded verification suites")
    c.add_argument("--suite", choices=SUITE_NAMES, default="all")
    c.add_argument("--trials", type=int)
    c.add_argument("--seed", type=int)
    c.add_argument("--timing", action="store_true", help="include wall times in the report")
    c.set_defaults(fn=cmd_verify)

    c = sub.add_parser("counterexample", help="check one of the two non-standard preservers")
    c.add_argument("which", choices=("gauge", "abelian"))
    c.add_argument("--pairs", type=int)
    c.add_argument("--seed", type=int)
    c.set_defaults(fn=cmd_counterexample)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ShapeMismatch, NonSquare, InvalidShape) as exc:
        print(f"shape error: {exc}", file=sys.stderr)
        return EXIT_SHAPE
    except (BJError, OSError, ZeroElement) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OTHER


if __name__ == "__main__":
    sys.exit(main())
