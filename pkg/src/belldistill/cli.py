"""Command-line front end.

Exit codes: 0 success, 1 validation or verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from .bellstate import BellDiagonal, DomainError, werner
from .gf2core import BitMatrix, ConstraintError, DimensionError, SymplecticMatrix, to_bits
from .pipeline import (
    DEFAULT_MAX_STEPS,
    Schedule,
    figure1_sweep,
    format_number,
    optimize_schedule,
    run_recurrence,
    sweep_csv,
)
from .protocol import NAMED_STEPS, DegenerateInputError, DistillationStep, apply_step, parse_step
from .search import Objective, SearchError, best_step
from .symplectic import (
    GAMMA,
    compose_ops,
    decompose_two_qubit,
    enumerate_sp4,
    enumerate_symplectic,
    generator_sequence_search,
    group_order,
)


class UsageError(Exception):
    pass


def _fmt(x: float) -> str:
    return format_number(x)


def _state_arg(text: str) -> BellDiagonal:
    try:
        return BellDiagonal.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _werner_arg(text: str) -> BellDiagonal:
    try:
        return werner(float(text))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _add_state(p: argparse.ArgumentParser, required: bool = True) -> None:
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--state", type=_state_arg, metavar="P00,P01,P10,P11",
                   help="Bell-diagonal weights in label order 00,01,10,11")
    g.add_argument("--werner", type=_werner_arg, metavar="F", help="Werner state of fidelity F")


def _input_state(args: argparse.Namespace) -> BellDiagonal:
    return args.state if args.state is not None else args.werner


def _load_step(args: argparse.Namespace) -> DistillationStep:
    if args.file:
        try:
            text = Path(args.file).read_text(encoding="utf-8")
        except OSError as exc:
            raise UsageError(f"cannot read {args.file}: {exc}") from exc
        try:
            return parse_step(text, name=Path(args.file).stem)
        except (ConstraintError, DimensionError):
            raise
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    return NAMED_STEPS[args.scheme]()


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def cmd_step(args: argparse.Namespace) -> int:
    step = _load_step(args)
    out = apply_step(_input_state(args), step)
    print(f"scheme: {step.name or 'custom'} (n={step.n}, m={step.m})")
    print(f"success: {_fmt(out.success)}")
    print(f"fidelity: {_fmt(out.fidelity)}")
    print("coefficients:")
    for y, q in enumerate(out.state.q):
        print(f"{to_bits(y, 2 * step.m)} {_fmt(q)}")
    return 0


def cmd_pipeline(args: argparse.Namespace) -> int:
    p0 = _input_state(args)
    main = NAMED_STEPS[args.scheme]()
    if args.steps is not None:
        sched = Schedule.of([main] * args.steps, hashing=not args.no_hashing)
        res = run_recurrence(p0, sched)
    else:
        final = NAMED_STEPS["dej"]() if args.scheme == "proposed" and not args.no_final else None
        opt = optimize_schedule(p0, args.max_steps, main=main, final=final, allow_final=final is not None)
        sched, res = opt.schedule, opt.result
    print(f"schedule: {sched.describe()}")
    print("step,fidelity,success,cost_multiplier")
    for i, rec in enumerate(res.per_step, 1):
        print(f"{i},{_fmt(rec.fidelity)},{_fmt(rec.success)},{_fmt(rec.cost_multiplier)}")
    print(f"final_state: {res.final_state}")
    print(f"hashing_yield: {_fmt(res.hashing_yield)}")
    print(f"L: {_fmt(res.L)}")
    print(f"log10L: {_fmt(res.log10L)}")
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    if not 0.5 < args.fmin < args.fmax < 1.0:
        raise UsageError("need 1/2 < fmin < fmax < 1")
    if args.points < 2:
        raise UsageError("need at least two points")
    step = (args.fmax - args.fmin) / (args.points - 1)
    grid = [args.fmin + i * step for i in range(args.points)]
    rows = figure1_sweep(grid, args.max_steps)
    text = sweep_csv(rows)
    if args.out:
        try:
            _write(args.out, text)
        except OSError as exc:
            print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
            return 1
        if not args.no_plot:
            from .plotting import plot_sweep

            fig = Path(args.plot) if args.plot else Path(args.out).with_suffix(".png")
            plot_sweep(rows, fig)
            print(f"wrote {args.out} and {fig}")
        else:
            print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
        if args.plot and not args.no_plot:
            from .plotting import plot_sweep

            plot_sweep(rows, args.plot)
    return 0


def cmd_search(args: argparse.Namespace) -> int:
    try:
        objective = Objective.parse(args.objective)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    report = best_step(
        _input_state(args), args.n, args.m, objective,
        top=args.top, shards=args.shards, workers=args.workers,
        max_candidates=args.max_candidates, full_outcomes=0,
    )
    text = report.to_csv()
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    print(f"# candidates: {report.states_evaluated}, wall time {report.wall_time:.3f} s"
          + (", all scores equal" if report.degenerate else ""), file=sys.stderr)
    return 0


def cmd_group(args: argparse.Namespace) -> int:
    if args.what == "sp4":
        for a in enumerate_sp4():
            print(a)
            print()
    elif args.what == "gamma":
        for u, t in sorted(GAMMA.items()):
            print(f"{to_bits(u, 4)} {t}")
    else:
        ok = True
        for n in (1, 2):
            count = len(enumerate_symplectic(n))
            ok &= count == group_order(n)
            print(f"n={n}: enumerated {count}, formula {group_order(n)}")
        return 0 if ok else 1
    return 0


def _read_matrix(args: argparse.Namespace) -> SymplecticMatrix:
    try:
        if args.matrix:
            lines = Path(args.matrix).read_text(encoding="utf-8").splitlines()
        else:
            lines = args.rows
        return SymplecticMatrix(BitMatrix.from_strings(lines))
    except OSError as exc:
        raise UsageError(f"cannot read {args.matrix}: {exc}") from exc


def cmd_decompose(args: argparse.Namespace) -> int:
    a = _read_matrix(args)
    ops = decompose_two_qubit(a)
    print(f"two-qubit factors (product in listed order): {len(ops)}")
    for op in ops:
        pairs = f"pairs {op.k},{op.l}" if op.l is not None else "pair 0"
        print(f"{pairs}: " + " ".join(op.m4.to_strings()))
    if compose_ops(ops, a.n) != a:
        print("error: recomposition mismatch", file=sys.stderr)
        return 1
    if args.sequence is not None:
        seq = generator_sequence_search(a, args.sequence)
        if seq is None:
            print(f"no generator word of length <= {args.sequence}")
        else:
            print("generator word: " + (" ".join(str(t.u) for t in seq) or "(identity)"))
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    from .verify import perturbed_gamma, run_checks

    results = run_checks(perturbed_gamma() if args.perturb_gamma else None)
    width = max(len(r.name) for r in results)
    for r in results:
        print(f"{'PASS' if r.ok else 'FAIL'}  {r.name:<{width}}  {r.seconds:7.3f}s  {r.detail}")
    failed = sum(not r.ok for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 0 if failed == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="belldistill",
        description="Local Bell-product permutations and multi-copy distillation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("step", help="apply one distillation step")
    _add_state(p)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--scheme", choices=sorted(NAMED_STEPS), default="dej")
    g.add_argument("--file", help="step file: 'n m', S rows, optional output rows")
    p.set_defaults(func=cmd_step)

    p = sub.add_parser("pipeline", help="recurrence plus hashing, optimized or fixed")
    _add_state(p)
    p.add_argument("--scheme", choices=sorted(NAMED_STEPS), default="proposed")
    p.add_argument("--steps", type=int, help="fixed number of steps instead of optimizing")
    p.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    p.add_argument("--no-final", action="store_true", help="disallow the final n=2 step")
    p.add_argument("--no-hashing", action="store_true", help="with --steps: skip hashing")
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("sweep", help="log10 L over Werner fidelities (CSV plus figure)")
    p.add_argument("--fmin", type=float, default=0.55)
    p.add_argument("--fmax", type=float, default=0.95)
    p.add_argument("--points", type=int, default=9)
    p.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    p.add_argument("--out", help="CSV path (stdout if omitted)")
    p.add_argument("--plot", help="figure path (default: CSV path with .png)")
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("search", help="exhaustive search over tested spaces")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    _add_state(p)
    p.add_argument("--objective", default="fidelity",
                   help="fidelity | success | fidelity-at-min-success:T | inverse-yield-proxy")
    p.add_argument("--top", type=int)
    p.add_argument("--shards", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--max-candidates", type=int, default=2_000_000)
    p.add_argument("--out")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("group", help="Sp(4,2) and S6 utilities")
    p.add_argument("what", choices=["sp4", "gamma", "count"])
    p.set_defaults(func=cmd_group)

    p = sub.add_parser("decompose", help="factor a symplectic matrix into two-qubit blocks")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--matrix", help="file with one row bitstring per line")
    g.add_argument("--rows", nargs="+", metavar="BITS")
    p.add_argument("--sequence", type=int, metavar="MAXLEN",
                   help="also search a shortest local generator word")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("verify", help="run the built-in checks")
    p.add_argument("--perturb-gamma", action="store_true",
                   help="negative control: swap two gamma entries")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, ConstraintError, DimensionError, DegenerateInputError, SearchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
