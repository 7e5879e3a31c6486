"""Command-line front end.

Exit codes: 0 success (including searches that find nothing), 1 a verified
residue is nonzero, 2 usage or configuration error, 3 checkpoint error.
"""
from __future__ import annotations

import argparse
import contextlib
import sys
from typing import Sequence, TextIO

from .bench import DEFAULT_BUDGET_SECONDS, compare_methods
from .congruence import HarmonicInstance, MethodKind, residue
from .errors import CheckpointError, HquotError
from .search import N6_FIRST_PRIME, SearchSpec, scan, verify_single

EXIT_OK = 0
EXIT_NONZERO = 1
EXIT_USAGE = 2
EXIT_CHECKPOINT = 3

_METHOD_CHOICES = ("direct", "lehmer", "fq432")


class UsageError(Exception):
    pass


def _method_list(text: str) -> list[MethodKind]:
    try:
        return [MethodKind.parse(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


@contextlib.contextmanager
def _output(path: str) -> TextIO:
    if path == "-":
        yield sys.stdout
        sys.stdout.flush()
    else:
        with open(path, "w", encoding="ascii") as fh:
            yield fh


def cmd_search(args: argparse.Namespace) -> int:
    method = MethodKind.parse(args.method)
    if args.n == 6 and args.from_ < N6_FIRST_PRIME:
        raise UsageError(f"--from may not be lowered below {N6_FIRST_PRIME} for N = 6")
    spec = SearchSpec(
        to=args.to,
        N=args.n,
        method=method,
        from_=args.from_,
        shard_count=args.shards,
        checkpoint_path=args.checkpoint,
    )
    with _output(args.out) as out:

        def emit(record) -> None:
            print(record.line(), file=out, flush=True)

        scan(spec, on_zero=emit)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    report = verify_single(args.p, args.n, args.methods)
    for line in report.lines():
        print(line)
    return EXIT_OK if report.all_zero else EXIT_NONZERO


def cmd_residue(args: argparse.Namespace) -> int:
    print(int(residue(HarmonicInstance(args.p, args.n), MethodKind.parse(args.method))))
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    report = compare_methods(
        args.limits, args.methods, budget_seconds=args.budget_seconds, shard_count=args.shards
    )
    with _output(args.out) as out:
        out.write(report.to_csv())
    for row in report.rows:
        if row.reason:
            print(f"limit={row.limit} method={row.method.value}: {row.reason}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hquot",
        description="Find primes p with H_floor(p/N) = 0 (mod p).",
        allow_abbrev=False,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def subparser(name: str, help: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, help=help, allow_abbrev=False)

    p = subparser("search", "scan a range of primes for zeros")
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--method", choices=_METHOD_CHOICES, default="fq432")
    p.add_argument("--from", dest="from_", type=int, default=N6_FIRST_PRIME)
    p.add_argument("--to", type=int, required=True)
    p.add_argument("--shards", type=int, default=1)
    p.add_argument("--checkpoint", default=None)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_search)

    p = subparser("verify", "evaluate one candidate under several methods")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--methods", type=_method_list, default=None)
    p.set_defaults(func=cmd_verify)

    p = subparser("residue", "print H_floor(p/N) mod p (Base432FQ: -2 times it)")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--method", choices=_METHOD_CHOICES, default="fq432")
    p.set_defaults(func=cmd_residue)

    p = subparser("bench", "time the methods against each other")
    p.add_argument("--limits", type=_int_list, required=True)
    p.add_argument("--methods", type=_method_list, default="direct,fq432")
    p.add_argument("--budget-seconds", type=int, default=int(DEFAULT_BUDGET_SECONDS))
    p.add_argument("--shards", type=int, default=1)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except CheckpointError as exc:
        print(f"hquot: checkpoint error: {exc}", file=sys.stderr)
        return EXIT_CHECKPOINT
    except (UsageError, HquotError, ValueError, OSError) as exc:
        print(f"hquot: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
