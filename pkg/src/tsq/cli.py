"""Command-line interface.

Exit codes: 0 success, 1 semantic negative (not totally symmetric, a FAIL
verdict), 2 usage or parse error, 3 internal audit failure.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import core
from .crosscheck import schwenk_medial_classes, theorem2_collapse, theorem2_expand, young_medial_labeled
from .diagonal import count_by_idempotents, generate_diagonal_classes
from .errors import AuditError, StructureError
from .pipeline import OrderSummary, enumerate_order
from .solver import iter_triangle_partitions
from .store import SPILL_ENV, StoreConfig

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_AUDIT = 0, 1, 2, 3
DEFAULT_LIMIT = 12
ROUND_TRIP_LIMIT = 100_000

log = logging.getLogger("tsq")


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"{v} must be at least 1")
    return v


def _non_negative(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"{v} must be non-negative")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tsq", description="Totally symmetric quasigroup enumerator")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("diagonals", help="list admissible diagonal classes")
    p.add_argument("--order", type=_positive, required=True)
    p.add_argument("--count-only", action="store_true")

    def add_run_options(p):
        p.add_argument("--workers", type=_positive, default=1)
        p.add_argument("--memory-budget", type=_non_negative, default=None, help="bytes held in memory before spilling")
        p.add_argument("--spill-dir", type=Path, default=None, help=f"defaults to ${SPILL_ENV} or a temp dir")
        p.add_argument("--shards", type=_positive, default=256)
        p.add_argument("--force", action="store_true", help=f"allow orders above {DEFAULT_LIMIT}")

    p = sub.add_parser("enumerate", help="enumerate and classify one order")
    p.add_argument("--order", type=_positive, required=True)
    p.add_argument("--filter", choices=["idempotent", "unipotent", "medial"], default=None)
    p.add_argument("--format", choices=["text", "json", "csv"], default="text")
    p.add_argument("--split-depth", type=_non_negative, default=2)
    add_run_options(p)

    p = sub.add_parser("tables", help="reproduce the count tables for orders 1..max")
    p.add_argument("--max-order", type=_positive, required=True)
    p.add_argument("--predicted", action="store_true", help="add abelian-group oracle columns")
    p.add_argument("--format", choices=["text", "csv"], default="text")
    add_run_options(p)

    p = sub.add_parser("check", help="report properties of a Cayley table file")
    p.add_argument("file", type=Path)
    p.add_argument("--p", type=int, default=None, dest="base", help="base point for the derived addition")

    p = sub.add_parser("bijection", help="check the idempotent(n) / unipotent(n+1) correspondence")
    p.add_argument("--order", type=_positive, required=True)
    add_run_options(p)
    return parser


def _config(args) -> StoreConfig:
    if args.shards & (args.shards - 1):
        raise StructureError(f"--shards must be a power of two, got {args.shards}")
    return StoreConfig(shard_count=args.shards, memory_budget=args.memory_budget, spill_directory=args.spill_dir)


def _guard(order: int, args) -> None:
    if order > DEFAULT_LIMIT and not args.force:
        raise StructureError(f"order {order} exceeds the safety limit {DEFAULT_LIMIT}; pass --force")


def _fmt(v: int) -> str:
    return f"{v:,}"


def cmd_diagonals(args) -> int:
    classes = generate_diagonal_classes(args.order)
    if args.count_only:
        parts = [f"i={i}: {c}" for i, c in count_by_idempotents(classes).items()]
        parts.append(f"total: {len(classes)}")
        print(", ".join(parts))
    else:
        for dc in classes:
            print(dc.line())
    return EXIT_OK


def _summary_text(s: OrderSummary) -> str:
    head = f"order {s.order}"
    if s.filter:
        head += f" ({s.filter})"
    lines = [f"{head}: {_fmt(s.labeled_total)} quasigroups in {_fmt(s.class_total)} classes"]
    for name in core.FLAG_NAMES:
        fc = s.flag(name)
        lines.append(f"  {name}: {_fmt(fc.labeled)} in {_fmt(fc.classes)} classes")
    lines.append(f"  diagonal classes realized: {s.diagonal_class_count}")
    return "\n".join(lines)


def cmd_enumerate(args) -> int:
    _guard(args.order, args)
    summary = enumerate_order(args.order, args.filter, _config(args), args.workers, args.split_depth)
    if args.format == "json":
        sys.stdout.write(summary.to_json())
    elif args.format == "csv":
        print(OrderSummary.CSV_HEADER)
        print(summary.csv_row())
    else:
        print(_summary_text(summary))
    return EXIT_OK


def cmd_tables(args) -> int:
    _guard(args.max_order, args)
    config = _config(args)
    rows = [enumerate_order(n, None, config, args.workers) for n in range(1, args.max_order + 1)]
    mismatches = 0
    if args.format == "csv":
        header = OrderSummary.CSV_HEADER
        if args.predicted:
            header += ",young_labeled,schwenk_classes,agree"
        print(header)
    else:
        cols = ["Order", "Number", "Classes", "Medial", "MClasses", "Idempotent", "IClasses", "Unipotent", "UClasses"]
        if args.predicted:
            cols += ["Young", "Schwenk", "Agree"]
        print(" ".join(f"{c:>22}" if i in (1, 3, 5, 7, 9) else f"{c:>10}" for i, c in enumerate(cols)))
    for s in rows:
        values = [s.order, s.labeled_total, s.class_total]
        for name in ("medial", "idempotent", "unipotent"):
            values += [s.flag(name).labeled, s.flag(name).classes]
        if args.predicted:
            young = young_medial_labeled(s.order)
            schwenk = schwenk_medial_classes(s.order)
            ok = young == s.medial.labeled and schwenk == s.medial.classes
            mismatches += not ok
            values += [young, schwenk, "yes" if ok else "MISMATCH"]
        if args.format == "csv":
            print(",".join(str(v) for v in values))
        else:
            print(" ".join(
                f"{_fmt(v) if isinstance(v, int) else v:>22}" if i in (1, 3, 5, 7, 9)
                else f"{_fmt(v) if isinstance(v, int) else v:>10}"
                for i, v in enumerate(values)
            ))
    if args.predicted:
        print(f"disagreements: {mismatches}", file=sys.stderr if args.format == "csv" else sys.stdout)
    return EXIT_NEGATIVE if mismatches else EXIT_OK


def cmd_check(args) -> int:
    try:
        text = args.file.read_text()
    except OSError as exc:
        print(f"error: cannot read {args.file}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        t = core.parse_table(text)
    except StructureError as exc:
        print(f"error: {args.file}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if not core.is_latin(t):
        print("latin: false")
        print("not a Latin square")
        return EXIT_NEGATIVE
    ts = core.is_totally_symmetric(t)
    k = core.is_unipotent(t)
    verdicts = [
        ("latin", True),
        ("totally_symmetric", ts),
        ("medial", core.is_medial(t)),
        ("idempotent", core.is_idempotent(t)),
        ("unipotent", k is not None),
        ("associative", core.is_associative(t)),
        ("elementary_abelian_2", core.is_elementary_abelian_2(t)),
    ]
    for name, v in verdicts:
        print(f"{name}: {str(v).lower()}")
    if k is not None:
        print(f"unipotent_value: {k}")
    if args.base is not None:
        if not 0 <= args.base < t.order:
            print(f"error: --p {args.base} outside 0..{t.order - 1}", file=sys.stderr)
            return EXIT_USAGE
        if ts:
            add = core.derived_addition(t, args.base)
            print(f"derived_addition_associative: {str(core.is_associative(add)).lower()}")
        else:
            print("derived_addition_associative: n/a (not totally symmetric)")
    return EXIT_OK if ts else EXIT_NEGATIVE


def cmd_bijection(args) -> int:
    n = args.order
    _guard(n + 1, args)
    config = _config(args)
    idem = enumerate_order(n, "idempotent", config, args.workers)
    unip = enumerate_order(n + 1, "unipotent", config, args.workers)
    checks = [
        (
            unip.labeled_total == (n + 1) * idem.labeled_total,
            f"{_fmt(unip.labeled_total)} = {n + 1} × {_fmt(idem.labeled_total)}",
        ),
        (unip.class_total == idem.class_total, f"classes {unip.class_total} = {idem.class_total}"),
    ]
    if idem.labeled_total <= ROUND_TRIP_LIMIT:
        checks.append(_round_trip_check(n))
    for ok, text in checks:
        print(f"{'PASS' if ok else 'FAIL'}: {text}")
    return EXIT_OK if all(ok for ok, _ in checks) else EXIT_NEGATIVE


def _round_trip_check(n: int) -> tuple[bool, str]:
    seen = set()
    systems = 0
    ok = True
    for part in iter_triangle_partitions(n, tuple(range(n))):
        q = core.TripleSystem.unchecked(n, tuple(range(n)), part)
        systems += 1
        for slot in range(n + 1):
            big = theorem2_expand(q, slot)
            seen.add(big)
            if theorem2_collapse(big) != q:
                ok = False
    ok = ok and len(seen) == systems * (n + 1)
    return ok, f"expand/collapse round trip on {_fmt(systems)} systems × {n + 1} slots, {_fmt(len(seen))} distinct"


COMMANDS = {
    "diagonals": cmd_diagonals,
    "enumerate": cmd_enumerate,
    "tables": cmd_tables,
    "check": cmd_check,
    "bijection": cmd_bijection,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except StructureError as exc:
        parser.exit(EXIT_USAGE, f"{parser.prog}: error: {exc}\n")
    except AuditError as exc:
        print(f"audit failure: {exc}", file=sys.stderr)
        return EXIT_AUDIT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
