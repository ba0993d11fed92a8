"""Full order-n enumeration: diagonals -> partitions -> canonical keys -> store.

Every solver visit for a diagonal representative ``d`` stands for
``labeled_count(d)`` labeled quasigroups (its images under relabelings that
move ``d``), so it is recorded with that multiplicity.  The store then
audits ``multiplicity * aut_order == n!`` per class, which only holds when
the diagonal bookkeeping and the canonizer's automorphism count agree.
"""
from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import permutations
from typing import Iterable

from . import core
from .canon import canonical, decode_key
from .core import FLAG_NAMES, PropertyFlags, TripleSystem
from .diagonal import (
    DiagonalClass,
    constant_class,
    diagonal_canonical_form,
    generate_diagonal_classes,
    identity_class,
)
from .errors import AuditError, RefusalError
from .solver import SubJob, iter_triangle_partitions, split_work
from .store import ClassRecord, ClassStore, StoreConfig, records_to_bytes

FILTERS = (None, "idempotent", "unipotent", "medial")


@dataclass(frozen=True)
class FlagCount:
    labeled: int = 0
    classes: int = 0


@dataclass
class OrderSummary:
    order: int
    filter: str | None
    labeled_total: int
    class_total: int
    medial: FlagCount
    idempotent: FlagCount
    unipotent: FlagCount
    associative: FlagCount
    diagonal_class_count: int
    stats: dict = field(default_factory=dict, compare=False)

    def flag(self, name: str) -> FlagCount:
        return getattr(self, name)

    def to_dict(self) -> dict:
        out = {
            "order": self.order,
            "filter": self.filter,
            "labeled_total": str(self.labeled_total),
            "class_total": self.class_total,
        }
        for name in FLAG_NAMES:
            fc = self.flag(name)
            out[name] = {"labeled": str(fc.labeled), "classes": fc.classes}
        out["diagonal_class_count"] = self.diagonal_class_count
        out["stats"] = dict(self.stats)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> OrderSummary:
        flags = {
            name: FlagCount(int(data[name]["labeled"]), int(data[name]["classes"])) for name in FLAG_NAMES
        }
        return cls(
            order=data["order"],
            filter=data["filter"],
            labeled_total=int(data["labeled_total"]),
            class_total=int(data["class_total"]),
            diagonal_class_count=int(data["diagonal_class_count"]),
            stats=dict(data.get("stats", {})),
            **flags,
        )

    @classmethod
    def from_json(cls, text: str) -> OrderSummary:
        return cls.from_dict(json.loads(text))

    CSV_HEADER = (
        "order,labeled,classes,medial_labeled,medial_classes,"
        "idempotent_labeled,idempotent_classes,unipotent_labeled,unipotent_classes"
    )

    def csv_row(self) -> str:
        cols = [self.order, self.labeled_total, self.class_total]
        for name in ("medial", "idempotent", "unipotent"):
            fc = self.flag(name)
            cols += [fc.labeled, fc.classes]
        return ",".join(str(c) for c in cols)


def _summarize(n, filter_, records: Iterable[tuple[int, PropertyFlags, int]], diagonal_keys, stats) -> OrderSummary:
    """``records`` yields (aut_order, flags, labeled multiplicity) per class."""
    labeled = classes = 0
    per = {name: [0, 0] for name in FLAG_NAMES}
    for _aut, flags, mult in records:
        labeled += mult
        classes += 1
        for name in flags.names():
            per[name][0] += mult
            per[name][1] += 1
    return OrderSummary(
        order=n,
        filter=filter_,
        labeled_total=labeled,
        class_total=classes,
        diagonal_class_count=len(diagonal_keys),
        stats=stats,
        **{name: FlagCount(*per[name]) for name in FLAG_NAMES},
    )


# -- work units ------------------------------------------------------------------

@dataclass(frozen=True)
class WorkUnit:
    index: int
    diagonal: DiagonalClass
    job: SubJob


def process_unit(unit: WorkUnit) -> tuple[int, list[tuple[bytes, int, int, int]]]:
    """Canonicalize every partition of one sub-job.

    Returns (visits, sorted [(key, aut_order, flags byte, visit count)]).
    Flags are computed once per class representative.
    """
    n = unit.job.order
    diag = unit.job.diag
    found: dict[bytes, list[int]] = {}
    visits = 0
    for part in iter_triangle_partitions(n, diag, unit.job.prefix):
        visits += 1
        s = TripleSystem.unchecked(n, diag, part)
        rec = canonical(s)
        entry = found.get(rec.key)
        if entry is None:
            flags = core.system_flags(s)
            found[rec.key] = [rec.aut_order, flags.to_byte(), 1]
        else:
            entry[2] += 1
    return visits, [(k, v[0], v[1], v[2]) for k, v in sorted(found.items())]


def select_diagonals(n: int, filter_: str | None) -> list[DiagonalClass]:
    if filter_ not in FILTERS:
        raise ValueError(f"unknown filter {filter_!r}; expected one of {FILTERS[1:]}")
    if filter_ == "idempotent":
        dc = identity_class(n)
        return [dc] if dc is not None else []
    if filter_ == "unipotent":
        dc = constant_class(n)
        return [dc] if dc is not None else []
    return generate_diagonal_classes(n)


def plan_work(n: int, filter_: str | None = None, split_depth: int = 2) -> list[WorkUnit]:
    units = []
    for dc in select_diagonals(n, filter_):
        for job in split_work(n, dc.rep, split_depth):
            units.append(WorkUnit(len(units), dc, job))
    return units


@dataclass
class EnumerationResult:
    summary: OrderSummary
    records: list[ClassRecord]
    final_bytes: bytes


def run_enumeration(
    n: int,
    filter_: str | None = None,
    config: StoreConfig | None = None,
    workers: int = 1,
    split_depth: int = 2,
) -> EnumerationResult:
    """Enumerate one order; also returns the serialized finalize output."""
    if n < 1:
        raise ValueError("order must be positive")
    started = time.perf_counter()
    units = plan_work(n, filter_, split_depth)
    store = ClassStore(config or StoreConfig(), order=n)
    diag_by_key: dict[bytes, DiagonalClass] = {}
    visits = 0
    try:
        if workers > 1 and len(units) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = pool.map(process_unit, units, chunksize=max(1, len(units) // (8 * workers)))
                visits = _consume(units, results, store, filter_, diag_by_key)
        else:
            visits = _consume(units, map(process_unit, units), store, filter_, diag_by_key)
        try:
            records, _ = store.finalize()
        except AuditError as exc:
            raise AuditError(_diagnose(exc, store, diag_by_key)) from exc
        final_bytes = records_to_bytes(records)
        realized = {diagonal_canonical_form(decode_key(r.key).diag) for r in records}
        stats = {
            "runtime_ms": int((time.perf_counter() - started) * 1000),
            "workers": workers,
            "diagonals_processed": len({u.diagonal.key for u in units}),
            "work_units": len(units),
            "solver_visits": visits,
            "spills": store.spill_count,
        }
        summary = _summarize(
            n, filter_, ((r.aut_order, r.flags, r.multiplicity) for r in records), realized, stats
        )
    finally:
        store.close()
    return EnumerationResult(summary, records, final_bytes)


def _consume(units, results, store: ClassStore, filter_, diag_by_key) -> int:
    visits = 0
    for unit, (count, found) in zip(units, results):
        visits += count
        weight = unit.diagonal.labeled_count
        batch = []
        for key, aut, fb, hits in found:
            flags = PropertyFlags.from_byte(fb)
            if filter_ == "medial" and not flags.medial:
                continue
            diag_by_key[key] = unit.diagonal
            batch.append((key, aut, flags, hits * weight))
        store.record_many(batch)
    return visits


def _diagnose(exc: AuditError, store: ClassStore, diag_by_key) -> str:
    parts = [str(exc)]
    for key, dc in diag_by_key.items():
        if key.hex() in str(exc):
            parts.append(f"diagonal class: {dc.line()}")
    return "; ".join(parts)


def enumerate_order(
    n: int,
    filter_: str | None = None,
    config: StoreConfig | None = None,
    workers: int = 1,
    split_depth: int = 2,
) -> OrderSummary:
    return run_enumeration(n, filter_, config, workers, split_depth).summary


# -- independent brute-force oracle ---------------------------------------------

def latin_squares(n: int):
    """All Latin squares of order n, row by row."""
    rows = [(row, sum(1 << (c * n + v) for c, v in enumerate(row))) for row in permutations(range(n))]
    square: list[tuple[int, ...]] = []

    def extend(used: int):
        if len(square) == n:
            yield tuple(square)
            return
        for row, mask in rows:
            if not used & mask:
                square.append(row)
                yield from extend(used | mask)
                square.pop()

    yield from extend(0)


def bruteforce_order(n: int, filter_: str | None = None) -> OrderSummary:
    """Same summary shape as ``enumerate_order`` from all Latin squares of order n."""
    if n > 5:
        raise RefusalError(f"brute force refused for order {n} > 5")
    if n < 1:
        raise ValueError("order must be positive")
    if filter_ not in FILTERS:
        raise ValueError(f"unknown filter {filter_!r}")
    started = time.perf_counter()
    perms = list(permutations(range(n)))
    reps: list[list] = []  # [table, labeled count, flags]
    total = 0
    for cells in latin_squares(n):
        t = core.CayleyTable(n, cells)
        if not core.is_totally_symmetric(t):
            continue
        flags = core.property_flags(t)
        if filter_ is not None and not getattr(flags, filter_):
            continue
        total += 1
        for rep in reps:
            if any(rep[0].relabel(p) == t for p in perms):
                rep[1] += 1
                break
        else:
            reps.append([t, 1, flags])
    diag_forms = set()
    records = []
    for t, count, flags in reps:
        aut = sum(1 for p in perms if t.relabel(p) == t)
        if count * aut != math.factorial(n):
            raise AuditError(f"brute force: class of size {count} has {aut} automorphisms at order {n}")
        records.append((aut, flags, count))
        diag = [t.cells[x][x] for x in range(n)]
        diag_forms.add(min(_relabel_map(diag, p) for p in perms))
    stats = {"runtime_ms": int((time.perf_counter() - started) * 1000), "latin_ts_tables": total}
    return _summarize(n, filter_, records, diag_forms, stats)


def _relabel_map(d, perm) -> tuple[int, ...]:
    out = [0] * len(d)
    for x, y in enumerate(d):
        out[perm[x]] = perm[y]
    return tuple(out)
