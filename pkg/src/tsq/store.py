"""Sharded isomorphism-class accumulator with spill-to-disk.

Keys are routed to one of ``shard_count`` shards by the top bits of a 64-bit
BLAKE2b hash.  When the estimated in-memory size exceeds the budget, whole
shards are written to sorted, append-only run files and cleared; later
records for a spilled shard start a fresh in-memory run.  ``finalize`` merges
every run of every shard by key and sums multiplicities.

Run file layout (little-endian)::

    b"TSQ1"
    repeated: u16 key length | key | u64 aut_order | u8 flags | u128 multiplicity
"""
from __future__ import annotations

import errno
import hashlib
import heapq
import json
import math
import os
import struct
import tempfile
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import BinaryIO, Iterable, Iterator

from .core import FLAG_NAMES, PropertyFlags
from .errors import AuditError, CorruptionError, CorruptRunError, StoreIOError

MAGIC = b"TSQ1"
_HEAD = struct.Struct("<H")
_TAIL = struct.Struct("<QB16s")
ENTRY_OVERHEAD = 120
SPILL_ENV = "TSQ_SPILL_DIR"


@dataclass(frozen=True)
class StoreConfig:
    shard_count: int = 256
    memory_budget: int | None = None
    spill_directory: Path | None = None
    shard_subset: frozenset[int] | None = None

    def __post_init__(self):
        k = self.shard_count
        if k < 1 or k & (k - 1):
            raise ValueError(f"shard_count must be a power of two, got {k}")
        if self.memory_budget is not None and self.memory_budget < 0:
            raise ValueError("memory_budget must be non-negative")
        if self.shard_subset is not None:
            bad = [i for i in self.shard_subset if not 0 <= i < k]
            if bad:
                raise ValueError(f"shard indices out of range: {bad}")


@dataclass(frozen=True)
class ClassRecord:
    key: bytes
    aut_order: int
    flags: PropertyFlags
    multiplicity: int


@dataclass
class ClassSummary:
    class_count: int = 0
    labeled_total: int = 0
    flag_classes: dict[str, int] = field(default_factory=lambda: {name: 0 for name in FLAG_NAMES})
    flag_labeled: dict[str, int] = field(default_factory=lambda: {name: 0 for name in FLAG_NAMES})

    def add(self, rec: ClassRecord) -> None:
        self.class_count += 1
        self.labeled_total += rec.multiplicity
        for name in rec.flags.names():
            self.flag_classes[name] += 1
            self.flag_labeled[name] += rec.multiplicity


def shard_of(key: bytes, shard_count: int) -> int:
    bits = shard_count.bit_length() - 1
    if bits == 0:
        return 0
    h = int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "big")
    return h >> (64 - bits)


def _pack(key: bytes, aut: int, flags: int, mult: int) -> bytes:
    if len(key) > 0xFFFF:
        raise ValueError("key longer than 65535 bytes")
    if not 0 < mult < 1 << 128:
        raise OverflowError("multiplicity outside the 128-bit range")
    return _HEAD.pack(len(key)) + key + _TAIL.pack(aut, flags, mult.to_bytes(16, "little"))


def _write_records(fh: BinaryIO, items: Iterable[tuple[bytes, int, int, int]]) -> None:
    fh.write(MAGIC)
    for key, aut, flags, mult in items:
        fh.write(_pack(key, aut, flags, mult))


def records_to_bytes(records: Iterable[ClassRecord]) -> bytes:
    """Serialize finalized records in run-file format (used to compare runs)."""
    out = [MAGIC]
    for r in records:
        out.append(_pack(r.key, r.aut_order, r.flags.to_byte(), r.multiplicity))
    return b"".join(out)


def read_run(path: Path) -> Iterator[tuple[bytes, int, int, int]]:
    with open(path, "rb") as fh:
        if fh.read(4) != MAGIC:
            raise CorruptRunError(path, "bad magic")
        while True:
            head = fh.read(_HEAD.size)
            if not head:
                return
            if len(head) < _HEAD.size:
                raise CorruptRunError(path, "truncated record header")
            (klen,) = _HEAD.unpack(head)
            key = fh.read(klen)
            tail = fh.read(_TAIL.size)
            if len(key) < klen or len(tail) < _TAIL.size:
                raise CorruptRunError(path, "truncated record")
            aut, flags, mult = _TAIL.unpack(tail)
            if flags & ~0xF:
                raise CorruptRunError(path, f"unknown flag bits {flags:#x}")
            yield key, aut, flags, int.from_bytes(mult, "little")


class ClassStore:
    """Hash map from canonical key to (aut_order, flags, multiplicity).

    With ``order`` given, finalize audits ``multiplicity * aut_order == n!``
    for every class.
    """

    def __init__(self, config: StoreConfig | None = None, order: int | None = None):
        self.config = config or StoreConfig()
        self.order = order
        k = self.config.shard_count
        self._shards: list[dict[bytes, list[int]]] = [{} for _ in range(k)]
        self._locks = [threading.Lock() for _ in range(k)]
        self._usage = [0] * k
        self._runs: list[list[Path]] = [[] for _ in range(k)]
        self._dir: Path | None = None
        self._owns_dir = False
        self.spill_count = 0

    # -- recording ---------------------------------------------------------

    def accepts(self, key: bytes) -> bool:
        subset = self.config.shard_subset
        return subset is None or shard_of(key, self.config.shard_count) in subset

    def record(self, key: bytes, aut_order: int, flags: PropertyFlags, multiplicity: int = 1) -> bool:
        """Accumulate one record; False if the key's shard is excluded by the subset."""
        if multiplicity < 1:
            raise ValueError("multiplicity must be at least 1")
        idx = shard_of(key, self.config.shard_count)
        subset = self.config.shard_subset
        if subset is not None and idx not in subset:
            return False
        fb = flags.to_byte()
        with self._locks[idx]:
            shard = self._shards[idx]
            entry = shard.get(key)
            if entry is None:
                shard[key] = [aut_order, fb, multiplicity]
                self._usage[idx] += len(key) + ENTRY_OVERHEAD
            else:
                if entry[0] != aut_order or entry[1] != fb:
                    raise CorruptionError(
                        f"key {key.hex()} recorded with aut_order {aut_order}/flags {fb:#x}, "
                        f"stored {entry[0]}/{entry[1]:#x}"
                    )
                entry[2] += multiplicity
        return True

    def record_many(self, items: Iterable[tuple[bytes, int, PropertyFlags, int]]) -> None:
        """Record a batch (one work unit), then enforce the memory budget."""
        for key, aut, flags, mult in items:
            self.record(key, aut, flags, mult)
        self.enforce_budget()

    @property
    def memory_usage(self) -> int:
        return sum(self._usage)

    def enforce_budget(self) -> None:
        budget = self.config.memory_budget
        if budget is None:
            return
        while self.memory_usage > budget:
            idx = max(range(len(self._shards)), key=lambda i: (self._usage[i], -i))
            if not self._shards[idx]:
                break
            self.spill(idx)

    # -- spilling ----------------------------------------------------------

    @property
    def spill_directory(self) -> Path:
        if self._dir is None:
            configured = self.config.spill_directory or os.environ.get(SPILL_ENV)
            if configured:
                self._dir = Path(configured)
                self._dir.mkdir(parents=True, exist_ok=True)
            else:
                self._dir = Path(tempfile.mkdtemp(prefix="tsq-spill-"))
                self._owns_dir = True
        return self._dir

    def spill(self, idx: int) -> Path:
        with self._locks[idx]:
            shard = self._shards[idx]
            seq = len(self._runs[idx])
            path = self.spill_directory / f"shard{idx}-run{seq}.tsq"
            tmp = path.with_suffix(".tsq.part")
            items = [(k, v[0], v[1], v[2]) for k, v in sorted(shard.items())]
            try:
                with open(tmp, "wb") as fh:
                    _write_records(fh, items)
                os.replace(tmp, path)
            except OSError as exc:
                try:
                    tmp.unlink()
                except OSError:
                    pass
                raise StoreIOError(exc.errno or errno.EIO, f"spilling shard {idx} failed: {exc}") from exc
            self._runs[idx].append(path)
            shard.clear()
            self._usage[idx] = 0
            self.spill_count += 1
            return path

    # -- finalize ----------------------------------------------------------

    def _shard_stream(self, idx: int) -> Iterator[ClassRecord]:
        streams = [read_run(p) for p in self._runs[idx]]
        mem = [(k, v[0], v[1], v[2]) for k, v in sorted(self._shards[idx].items())]
        streams.append(iter(mem))
        current = None
        for key, aut, flags, mult in heapq.merge(*streams, key=lambda r: r[0]):
            if current is not None and current[0] == key:
                if current[1] != aut or current[2] != flags:
                    raise CorruptionError(f"key {key.hex()} has conflicting aut_order/flags across runs")
                current[3] += mult
                continue
            if current is not None:
                yield self._emit(current)
            current = [key, aut, flags, mult]
        if current is not None:
            yield self._emit(current)

    def _emit(self, item: list) -> ClassRecord:
        key, aut, flags, mult = item
        if self.order is not None and mult * aut != math.factorial(self.order):
            raise AuditError(
                f"class {key.hex()}: multiplicity {mult} x aut_order {aut} != {self.order}!"
            )
        return ClassRecord(key, aut, PropertyFlags.from_byte(flags), mult)

    def iter_final(self) -> Iterator[ClassRecord]:
        """All classes in global key order."""
        return heapq.merge(*(self._shard_stream(i) for i in self._active_shards()), key=lambda r: r.key)

    def _active_shards(self) -> list[int]:
        subset = self.config.shard_subset
        return sorted(subset) if subset is not None else list(range(self.config.shard_count))

    def finalize(self) -> tuple[list[ClassRecord], ClassSummary]:
        records = list(self.iter_final())
        summary = ClassSummary()
        for r in records:
            summary.add(r)
        if self._dir is not None or self.config.spill_directory is not None:
            self.write_manifest()
        return records, summary

    def write_manifest(self) -> Path:
        path = self.spill_directory / "manifest.json"
        data = {
            "order": self.order,
            "shard_count": self.config.shard_count,
            "memory_budget": self.config.memory_budget,
            "shard_subset": sorted(self.config.shard_subset) if self.config.shard_subset is not None else None,
            "completed_shards": self._active_shards(),
            "runs": {str(i): [p.name for p in runs] for i, runs in enumerate(self._runs) if runs},
        }
        path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
        return path

    def close(self) -> None:
        for runs in self._runs:
            for p in runs:
                try:
                    p.unlink()
                except FileNotFoundError:
                    pass
            runs.clear()
        if self._owns_dir and self._dir is not None:
            manifest = self._dir / "manifest.json"
            if manifest.exists():
                manifest.unlink()
            try:
                self._dir.rmdir()
            except OSError:
                pass
            self._dir = None

    def __enter__(self) -> ClassStore:
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def load_manifest(directory: Path) -> dict:
    return json.loads((Path(directory) / "manifest.json").read_text())


def missing_shards(manifests: Iterable[dict], shard_count: int) -> list[int]:
    """Shards not yet covered by any completed pass."""
    done: set[int] = set()
    for m in manifests:
        if m["shard_count"] != shard_count:
            raise ValueError("manifests disagree on shard_count")
        done.update(m["completed_shards"])
    return [i for i in range(shard_count) if i not in done]
