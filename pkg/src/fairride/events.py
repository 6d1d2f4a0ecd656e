"""Append-only event log: the platform's source of truth.

One JSON record per line, canonical key order, a schema version field,
and a per-record checksum so truncation or tampering is detected at the
exact sequence number. Snapshots are full-state documents; recovery from
snapshot + suffix must equal recovery from the whole log.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

SCHEMA_VERSION = 1

EVENT_KINDS = frozenset(
    {
        "offer_issued",
        "offer_resolved",
        "observation",
        "trip_completed",
        "rating",
        "dispute",
        "ticket",
        "forum",
        "config_change",
    }
)


class CorruptLog(Exception):
    def __init__(self, seq: int | None, reason: str):
        super().__init__(f"corrupt log at sequence {seq}: {reason}")
        self.seq = seq
        self.reason = reason


class StorageFailure(Exception):
    pass


def canonical_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


@dataclass(frozen=True)
class EventRecord:
    seq: int
    ts: str
    kind: str
    payload: dict

    def body(self) -> dict:
        return {"v": SCHEMA_VERSION, "seq": self.seq, "ts": self.ts, "kind": self.kind, "payload": self.payload}

    def checksum(self) -> str:
        return hashlib.sha256(canonical_json(self.body()).encode("utf-8")).hexdigest()

    def to_line(self) -> str:
        doc = self.body()
        doc["sum"] = self.checksum()
        return canonical_json(doc) + "\n"

    @classmethod
    def from_line(cls, line: str, expected_seq: int | None = None) -> "EventRecord":
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorruptLog(expected_seq, f"unparseable record: {exc}") from None
        declared_sum = doc.pop("sum", None)
        seq = doc.get("seq")
        record = cls(seq=seq, ts=doc["ts"], kind=doc["kind"], payload=doc["payload"])
        if doc.get("v") != SCHEMA_VERSION:
            raise CorruptLog(seq, f"unknown schema version {doc.get('v')!r}")
        if record.checksum() != declared_sum:
            raise CorruptLog(seq, "checksum mismatch")
        if expected_seq is not None and seq != expected_seq:
            raise CorruptLog(seq, f"expected sequence {expected_seq}")
        if record.kind not in EVENT_KINDS:
            raise CorruptLog(seq, f"unknown event kind {record.kind!r}")
        return record


class EventLog:
    """Durable appender; in-memory when no path is given (simulation runs)."""

    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path is not None else None
        self.records: list[EventRecord] = []
        self._next_seq = 1
        if self.path is not None and self.path.exists():
            self.records = list(read_log(self.path))
            self._next_seq = self.records[-1].seq + 1 if self.records else 1

    @property
    def last_seq(self) -> int:
        return self._next_seq - 1

    def append(self, kind: str, payload: dict, ts: str) -> EventRecord:
        if kind not in EVENT_KINDS:
            raise StorageFailure(f"unknown event kind {kind!r}")
        try:
            canonical_json(payload)
        except (TypeError, ValueError) as exc:
            raise StorageFailure(f"payload for {kind!r} is not serializable: {exc}") from None
        record = EventRecord(seq=self._next_seq, ts=ts, kind=kind, payload=payload)
        if self.path is not None:
            try:
                with open(self.path, "a", encoding="utf-8") as fh:
                    fh.write(record.to_line())
                    fh.flush()
                    os.fsync(fh.fileno())
            except OSError as exc:
                raise StorageFailure(str(exc)) from None
        self.records.append(record)
        self._next_seq += 1
        return record

    def __iter__(self) -> Iterator[EventRecord]:
        return iter(self.records)

    def __len__(self) -> int:
        return len(self.records)


def read_log(path: str | Path) -> Iterator[EventRecord]:
    """Validated record stream; raises CorruptLog at the first bad record."""
    expected = 1
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            yield EventRecord.from_line(line, expected_seq=expected)
            expected += 1


def write_log(path: str | Path, records: Iterable[EventRecord]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(record.to_line())


def write_snapshot(path: str | Path, seq: int, state_doc: dict) -> None:
    body = {"v": SCHEMA_VERSION, "seq": seq, "state": state_doc}
    digest = hashlib.sha256(canonical_json(body).encode("utf-8")).hexdigest()
    body["sum"] = digest
    Path(path).write_text(canonical_json(body) + "\n", encoding="utf-8")


def read_snapshot(path: str | Path) -> tuple[int, dict]:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    declared = doc.pop("sum", None)
    digest = hashlib.sha256(canonical_json(doc).encode("utf-8")).hexdigest()
    if digest != declared:
        raise CorruptLog(doc.get("seq"), "snapshot checksum mismatch")
    return doc["seq"], doc["state"]
