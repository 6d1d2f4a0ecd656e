from __future__ import annotations

import json

import pytest

from fairride.events import (
    CorruptLog,
    EventLog,
    EventRecord,
    StorageFailure,
    read_log,
    read_snapshot,
    write_snapshot,
)

TS = "2026-03-02T09:00:00+00:00"


class TestAppend:
    def test_sequence_is_monotone(self, tmp_path):
        log = EventLog(tmp_path / "events.log")
        first = log.append("ticket", {"action": "opened"}, TS)
        second = log.append("ticket", {"action": "advanced"}, TS)
        assert (first.seq, second.seq) == (1, 2)

    def test_unknown_kind_rejected_log_unchanged(self, tmp_path):
        path = tmp_path / "events.log"
        log = EventLog(path)
        log.append("ticket", {"action": "opened"}, TS)
        with pytest.raises(StorageFailure):
            log.append("mystery", {}, TS)
        assert len(list(read_log(path))) == 1

    def test_unserializable_payload_rejected(self, tmp_path):
        log = EventLog(tmp_path / "events.log")
        with pytest.raises(StorageFailure):
            log.append("ticket", {"when": object()}, TS)
        assert len(log) == 0

    def test_memory_mode_without_path(self):
        log = EventLog()
        log.append("forum", {"action": "topic"}, TS)
        assert log.last_seq == 1


class TestDurability:
    def test_reopen_continues_sequence(self, tmp_path):
        path = tmp_path / "events.log"
        log = EventLog(path)
        log.append("ticket", {"n": 1}, TS)
        log.append("ticket", {"n": 2}, TS)
        again = EventLog(path)
        record = again.append("ticket", {"n": 3}, TS)
        assert record.seq == 3

    def test_truncated_final_record_names_sequence(self, tmp_path):
        path = tmp_path / "events.log"
        log = EventLog(path)
        for n in range(3):
            log.append("ticket", {"n": n}, TS)
        raw = path.read_text()
        path.write_text(raw[:-20])  # chop the tail of record 3
        with pytest.raises(CorruptLog) as exc:
            list(read_log(path))
        assert exc.value.seq == 3

    def test_tampered_payload_detected(self, tmp_path):
        path = tmp_path / "events.log"
        log = EventLog(path)
        log.append("ticket", {"amount": 10}, TS)
        doc = json.loads(path.read_text())
        doc["payload"]["amount"] = 999
        path.write_text(json.dumps(doc) + "\n")
        with pytest.raises(CorruptLog):
            list(read_log(path))

    def test_gap_in_sequence_detected(self, tmp_path):
        path = tmp_path / "events.log"
        log = EventLog(path)
        log.append("ticket", {"n": 1}, TS)
        log.append("ticket", {"n": 2}, TS)
        lines = path.read_text().splitlines()
        path.write_text(lines[1] + "\n")  # drop record 1
        with pytest.raises(CorruptLog):
            list(read_log(path))


class TestSnapshots:
    def test_roundtrip(self, tmp_path):
        path = tmp_path / "snap.json"
        write_snapshot(path, 42, {"drivers": {"d1": {"x": 1.5}}})
        seq, state = read_snapshot(path)
        assert seq == 42
        assert state == {"drivers": {"d1": {"x": 1.5}}}

    def test_snapshot_tamper_detected(self, tmp_path):
        path = tmp_path / "snap.json"
        write_snapshot(path, 7, {"a": 1})
        doc = json.loads(path.read_text())
        doc["state"]["a"] = 2
        path.write_text(json.dumps(doc))
        with pytest.raises(CorruptLog):
            read_snapshot(path)


def test_record_line_roundtrip():
    record = EventRecord(seq=5, ts=TS, kind="observation", payload={"p": 0.123456789012345})
    again = EventRecord.from_line(record.to_line(), expected_seq=5)
    assert again == record
    assert again.payload["p"] == record.payload["p"]
