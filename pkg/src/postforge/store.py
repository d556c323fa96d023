"""Line-delimited question store.

One JSON record per line under a single directory, plus an index file that
maps question_id to the byte offset of its latest line. The layout is
diffable, streams well, and needs no database. Writers hold an exclusive
file lock; readers only ever see fully written index states because the
index is replaced atomically.
"""

from __future__ import annotations

import json
import os
from contextlib import contextmanager
from pathlib import Path
from typing import Iterable, Iterator

from filelock import FileLock

from .records import QuestionRecord, validate_question

RECORDS_FILE = "records.jsonl"
INDEX_FILE = "index.json"
QUARANTINE_FILE = "quarantine.jsonl"
LOCK_FILE = ".store.lock"


class QuestionStore:
    def __init__(self, root: str | Path, create: bool = True):
        self.root = Path(root)
        if create:
            self.root.mkdir(parents=True, exist_ok=True)
        elif not self.root.is_dir():
            raise FileNotFoundError(f"store directory not found: {self.root}")
        self._records_path = self.root / RECORDS_FILE
        self._index_path = self.root / INDEX_FILE
        self._quarantine_path = self.root / QUARANTINE_FILE
        self._lock = FileLock(str(self.root / LOCK_FILE))
        self._records_path.touch(exist_ok=True)
        if not self._index_path.exists():
            self._write_index({})

    # -- index ------------------------------------------------------------

    def _read_index(self) -> dict[int, int]:
        with open(self._index_path, encoding="utf-8") as fh:
            raw = json.load(fh)
        return {int(k): int(v) for k, v in raw.items()}

    def _write_index(self, index: dict[int, int]) -> None:
        tmp = self._index_path.with_suffix(".json.tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump({str(k): v for k, v in index.items()}, fh)
        os.replace(tmp, self._index_path)

    @contextmanager
    def _writer(self):
        with self._lock:
            yield

    # -- writes -----------------------------------------------------------

    def add(self, records: Iterable[QuestionRecord]) -> dict[str, int]:
        """Store records keyed by question_id.

        Re-adding a record identical to the stored one is a no-op, so
        ingesting the same dump twice leaves the store unchanged. A changed
        record replaces the stored one (the index moves to the new line).
        Records violating type invariants land in the quarantine file.
        """
        counts = {"stored": 0, "unchanged": 0, "replaced": 0, "quarantined": 0}
        with self._writer():
            index = self._read_index()
            with open(self._records_path, "a", encoding="utf-8") as fh:
                for record in records:
                    violations, flags = validate_question(record)
                    if violations:
                        self._quarantine(record, violations)
                        counts["quarantined"] += 1
                        continue
                    if flags:
                        record = record.with_flags(*flags)
                    existing = None
                    if record.question_id in index:
                        existing = self._read_at(index[record.question_id])
                    if existing == record:
                        counts["unchanged"] += 1
                        continue
                    offset = fh.tell()
                    fh.write(json.dumps(record.to_dict(), sort_keys=True) + "\n")
                    index[record.question_id] = offset
                    counts["replaced" if existing is not None else "stored"] += 1
            self._write_index(index)
        return counts

    def _quarantine(self, record: QuestionRecord, violations: list[str]) -> None:
        entry = {"violations": violations, "record": record.to_dict()}
        with open(self._quarantine_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(entry, sort_keys=True) + "\n")

    # -- reads ------------------------------------------------------------

    def _read_at(self, offset: int) -> QuestionRecord:
        with open(self._records_path, encoding="utf-8") as fh:
            fh.seek(offset)
            return QuestionRecord.from_dict(json.loads(fh.readline()))

    def get(self, question_id: int) -> QuestionRecord:
        index = self._read_index()
        if question_id not in index:
            raise KeyError(question_id)
        return self._read_at(index[question_id])

    def question_ids(self) -> list[int]:
        return sorted(self._read_index())

    def __len__(self) -> int:
        return len(self._read_index())

    def __iter__(self) -> Iterator[QuestionRecord]:
        index = self._read_index()
        with open(self._records_path, encoding="utf-8") as fh:
            for qid in sorted(index):
                fh.seek(index[qid])
                yield QuestionRecord.from_dict(json.loads(fh.readline()))

    def quarantined(self) -> list[dict]:
        if not self._quarantine_path.exists():
            return []
        with open(self._quarantine_path, encoding="utf-8") as fh:
            return [json.loads(line) for line in fh if line.strip()]
