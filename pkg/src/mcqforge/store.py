"""Append-only rating store with crash recovery by log replay.

Every accepted rating is one JSON line, flushed before the call
returns. Restarting on the same path replays the log and rebuilds the
(assessor, item) index, so a crashed service resumes with identical
state. Duplicates are rejected, never overwritten: the first rating for
a pair wins, matching how assessor time is spent only once.
"""

import json
import os
import threading

from mcqforge.errors import DuplicateRatingError, ParseError
from mcqforge.humaneval import RatingRecord


class RatingStore:
    def __init__(self, path: str):
        self.path = path
        self._lock = threading.Lock()
        self._index: dict[tuple[str, str], RatingRecord] = {}
        self._replay()

    def _replay(self):
        if not os.path.exists(self.path):
            return
        with open(self.path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    record = RatingRecord.from_dict(json.loads(line))
                except (ValueError, KeyError) as e:
                    raise ParseError(f"{self.path}:{lineno}: bad rating record: {e}") from e
                self._index[(record.assessor, record.item)] = record

    def add(self, record: RatingRecord) -> None:
        """Append one rating; duplicate (assessor, item) is rejected."""
        key = (record.assessor, record.item)
        with self._lock:
            if key in self._index:
                raise DuplicateRatingError(
                    f"rating for assessor {record.assessor!r} on item "
                    f"{record.item!r} already exists"
                )
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(record.as_dict(), sort_keys=True,
                                    ensure_ascii=False) + "\n")
                fh.flush()
                os.fsync(fh.fileno())
            self._index[key] = record

    def has(self, assessor: str, item: str) -> bool:
        with self._lock:
            return (assessor, item) in self._index

    def get(self, assessor: str, item: str) -> RatingRecord | None:
        with self._lock:
            return self._index.get((assessor, item))

    def records(self) -> list[RatingRecord]:
        """Snapshot of all ratings, in insertion order."""
        with self._lock:
            return list(self._index.values())

    def rated_items(self, assessor: str) -> set[str]:
        with self._lock:
            return {item for (a, item) in self._index if a == assessor}

    def __len__(self) -> int:
        with self._lock:
            return len(self._index)
