"""Append-only JSON-lines event log backing the alias registry.

One self-describing event per line. Replaying the file from the top rebuilds
registry state exactly, which keeps persistence trivially auditable and gives
the attribution workflow a complete audit trail.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import IO, Iterator


class EventLog:
    """Durable sink for registry events. Each append is flushed immediately."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._fh: IO[str] | None = open(self.path, "a", encoding="utf-8")

    def append(self, event: dict) -> None:
        if self._fh is None:
            raise ValueError("event log is closed")
        self._fh.write(json.dumps(event, sort_keys=True) + "\n")
        self._fh.flush()

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None


def read_events(path: str | Path) -> Iterator[dict]:
    """Yield events from a log file in append order. Missing file yields nothing."""
    path = Path(path)
    if not path.exists():
        return
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield json.loads(line)
