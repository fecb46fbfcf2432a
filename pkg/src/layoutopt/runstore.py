"""File-backed persistence for optimization runs.

A workspace directory holds one JSON document per run plus an index file
for cheap listing. Records are immutable once written; the store
serializes index updates behind a lock and refuses to overwrite an
existing run id.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from dataclasses import dataclass
from datetime import datetime, timezone

from .core import ParseError


class UnknownRunError(KeyError):
    pass


class WorkspaceConflictError(RuntimeError):
    pass


@dataclass(frozen=True)
class RunRecord:
    run_id: str
    created_at: str
    request: dict
    report: dict
    model_ref: dict

    def to_dict(self) -> dict:
        return {
            "run_id": self.run_id,
            "created_at": self.created_at,
            "request": self.request,
            "report": self.report,
            "model_ref": self.model_ref,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "RunRecord":
        try:
            return cls(
                run_id=obj["run_id"],
                created_at=obj["created_at"],
                request=obj["request"],
                report=obj["report"],
                model_ref=obj["model_ref"],
            )
        except KeyError as e:
            raise ParseError(f"run record missing field {e}") from None

    def summary(self) -> dict:
        final = self.report.get("final", {})
        return {
            "run_id": self.run_id,
            "created_at": self.created_at,
            "satisfied": final.get("satisfied"),
            "max_violation": final.get("max_violation"),
            "iterations": len(self.report.get("history", [])),
            "model_ref": self.model_ref,
        }


def new_run_id() -> str:
    return "run-" + uuid.uuid4().hex[:12]


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class RunStore:
    def __init__(self, workspace):
        self.workspace = os.fspath(workspace)
        self.runs_dir = os.path.join(self.workspace, "runs")
        self.index_path = os.path.join(self.runs_dir, "index.json")
        self._lock = threading.Lock()
        os.makedirs(self.runs_dir, exist_ok=True)

    def _run_path(self, run_id: str) -> str:
        if not run_id or "/" in run_id or run_id.startswith("."):
            raise UnknownRunError(run_id)
        return os.path.join(self.runs_dir, f"{run_id}.json")

    def _read_index(self) -> list[str]:
        if not os.path.exists(self.index_path):
            return []
        with open(self.index_path, encoding="utf-8") as f:
            return json.load(f).get("runs", [])

    def add(self, record: RunRecord) -> None:
        path = self._run_path(record.run_id)
        with self._lock:
            if os.path.exists(path):
                raise WorkspaceConflictError(f"run {record.run_id} already exists")
            with open(path, "w", encoding="utf-8") as f:
                json.dump(record.to_dict(), f, sort_keys=True, indent=1)
                f.write("\n")
            index = self._read_index()
            index.append(record.run_id)
            with open(self.index_path, "w", encoding="utf-8") as f:
                json.dump({"runs": index}, f, indent=1)
                f.write("\n")

    def get(self, run_id: str) -> RunRecord:
        path = self._run_path(run_id)
        if not os.path.exists(path):
            raise UnknownRunError(run_id)
        with open(path, encoding="utf-8") as f:
            return RunRecord.from_dict(json.load(f))

    def list_runs(self) -> list[dict]:
        with self._lock:
            ids = self._read_index()
        out = []
        for run_id in ids:
            try:
                out.append(self.get(run_id).summary())
            except UnknownRunError:
                continue
        return out
