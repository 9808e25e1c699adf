"""Append-only audit log with hash-chain tamper evidence.

Every consent change, enforcement decision, and subject-right operation
lands here as one immutable record.  Appends are totally ordered; queries
running concurrently with appends see a prefix.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Optional

from .model import TransparencyError, canonical_json_bytes, content_digest

GENESIS_CHAIN = "0" * 64


class AuditOrigin(str, Enum):
    SERVICE_EXECUTION = "service_execution"
    CONSENT_CHANGE = "consent_change"
    SUBJECT_RIGHT = "subject_right"
    THIRD_PARTY_SHARE = "third_party_share"
    ENFORCEMENT_ERROR = "enforcement_error"


# Origins produced by the enforcer: these must carry the full set of
# mandatory fields (origin, timestamp, data version, filter description,
# service version).
ENFORCEMENT_ORIGINS = frozenset(
    {AuditOrigin.SERVICE_EXECUTION, AuditOrigin.THIRD_PARTY_SHARE}
)


class MissingFieldError(TransparencyError):
    def __init__(self, origin: AuditOrigin, field_name: str):
        self.origin = origin
        self.field_name = field_name
        super().__init__(f"{origin.value} audit record requires {field_name}")


@dataclass(frozen=True)
class AuditRecord:
    """One usage record.  ``chain`` is the digest of (previous chain, record)."""

    seq: int
    origin: AuditOrigin
    at: str
    user_id: str
    data_version: str
    filter_description: str
    service_version: str
    detail: str
    chain: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "seq": self.seq,
            "origin": self.origin.value,
            "at": self.at,
            "user_id": self.user_id,
            "data_version": self.data_version,
            "filter_description": self.filter_description,
            "service_version": self.service_version,
            "detail": self.detail,
            "chain": self.chain,
        }

    def body_dict(self) -> dict[str, Any]:
        body = self.to_dict()
        del body["chain"]
        return body

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "AuditRecord":
        return cls(
            seq=int(data["seq"]),
            origin=AuditOrigin(data["origin"]),
            at=data["at"],
            user_id=data.get("user_id", ""),
            data_version=data.get("data_version", ""),
            filter_description=data.get("filter_description", ""),
            service_version=data.get("service_version", ""),
            detail=data.get("detail", ""),
            chain=data["chain"],
        )


def chain_digest(previous_chain: str, record_body: dict[str, Any]) -> str:
    return content_digest([previous_chain, record_body])


def _utcnow_iso() -> str:
    return datetime.now(timezone.utc).isoformat()


class AuditLog:
    """Hash-chained, append-only audit database.

    With ``path`` set, records additionally persist as one canonical JSON
    object per line; the file is replayed on construction.
    """

    def __init__(self, path: Optional[str | Path] = None, lock: Optional[threading.RLock] = None):
        self._lock = lock or threading.RLock()
        self._records: list[AuditRecord] = []
        self._path = Path(path) if path else None
        if self._path and self._path.exists():
            self._load()

    def _load(self) -> None:
        import json

        with self._path.open("r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    self._records.append(AuditRecord.from_dict(json.loads(line)))

    def __len__(self) -> int:
        return len(self._records)

    def append(
        self,
        origin: AuditOrigin,
        *,
        at: Optional[str] = None,
        user_id: str = "",
        data_version: str = "",
        filter_description: str = "",
        service_version: str = "",
        detail: str = "",
    ) -> int:
        """Persist one record with the next sequence number; returns the seq.

        Raises MissingFieldError when an enforcement-origin record lacks one
        of its mandatory fields.
        """
        if origin in ENFORCEMENT_ORIGINS:
            for field_name, value in (
                ("data_version", data_version),
                ("filter_description", filter_description),
                ("service_version", service_version),
            ):
                if not value:
                    raise MissingFieldError(origin, field_name)

        with self._lock:
            seq = len(self._records) + 1
            previous = self._records[-1].chain if self._records else GENESIS_CHAIN
            body = {
                "seq": seq,
                "origin": origin.value,
                "at": at or _utcnow_iso(),
                "user_id": user_id,
                "data_version": data_version,
                "filter_description": filter_description,
                "service_version": service_version,
                "detail": detail,
            }
            record = AuditRecord(
                seq=seq,
                origin=origin,
                at=body["at"],
                user_id=user_id,
                data_version=data_version,
                filter_description=filter_description,
                service_version=service_version,
                detail=detail,
                chain=chain_digest(previous, body),
            )
            self._records.append(record)
            if self._path:
                with self._path.open("ab") as fh:
                    fh.write(canonical_json_bytes(record.to_dict()) + b"\n")
            return seq

    def records(self) -> list[AuditRecord]:
        with self._lock:
            return list(self._records)

    def query(
        self,
        user_id: Optional[str] = None,
        start: Optional[str] = None,
        end: Optional[str] = None,
        origins: Optional[Iterable[AuditOrigin]] = None,
    ) -> list[AuditRecord]:
        """Exact selector match in seq order; time bounds are inclusive."""
        origin_set = frozenset(origins) if origins is not None else None
        out = []
        for r in self.records():
            if user_id is not None and r.user_id != user_id:
                continue
            if start is not None and r.at < start:
                continue
            if end is not None and r.at > end:
                continue
            if origin_set is not None and r.origin not in origin_set:
                continue
            out.append(r)
        return out

    def export_trace(self, user_id: str) -> dict[str, Any]:
        """All records touching the user in order, with chain digests so the
        recipient can verify integrity independently.

        A per-user trace is a filtered projection of the global log, so
        consecutive trace records need not chain to each other; every record
        therefore carries the chain value of its global predecessor
        (``prev_chain``), making each link independently checkable.
        """
        with self._lock:
            snapshot = list(self._records)
        documents = []
        for record in snapshot:
            if record.user_id != user_id:
                continue
            doc = record.to_dict()
            doc["prev_chain"] = (
                snapshot[record.seq - 2].chain if record.seq > 1 else GENESIS_CHAIN
            )
            documents.append(doc)
        return {
            "user_id": user_id,
            "record_count": len(documents),
            "records": documents,
        }

    def verify_integrity(self) -> Optional[int]:
        """Recompute the digest chain; return the first bad seq, or None if ok."""
        with self._lock:
            previous = GENESIS_CHAIN
            for index, record in enumerate(self._records):
                if record.seq != index + 1:
                    return index + 1
                if chain_digest(previous, record.body_dict()) != record.chain:
                    return record.seq
                previous = record.chain
            return None

    def count_by_origin(self) -> dict[AuditOrigin, int]:
        counts: dict[AuditOrigin, int] = {origin: 0 for origin in AuditOrigin}
        for r in self.records():
            counts[r.origin] += 1
        return counts
