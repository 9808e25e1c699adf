"""Versioned storage of personal data records.

Records are immutable values; rectification replaces a record with a higher
version, erasure replaces it with a payload-free tombstone so that audit
references stay resolvable.  Per-user write serialization via the shared
lock; the per-user data version digest changes exactly when one of that
user's records changes.
"""

from __future__ import annotations

import base64
import threading
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Iterable, Optional

from .audit import AuditLog, AuditOrigin
from .model import TransparencyError, canonical_json_bytes, content_digest


class SourceKind(str, Enum):
    USER_DIRECT = "user_direct"
    DERIVED_INTERNAL = "derived_internal"
    THIRD_PARTY = "third_party"


class UnknownCategoryError(TransparencyError):
    def __init__(self, category_id: str):
        self.category_id = category_id
        super().__init__(f"unknown data category: {category_id!r}")


class EmptyPayloadError(TransparencyError):
    pass


class RecordNotFoundError(TransparencyError):
    def __init__(self, record_id: str):
        self.record_id = record_id
        super().__init__(f"no such record: {record_id!r}")


class AlreadyErasedError(TransparencyError):
    def __init__(self, record_id: str):
        self.record_id = record_id
        super().__init__(f"record is erased: {record_id!r}")


@dataclass(frozen=True)
class PersonalDataRecord:
    record_id: str
    user_id: str
    category: str
    payload: bytes
    source: SourceKind
    provenance: str
    created_at: str
    version: int = 1
    erased: bool = False

    def to_dict(self, include_payload: bool = True) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "record_id": self.record_id,
            "user_id": self.user_id,
            "category": self.category,
            "source": self.source.value,
            "provenance": self.provenance,
            "created_at": self.created_at,
            "version": self.version,
            "erased": self.erased,
        }
        if include_payload:
            doc["payload"] = base64.b64encode(self.payload).decode("ascii")
        return doc

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "PersonalDataRecord":
        return cls(
            record_id=data["record_id"],
            user_id=data["user_id"],
            category=data["category"],
            payload=base64.b64decode(data.get("payload", "")),
            source=SourceKind(data["source"]),
            provenance=data.get("provenance", ""),
            created_at=data["created_at"],
            version=int(data.get("version", 1)),
            erased=bool(data.get("erased", False)),
        )


def _utcnow_iso() -> str:
    return datetime.now(timezone.utc).isoformat()


class RecordStore:
    """Embedded store of personal data records with tombstoning erasure."""

    def __init__(
        self,
        registry,
        audit: AuditLog,
        path: Optional[str | Path] = None,
        lock: Optional[threading.RLock] = None,
    ):
        self._registry = registry
        self._audit = audit
        self._lock = lock or threading.RLock()
        self._records: dict[str, PersonalDataRecord] = {}
        self._by_user: dict[str, list[str]] = {}
        self._digest_cache: dict[str, str] = {}
        self._counter = 0
        self._erase_hooks: list[Callable[[str], None]] = []
        self._path = Path(path) if path else None
        if self._path and self._path.exists():
            self._load()

    # -- persistence -----------------------------------------------------------

    def _load(self) -> None:
        import json

        data = json.loads(self._path.read_text(encoding="utf-8"))
        for raw in data.get("records", ()):
            record = PersonalDataRecord.from_dict(raw)
            self._records[record.record_id] = record
            self._by_user.setdefault(record.user_id, []).append(record.record_id)
        self._counter = int(data.get("counter", len(self._records)))

    def _save(self) -> None:
        if not self._path:
            return
        doc = {
            "counter": self._counter,
            "records": [r.to_dict() for r in self._records.values()],
        }
        tmp = self._path.with_suffix(".tmp")
        tmp.write_bytes(canonical_json_bytes(doc))
        tmp.replace(self._path)

    # -- hooks ------------------------------------------------------------------

    def on_erase(self, hook: Callable[[str], None]) -> None:
        """Register a callback invoked with the user id after each erasure."""
        self._erase_hooks.append(hook)

    # -- operations ---------------------------------------------------------------

    def put_record(
        self,
        user_id: str,
        category: str,
        payload: bytes,
        source: SourceKind = SourceKind.USER_DIRECT,
        provenance: str = "",
        at: Optional[str] = None,
    ) -> str:
        if not payload:
            raise EmptyPayloadError("record payload must be nonempty")
        if self._registry.get_category(category) is None:
            raise UnknownCategoryError(category)
        with self._lock:
            self._counter += 1
            record_id = f"r-{self._counter:08d}"
            record = PersonalDataRecord(
                record_id=record_id,
                user_id=user_id,
                category=category,
                payload=bytes(payload),
                source=source,
                provenance=provenance,
                created_at=at or _utcnow_iso(),
            )
            self._records[record_id] = record
            self._by_user.setdefault(user_id, []).append(record_id)
            self._digest_cache.pop(user_id, None)
            self._save()
            return record_id

    def get_record(self, record_id: str) -> PersonalDataRecord:
        record = self._records.get(record_id)
        if record is None:
            raise RecordNotFoundError(record_id)
        return record

    def get_records(
        self,
        user_id: str,
        categories: Optional[Iterable[str]] = None,
        sources: Optional[Iterable[SourceKind]] = None,
    ) -> list[PersonalDataRecord]:
        """Non-erased records matching the selector, ordered by
        (category, record_id)."""
        category_set = frozenset(categories) if categories is not None else None
        source_set = frozenset(sources) if sources is not None else None
        with self._lock:
            out = []
            for record_id in self._by_user.get(user_id, ()):
                record = self._records[record_id]
                if record.erased:
                    continue
                if category_set is not None and record.category not in category_set:
                    continue
                if source_set is not None and record.source not in source_set:
                    continue
                out.append(record)
        return sorted(out, key=lambda r: (r.category, r.record_id))

    def rectify(self, record_id: str, new_payload: bytes) -> int:
        """Replace a record's payload; returns the incremented version."""
        if not new_payload:
            raise EmptyPayloadError("rectified payload must be nonempty")
        with self._lock:
            record = self.get_record(record_id)
            if record.erased:
                raise AlreadyErasedError(record_id)
            updated = replace(
                record, payload=bytes(new_payload), version=record.version + 1
            )
            self._records[record_id] = updated
            self._digest_cache.pop(record.user_id, None)
            self._save()
        self._audit.append(
            AuditOrigin.SUBJECT_RIGHT,
            user_id=record.user_id,
            data_version=self.data_version(record.user_id),
            detail=f"rectify record={record_id} version={updated.version}",
        )
        return updated.version

    def erase(
        self,
        user_id: str,
        categories: Optional[Iterable[str]] = None,
        sources: Optional[Iterable[SourceKind]] = None,
    ) -> int:
        """Tombstone matching live records; payloads are destroyed, ids and
        provenance retained.  Returns the number of records erased."""
        with self._lock:
            matching = self.get_records(user_id, categories, sources)
            for record in matching:
                self._records[record.record_id] = replace(
                    record, payload=b"", erased=True
                )
            if matching:
                self._digest_cache.pop(user_id, None)
            count = len(matching)
            self._save()
        self._audit.append(
            AuditOrigin.SUBJECT_RIGHT,
            user_id=user_id,
            data_version=self.data_version(user_id),
            detail=f"erase count={count}",
        )
        for hook in self._erase_hooks:
            hook(user_id)
        return count

    def data_version(self, user_id: str) -> str:
        """Digest over the user's live (record id, version) pairs."""
        with self._lock:
            cached = self._digest_cache.get(user_id)
            if cached is not None:
                return cached
            pairs = []
            for record_id in self._by_user.get(user_id, ()):
                record = self._records[record_id]
                if not record.erased:
                    pairs.append([record.record_id, record.version])
            digest = content_digest(sorted(pairs))
            self._digest_cache[user_id] = digest
            return digest
