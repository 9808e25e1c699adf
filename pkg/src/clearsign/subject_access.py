"""Subject access: synchronous export, erasure, rectification, and complaint
recording behind the dashboard.

Requests complete synchronously; the disclosure package reflects one
consistent snapshot and never contains erased payloads.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterable, Optional

from .audit import AuditLog, AuditOrigin
from .consent import ConsentStore
from .model import TransparencyError, canonical_json_bytes
from .records import RecordNotFoundError, RecordStore, SourceKind
from .registry import Registry

TRACE_REFERENCE = "/my-data/trace"


class EmptyTextError(TransparencyError):
    pass


@dataclass(frozen=True)
class Complaint:
    receipt_id: str
    user_id: str
    text: str
    filed_at: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "receipt_id": self.receipt_id,
            "user_id": self.user_id,
            "text": self.text,
            "filed_at": self.filed_at,
        }


@dataclass(frozen=True)
class DataPackage:
    """Everything the system holds on one user, as a single document."""

    user_id: str
    generated_at: str
    records: tuple[dict[str, Any], ...]
    grants: tuple[dict[str, Any], ...]
    complaints: tuple[dict[str, Any], ...]
    trace_reference: str = TRACE_REFERENCE

    def to_dict(self) -> dict[str, Any]:
        return {
            "user_id": self.user_id,
            "generated_at": self.generated_at,
            "records": list(self.records),
            "grants": list(self.grants),
            "complaints": list(self.complaints),
            "trace_reference": self.trace_reference,
        }

    def to_bytes(self) -> bytes:
        return canonical_json_bytes(self.to_dict())


def _utcnow_iso() -> str:
    return datetime.now(timezone.utc).isoformat()


class SubjectAccessService:
    """Implements the dashboard rights over the data and consent stores."""

    def __init__(
        self,
        registry: Registry,
        records: RecordStore,
        consent: ConsentStore,
        audit: AuditLog,
        complaints_path: Optional[str | Path] = None,
        lock: Optional[threading.RLock] = None,
    ):
        self._registry = registry
        self._records = records
        self._consent = consent
        self._audit = audit
        self._lock = lock or threading.RLock()
        self._complaints: list[Complaint] = []
        self._complaint_counter = 0
        self._path = Path(complaints_path) if complaints_path else None
        if self._path and self._path.exists():
            self._load()

    def _load(self) -> None:
        import json

        data = json.loads(self._path.read_text(encoding="utf-8"))
        for raw in data.get("complaints", ()):
            self._complaints.append(Complaint(**raw))
        self._complaint_counter = int(data.get("counter", len(self._complaints)))

    def _save(self) -> None:
        if not self._path:
            return
        doc = {
            "counter": self._complaint_counter,
            "complaints": [c.to_dict() for c in self._complaints],
        }
        tmp = self._path.with_suffix(".tmp")
        tmp.write_bytes(canonical_json_bytes(doc))
        tmp.replace(self._path)

    def _categories_for_purposes(self, purposes: Iterable[str]) -> frozenset[str]:
        """Categories requested by any service declaring one of the purposes."""
        wanted = frozenset(purposes)
        categories: set[str] = set()
        for system_id in self._registry.system_ids():
            for descriptor in self._registry.system_services(system_id):
                if descriptor.purpose in wanted:
                    categories.update(descriptor.data_categories)
        return frozenset(categories)

    # -- operations ---------------------------------------------------------------

    def browse(
        self,
        user_id: str,
        categories: Optional[Iterable[str]] = None,
        sources: Optional[Iterable[SourceKind]] = None,
    ):
        """Dashboard browsing of the user's own live records; read-only and
        unaudited (exports, erasures, and rectifications are the audited
        subject-right operations)."""
        return self._records.get_records(user_id, categories=categories, sources=sources)

    def export_all(
        self,
        user_id: str,
        categories: Optional[Iterable[str]] = None,
        purposes: Optional[Iterable[str]] = None,
        sources: Optional[Iterable[SourceKind]] = None,
    ) -> DataPackage:
        """Synchronous disclosure package over a consistent snapshot.

        The purpose filter selects the categories requested by services with
        those purposes; category and source filters apply directly.
        """
        with self._lock:
            category_filter = frozenset(categories) if categories is not None else None
            if purposes is not None:
                purpose_categories = self._categories_for_purposes(purposes)
                if category_filter is None:
                    category_filter = purpose_categories
                else:
                    category_filter &= purpose_categories
            selected = self._records.get_records(
                user_id, categories=category_filter, sources=sources
            )
            package = DataPackage(
                user_id=user_id,
                generated_at=_utcnow_iso(),
                records=tuple(r.to_dict() for r in selected),
                grants=tuple(g.to_dict() for g in self._consent.grants_of(user_id)),
                complaints=tuple(
                    c.to_dict() for c in self._complaints if c.user_id == user_id
                ),
            )
        self._audit.append(
            AuditOrigin.SUBJECT_RIGHT,
            user_id=user_id,
            data_version=self._records.data_version(user_id),
            detail=f"export records={len(package.records)}",
        )
        return package

    def request_erasure(
        self,
        user_id: str,
        categories: Optional[Iterable[str]] = None,
        sources: Optional[Iterable[SourceKind]] = None,
    ) -> int:
        """Erase matching records; the store tombstones them, invalidates the
        user's views, and appends the audit record."""
        return self._records.erase(user_id, categories=categories, sources=sources)

    def request_rectification(
        self, user_id: str, record_id: str, payload: bytes
    ) -> int:
        """Rectify one of the user's own records; audited by the store."""
        record = self._records.get_record(record_id)
        if record.user_id != user_id:
            raise RecordNotFoundError(record_id)
        return self._records.rectify(record_id, payload)

    def file_complaint(self, user_id: str, text: str) -> str:
        """Record a complaint destined for a supervisory authority.  Stored
        immutably and included in export packages; never transmitted."""
        if not text or not text.strip():
            raise EmptyTextError("complaint text must be nonempty")
        with self._lock:
            self._complaint_counter += 1
            complaint = Complaint(
                receipt_id=f"c-{self._complaint_counter:06d}",
                user_id=user_id,
                text=text,
                filed_at=_utcnow_iso(),
            )
            self._complaints.append(complaint)
            self._save()
        self._audit.append(
            AuditOrigin.SUBJECT_RIGHT,
            user_id=user_id,
            detail=f"complaint {complaint.receipt_id}",
        )
        return complaint.receipt_id

    def complaints_of(self, user_id: str) -> list[Complaint]:
        return [c for c in self._complaints if c.user_id == user_id]
