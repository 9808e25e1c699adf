"""The consent grants database.

Only explicitly granted consents are stored; everything else is denied by
default.  Grants pin the service descriptor digest current at grant time, so
any change of conditions silently withdraws permission until the user grants
again.  Periodic immutable snapshots keep the history auditable for a
bounded window.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Any, Iterable, Optional

from .audit import AuditLog, AuditOrigin
from .model import TransparencyError, canonical_json_bytes, content_digest
from .registry import Registry, UnknownServiceError

DEFAULT_SNAPSHOT_RETENTION = timedelta(days=90)


class CategoryNotDeclaredError(TransparencyError):
    def __init__(self, service_id: str, categories: Iterable[str]):
        self.service_id = service_id
        self.categories = sorted(categories)
        super().__init__(
            f"service {service_id!r} does not declare categories: {self.categories}"
        )


@dataclass(frozen=True)
class ConsentGrant:
    user_id: str
    service_id: str
    service_version: str
    purpose: str
    data_categories: frozenset[str]
    granted_at: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "user_id": self.user_id,
            "service_id": self.service_id,
            "service_version": self.service_version,
            "purpose": self.purpose,
            "data_categories": sorted(self.data_categories),
            "granted_at": self.granted_at,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ConsentGrant":
        return cls(
            user_id=data["user_id"],
            service_id=data["service_id"],
            service_version=data["service_version"],
            purpose=data["purpose"],
            data_categories=frozenset(data["data_categories"]),
            granted_at=data["granted_at"],
        )


@dataclass(frozen=True)
class RevocationReceipt:
    user_id: str
    service_id: str
    revoked_at: str
    already_absent: bool


@dataclass(frozen=True)
class ConsentSnapshot:
    snapshot_id: str
    taken_at: str
    expires_at: str
    grants: tuple[ConsentGrant, ...]

    def content_digest(self) -> str:
        return content_digest(
            {
                "snapshot_id": self.snapshot_id,
                "taken_at": self.taken_at,
                "expires_at": self.expires_at,
                "grants": [g.to_dict() for g in self.grants],
            }
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "snapshot_id": self.snapshot_id,
            "taken_at": self.taken_at,
            "expires_at": self.expires_at,
            "grants": [g.to_dict() for g in self.grants],
        }


def _utcnow() -> datetime:
    return datetime.now(timezone.utc)


def _parse_ts(value: str) -> datetime:
    return datetime.fromisoformat(value)


class ConsentStore:
    """Live grants plus immutable snapshots; default deny for everything else."""

    def __init__(
        self,
        registry: Registry,
        audit: AuditLog,
        path: Optional[str | Path] = None,
        snapshot_retention: timedelta = DEFAULT_SNAPSHOT_RETENTION,
        lock: Optional[threading.RLock] = None,
    ):
        self._registry = registry
        self._audit = audit
        self._lock = lock or threading.RLock()
        self._retention = snapshot_retention
        self._grants: dict[tuple[str, str], ConsentGrant] = {}
        self._snapshots: list[ConsentSnapshot] = []
        self._snapshot_counter = 0
        self._marker_cache: Optional[str] = None
        self._path = Path(path) if path else None
        if self._path and self._path.exists():
            self._load()

    # -- persistence ----------------------------------------------------------

    def _load(self) -> None:
        import json

        data = json.loads(self._path.read_text(encoding="utf-8"))
        for raw in data.get("grants", ()):
            grant = ConsentGrant.from_dict(raw)
            self._grants[(grant.user_id, grant.service_id)] = grant
        for raw in data.get("snapshots", ()):
            self._snapshots.append(
                ConsentSnapshot(
                    snapshot_id=raw["snapshot_id"],
                    taken_at=raw["taken_at"],
                    expires_at=raw["expires_at"],
                    grants=tuple(ConsentGrant.from_dict(g) for g in raw["grants"]),
                )
            )
        self._snapshot_counter = int(data.get("snapshot_counter", len(self._snapshots)))

    def _save(self) -> None:
        if not self._path:
            return
        doc = {
            "snapshot_counter": self._snapshot_counter,
            "grants": [g.to_dict() for g in self.live_grants()],
            "snapshots": [s.to_dict() for s in self._snapshots],
        }
        tmp = self._path.with_suffix(".tmp")
        tmp.write_bytes(canonical_json_bytes(doc))
        tmp.replace(self._path)

    # -- grants ------------------------------------------------------------------

    def grant(
        self,
        user_id: str,
        service_id: str,
        categories: Iterable[str],
        at: Optional[str] = None,
    ) -> ConsentGrant:
        """Store an explicit grant pinned to the service's current version.

        Repeating an identical, still-current grant returns the stored record
        unchanged; consent does not need to be given twice for the same
        service under the same conditions.
        """
        _, descriptor = self._registry.find_service(service_id)
        categories = frozenset(categories)
        undeclared = categories - descriptor.data_categories
        if undeclared:
            raise CategoryNotDeclaredError(service_id, undeclared)
        current_version = descriptor.content_digest()

        with self._lock:
            existing = self._grants.get((user_id, service_id))
            if (
                existing is not None
                and existing.data_categories == categories
                and existing.service_version == current_version
            ):
                grant, detail = existing, "grant (already granted)"
            else:
                grant = ConsentGrant(
                    user_id=user_id,
                    service_id=service_id,
                    service_version=current_version,
                    purpose=descriptor.purpose,
                    data_categories=categories,
                    granted_at=at or _utcnow().isoformat(),
                )
                self._grants[(user_id, service_id)] = grant
                self._marker_cache = None
                detail = f"grant categories={sorted(categories)}"
                self._save()

        self._audit.append(
            AuditOrigin.CONSENT_CHANGE,
            user_id=user_id,
            service_version=current_version,
            detail=f"{detail} service={service_id}",
        )
        return grant

    def revoke(self, user_id: str, service_id: str, at: Optional[str] = None) -> RevocationReceipt:
        """Remove a live grant; prior snapshots are untouched.  Revoking a
        grant that does not exist is a recorded no-op."""
        with self._lock:
            existing = self._grants.pop((user_id, service_id), None)
            if existing is not None:
                self._marker_cache = None
                self._save()
            receipt = RevocationReceipt(
                user_id=user_id,
                service_id=service_id,
                revoked_at=at or _utcnow().isoformat(),
                already_absent=existing is None,
            )
        self._audit.append(
            AuditOrigin.CONSENT_CHANGE,
            user_id=user_id,
            service_version=existing.service_version if existing else "",
            detail=(
                f"revoke service={service_id}"
                + (" (already absent)" if receipt.already_absent else "")
            ),
        )
        return receipt

    def grant_for(self, user_id: str, service_id: str) -> Optional[ConsentGrant]:
        return self._grants.get((user_id, service_id))

    def live_grants(self) -> list[ConsentGrant]:
        with self._lock:
            return sorted(
                self._grants.values(), key=lambda g: (g.user_id, g.service_id)
            )

    def grants_of(self, user_id: str) -> list[ConsentGrant]:
        return [g for g in self.live_grants() if g.user_id == user_id]

    def export_grants(self) -> bytes:
        """The live grant set as a canonical JSON document."""
        return canonical_json_bytes({"grants": [g.to_dict() for g in self.live_grants()]})

    def state_marker(self) -> str:
        """Digest identifying the current live-grant state; equal states
        produce equal markers."""
        with self._lock:
            if self._marker_cache is None:
                self._marker_cache = content_digest(
                    [g.to_dict() for g in self.live_grants()]
                )
            return self._marker_cache

    # -- permission queries --------------------------------------------------------

    def is_permitted(
        self, user_id: str, service_id: str, category: str, purpose: str
    ) -> bool:
        """Default deny: true only for a live, version-current grant covering
        the category, with the service's declared purpose.  Unknown ids are
        denials, never errors."""
        grant = self._grants.get((user_id, service_id))
        if grant is None:
            return False
        if category not in grant.data_categories:
            return False
        try:
            _, descriptor = self._registry.find_service(service_id)
        except (UnknownServiceError, TransparencyError):
            return False
        if descriptor.purpose != purpose:
            return False
        return grant.service_version == descriptor.content_digest()

    def pending_consents(self, user_id: str, system_id: str) -> list[str]:
        """Data-using services that need a (re)prompt: no live grant, or a
        grant pinned to a superseded descriptor version."""
        pending = []
        for descriptor in self._registry.system_services(system_id):
            if not descriptor.data_categories:
                continue
            grant = self._grants.get((user_id, descriptor.id))
            if grant is None or grant.service_version != descriptor.content_digest():
                pending.append(descriptor.id)
        return sorted(pending)

    # -- snapshots ---------------------------------------------------------------

    def snapshot(self, at: Optional[str] = None) -> ConsentSnapshot:
        """Atomically capture all live grants into an immutable snapshot."""
        with self._lock:
            taken_at = _parse_ts(at) if at else _utcnow()
            self._snapshot_counter += 1
            snap = ConsentSnapshot(
                snapshot_id=f"snap-{self._snapshot_counter:06d}",
                taken_at=taken_at.isoformat(),
                expires_at=(taken_at + self._retention).isoformat(),
                grants=tuple(self.live_grants()),
            )
            self._snapshots.append(snap)
            self._save()
            return snap

    def snapshots(self) -> list[ConsentSnapshot]:
        with self._lock:
            return list(self._snapshots)

    def prune(self, now: Optional[str] = None) -> int:
        """Drop snapshots past their expiry; live grants are never pruned."""
        with self._lock:
            cutoff = _parse_ts(now) if now else _utcnow()
            keep = [s for s in self._snapshots if _parse_ts(s.expires_at) > cutoff]
            removed = len(self._snapshots) - len(keep)
            self._snapshots = keep
            if removed:
                self._save()
            return removed
