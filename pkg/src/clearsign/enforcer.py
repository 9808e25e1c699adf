"""The consent enforcer: builds formal filters from grants, materializes
consent-compliant views of personal data, and audits every operation.

Services never touch raw personal data; the trust boundary is the
materialized view.  Each enforcement operation evaluates against a single
consistent (grants, data) state and appends exactly one audit record.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Iterable, Optional, Union

from .audit import AuditLog, AuditOrigin
from .consent import ConsentStore
from .model import TransparencyError, content_digest
from .records import PersonalDataRecord, RecordStore
from .registry import Registry


class StorageFailureError(TransparencyError):
    """Record selection failed; no view was created."""


class ViewNotFoundError(TransparencyError):
    def __init__(self, view_id: str):
        self.view_id = view_id
        super().__init__(f"no such view: {view_id!r}")


@dataclass(frozen=True)
class FilterPredicate:
    """The formal filter derived from the consent state for one (user,
    service) pair: exactly the categories currently permitted."""

    user_id: str
    service_id: str
    service_version: str
    purpose: str
    allowed_categories: frozenset[str]
    consent_marker: str


def describe_filter(f: FilterPredicate) -> str:
    """Deterministic one-line form of a filter; equal filters produce equal
    strings.  This exact format is stored in audit records."""
    categories = ",".join(sorted(f.allowed_categories))
    return (
        f"user={f.user_id} service={f.service_id}@{f.service_version} "
        f"purpose={f.purpose} allow={{{categories}}} consent={f.consent_marker}"
    )


@dataclass(frozen=True)
class FilteredView:
    """An immutable, consent-compliant subset of one user's personal data.

    Views are superseded, never mutated; erasure invalidates them in the
    enforcer's view registry without touching their contents.
    """

    view_id: str
    user_id: str
    service_id: str
    records: tuple[PersonalDataRecord, ...]
    data_version: str
    filter_description: str
    created_at: str

    def record_set_digest(self) -> str:
        return content_digest([r.to_dict() for r in self.records])

    def to_dict(self) -> dict:
        return {
            "view_id": self.view_id,
            "user_id": self.user_id,
            "service_id": self.service_id,
            "records": [r.to_dict() for r in self.records],
            "data_version": self.data_version,
            "filter_description": self.filter_description,
            "created_at": self.created_at,
            "record_set_digest": self.record_set_digest(),
        }


@dataclass(frozen=True)
class Denial:
    """A refused access request: a normal, auditable outcome, not an error."""

    user_id: str
    service_id: str
    requested_categories: tuple[str, ...]
    missing_categories: tuple[str, ...]
    at: str

    def to_dict(self) -> dict:
        return {
            "denied": True,
            "user_id": self.user_id,
            "service_id": self.service_id,
            "requested_categories": list(self.requested_categories),
            "missing_categories": list(self.missing_categories),
            "at": self.at,
        }


def _utcnow_iso() -> str:
    return datetime.now(timezone.utc).isoformat()


class Enforcer:
    """Derives filters, materializes views, and owns the view registry."""

    def __init__(
        self,
        registry: Registry,
        consent: ConsentStore,
        records: RecordStore,
        audit: AuditLog,
        lock: Optional[threading.RLock] = None,
    ):
        self._registry = registry
        self._consent = consent
        self._records = records
        self._audit = audit
        self._lock = lock or threading.RLock()
        self._views: dict[str, FilteredView] = {}
        self._invalidated: set[str] = set()
        records.on_erase(self.invalidate_user_views)

    # -- filters -----------------------------------------------------------------

    def build_filter(self, user_id: str, service_id: str) -> FilterPredicate:
        """Compute the allowed category set via per-category permission checks;
        deterministic given the consent store state."""
        _, descriptor = self._registry.find_service(service_id)
        allowed = frozenset(
            category
            for category in descriptor.data_categories
            if self._consent.is_permitted(
                user_id, service_id, category, descriptor.purpose
            )
        )
        return FilterPredicate(
            user_id=user_id,
            service_id=service_id,
            service_version=descriptor.content_digest(),
            purpose=descriptor.purpose,
            allowed_categories=allowed,
            consent_marker=self._consent.state_marker(),
        )

    # -- views ---------------------------------------------------------------------

    def _materialize(
        self,
        user_id: str,
        service_id: str,
        selection: Optional[frozenset[str]],
        origin: AuditOrigin,
        detail: str,
    ) -> FilteredView:
        """Build the view for ``selection`` (None means the filter's full
        allowed set) and append exactly one audit record before returning."""
        with self._lock:
            filter_ = self.build_filter(user_id, service_id)
            categories = filter_.allowed_categories if selection is None else selection
            description = describe_filter(filter_)
            try:
                if categories:
                    selected = tuple(
                        self._records.get_records(user_id, categories=categories)
                    )
                else:
                    selected = ()
                data_version = self._records.data_version(user_id)
            except Exception as exc:
                self._audit.append(
                    AuditOrigin.ENFORCEMENT_ERROR,
                    user_id=user_id,
                    filter_description=description,
                    service_version=filter_.service_version,
                    detail=f"storage failure: {exc}",
                )
                raise StorageFailureError(str(exc)) from exc

            view = FilteredView(
                view_id=uuid.uuid4().hex,
                user_id=user_id,
                service_id=service_id,
                records=selected,
                data_version=data_version,
                filter_description=description,
                created_at=_utcnow_iso(),
            )
            self._views[view.view_id] = view
            self._audit.append(
                origin,
                user_id=user_id,
                data_version=data_version,
                filter_description=description,
                service_version=filter_.service_version,
                detail=detail,
            )
            return view

    def materialize_view(
        self,
        user_id: str,
        service_id: str,
        origin: AuditOrigin = AuditOrigin.SERVICE_EXECUTION,
    ) -> FilteredView:
        """Materialize the full consent-compliant view for a service run.

        An empty allowed set still produces an (empty) view and an audit
        record: every usage instance is recorded, including vacuous ones.
        Third-party deliveries pass origin=THIRD_PARTY_SHARE.
        """
        return self._materialize(
            user_id, service_id, None, origin, f"materialize view service={service_id}"
        )

    def enforce_access(
        self,
        user_id: str,
        service_id: str,
        requested_categories: Iterable[str],
        origin: AuditOrigin = AuditOrigin.SERVICE_EXECUTION,
    ) -> Union[FilteredView, Denial]:
        """Serve the requested categories if fully covered by consent,
        otherwise deny naming the missing ones.  Both outcomes are audited."""
        requested = frozenset(requested_categories)
        with self._lock:
            filter_ = self.build_filter(user_id, service_id)
            missing = requested - filter_.allowed_categories
            if missing:
                denial = Denial(
                    user_id=user_id,
                    service_id=service_id,
                    requested_categories=tuple(sorted(requested)),
                    missing_categories=tuple(sorted(missing)),
                    at=_utcnow_iso(),
                )
                self._audit.append(
                    origin,
                    user_id=user_id,
                    data_version=self._records.data_version(user_id),
                    filter_description=describe_filter(filter_),
                    service_version=filter_.service_version,
                    detail=f"denied missing={sorted(missing)}",
                )
                return denial
            return self._materialize(
                user_id,
                service_id,
                requested,
                origin,
                f"access service={service_id} requested={sorted(requested)}",
            )

    # -- view registry -----------------------------------------------------------------

    def get_view(self, view_id: str) -> tuple[FilteredView, bool]:
        """Return (view, invalidated).  Invalidated views keep their contents
        but must no longer be served."""
        view = self._views.get(view_id)
        if view is None:
            raise ViewNotFoundError(view_id)
        return view, view_id in self._invalidated

    def invalidate_user_views(self, user_id: str) -> None:
        with self._lock:
            for view_id, view in self._views.items():
                if view.user_id == user_id:
                    self._invalidated.add(view_id)

    def views_of(self, user_id: str) -> list[FilteredView]:
        with self._lock:
            return [v for v in self._views.values() if v.user_id == user_id]
