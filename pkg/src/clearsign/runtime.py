"""Composition root wiring the registry and the four stateful stores.

One shared reentrant lock serializes cross-store operations, so enforcement
always observes a consistent (grants, data) state and audit appends stay
totally ordered.
"""

from __future__ import annotations

import threading
from datetime import timedelta
from pathlib import Path
from typing import Any, Optional

from .audit import AuditLog
from .consent import DEFAULT_SNAPSHOT_RETENTION, ConsentStore
from .enforcer import Enforcer
from .records import RecordStore
from .registry import Registry, install_system_document
from .signs import SystemSigns
from .subject_access import SubjectAccessService


class SystemRuntime:
    """A fully wired single-system deployment of the transparency scheme."""

    def __init__(
        self,
        registry: Optional[Registry] = None,
        data_dir: Optional[str | Path] = None,
        snapshot_retention: timedelta = DEFAULT_SNAPSHOT_RETENTION,
    ):
        self.lock = threading.RLock()
        self.registry = registry or Registry()
        base = Path(data_dir) if data_dir else None
        if base:
            base.mkdir(parents=True, exist_ok=True)

        def _p(name: str) -> Optional[Path]:
            return base / name if base else None

        self.audit = AuditLog(_p("audit.jsonl"), lock=self.lock)
        self.records = RecordStore(
            self.registry, self.audit, path=_p("records.json"), lock=self.lock
        )
        self.consent = ConsentStore(
            self.registry,
            self.audit,
            path=_p("consents.json"),
            snapshot_retention=snapshot_retention,
            lock=self.lock,
        )
        self.enforcer = Enforcer(
            self.registry, self.consent, self.records, self.audit, lock=self.lock
        )
        self.subject_access = SubjectAccessService(
            self.registry,
            self.records,
            self.consent,
            self.audit,
            complaints_path=_p("complaints.json"),
            lock=self.lock,
        )
        self._system_id: Optional[str] = None

    @property
    def system_id(self) -> str:
        if self._system_id is None:
            ids = self.registry.system_ids()
            if not ids:
                raise RuntimeError("no system installed")
            self._system_id = ids[0]
        return self._system_id

    def install_document(self, doc: dict[str, Any]) -> str:
        system_id = install_system_document(self.registry, doc)
        self._system_id = system_id
        return system_id

    def system_signs(self) -> SystemSigns:
        return self.registry.system_signs(self.system_id)
