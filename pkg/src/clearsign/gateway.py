"""HTTP gateway: transparency headers on every response, the first-contact
consent gate, factsheet/sign/artifact endpoints, and the dashboard API.

Authentication is a bearer token checked by a pluggable verifier; the
default verifier treats the token itself as the user id, suitable for
development and tests.  Token issuance is out of scope.
"""

from __future__ import annotations

import base64
import json
import os
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional

from fastapi import FastAPI, Header, HTTPException, Request
from fastapi.responses import FileResponse, JSONResponse, RedirectResponse, Response

from .audit import AuditOrigin
from .consent import CategoryNotDeclaredError
from .enforcer import Denial, ViewNotFoundError
from .model import ArtifactKind, TransparencyError
from .records import (
    AlreadyErasedError,
    EmptyPayloadError,
    RecordNotFoundError,
    SourceKind,
    UnknownCategoryError,
)
from .registry import UnknownServiceError, UnknownSystemError
from .runtime import SystemRuntime
from .signs import encode_sign_headers
from .subject_access import EmptyTextError

ENV_PREFIX = "CLEARSIGN_"

TokenVerifier = Callable[[str], Optional[str]]


def identity_verifier(token: str) -> Optional[str]:
    """Development verifier: the bearer token is the user id."""
    return token or None


@dataclass
class GatewayConfig:
    listen_host: str = "127.0.0.1"
    listen_port: int = 8400
    descriptor_path: Optional[str] = None
    data_dir: Optional[str] = None
    seed_path: Optional[str] = None
    snapshot_cadence_hours: float = 24.0
    snapshot_retention_days: float = 90.0
    # services allowed to fall back to a reduced view instead of refusing
    # when some requested category is denied
    degraded_services: list[str] = field(default_factory=list)
    # built dashboard directory; mounted at /ui when set
    ui_dir: Optional[str] = None

    @classmethod
    def load(
        cls,
        path: Optional[str | Path] = None,
        env: Optional[dict[str, str]] = None,
    ) -> "GatewayConfig":
        """Read the config file (JSON), then apply CLEARSIGN_* overrides."""
        env = os.environ if env is None else env
        raw: dict[str, Any] = {}
        if path:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        config = cls(**{k: v for k, v in raw.items() if k in cls.__dataclass_fields__})

        def override(name: str, cast):
            value = env.get(ENV_PREFIX + name.upper())
            if value is not None:
                setattr(config, name, cast(value))

        override("listen_host", str)
        override("listen_port", int)
        override("descriptor_path", str)
        override("data_dir", str)
        override("seed_path", str)
        override("snapshot_cadence_hours", float)
        override("snapshot_retention_days", float)
        override("degraded_services", lambda v: [s for s in v.split(",") if s])
        override("ui_dir", str)
        return config


def load_seed_data(runtime: SystemRuntime, doc: dict[str, Any]) -> int:
    """Load demo personal-data records from a seed document."""
    count = 0
    for raw in doc.get("records", ()):
        payload = (
            base64.b64decode(raw["payload_b64"])
            if "payload_b64" in raw
            else raw["payload_text"].encode("utf-8")
        )
        runtime.records.put_record(
            raw["user_id"],
            raw["category"],
            payload,
            source=SourceKind(raw.get("source", "user_direct")),
            provenance=raw.get("provenance", ""),
        )
        count += 1
    return count


class SnapshotScheduler:
    """Periodic consent snapshots plus expiry pruning on a daemon thread."""

    def __init__(self, runtime: SystemRuntime, cadence_hours: float):
        self._runtime = runtime
        self._interval = cadence_hours * 3600.0
        self._stop = threading.Event()
        self._thread: Optional[threading.Thread] = None

    def _run(self) -> None:
        while not self._stop.wait(self._interval):
            self._runtime.consent.snapshot()
            self._runtime.consent.prune()

    def start(self) -> None:
        self._thread = threading.Thread(target=self._run, daemon=True)
        self._thread.start()

    def stop(self) -> None:
        self._stop.set()


_ERROR_STATUS: list[tuple[type, int]] = [
    (CategoryNotDeclaredError, 400),
    (UnknownCategoryError, 400),
    (EmptyPayloadError, 400),
    (EmptyTextError, 400),
    (UnknownServiceError, 404),
    (UnknownSystemError, 404),
    (RecordNotFoundError, 404),
    (ViewNotFoundError, 404),
    (AlreadyErasedError, 409),
]


def _status_for(exc: TransparencyError) -> int:
    for exc_type, status in _ERROR_STATUS:
        if isinstance(exc, exc_type):
            return status
    return 500


def create_app(
    runtime: SystemRuntime,
    config: Optional[GatewayConfig] = None,
    token_verifier: TokenVerifier = identity_verifier,
) -> FastAPI:
    config = config or GatewayConfig()
    app = FastAPI(title="clearsign gateway", version="0.1.0")
    degraded = set(config.degraded_services)

    # -- cross-cutting -------------------------------------------------------

    @app.middleware("http")
    async def transparency_headers(request: Request, call_next):
        response = await call_next(request)
        for name, value in encode_sign_headers(runtime.system_signs()):
            response.headers[name] = value
        return response

    @app.exception_handler(TransparencyError)
    async def transparency_error_handler(request: Request, exc: TransparencyError):
        return JSONResponse(
            status_code=_status_for(exc),
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    def current_user(authorization: Optional[str]) -> str:
        if not authorization or not authorization.startswith("Bearer "):
            raise HTTPException(status_code=401, detail="bearer token required")
        user_id = token_verifier(authorization[len("Bearer ") :].strip())
        if user_id is None:
            raise HTTPException(status_code=401, detail="invalid token")
        return user_id

    # -- transparency (unauthenticated-readable) -----------------------------

    @app.get("/health")
    def health() -> dict[str, str]:
        return {"status": "ok"}

    @app.get("/signs")
    def signs() -> dict[str, Any]:
        system_signs = runtime.system_signs()
        return {
            "system_id": runtime.system_id,
            "system_version": runtime.registry.system_version(runtime.system_id),
            **system_signs.as_dict(),
            "headers": dict(encode_sign_headers(system_signs)),
        }

    @app.get("/factsheets/privacy")
    def privacy_factsheet() -> dict[str, Any]:
        system_id = runtime.system_id
        rows = runtime.registry.build_privacy_factsheet(system_id)
        return {
            "system_id": system_id,
            "system_version": runtime.registry.system_version(system_id),
            "rows": [row.to_dict() for row in rows],
            "bundles": [b.to_dict() for b in runtime.registry.bundles(system_id)],
            "vocabulary": runtime.registry.factsheet_vocabulary(system_id),
        }

    @app.get("/factsheets/transparency")
    def transparency_factsheet() -> dict[str, Any]:
        system_id = runtime.system_id
        rows = runtime.registry.build_transparency_factsheet(system_id)
        return {
            "system_id": system_id,
            "system_version": runtime.registry.system_version(system_id),
            "rows": [row.to_dict() for row in rows],
            "aggregate": runtime.system_signs().as_dict(),
            "vocabulary": runtime.registry.factsheet_vocabulary(system_id),
        }

    @app.get("/services/{service_id}/artifacts/{kind}")
    def artifact(service_id: str, kind: str):
        _, descriptor = runtime.registry.find_service(service_id)
        try:
            artifact_kind = ArtifactKind(kind)
        except ValueError:
            raise HTTPException(status_code=404, detail=f"unknown artifact kind: {kind}")
        if not descriptor.claims_artifact(artifact_kind):
            raise HTTPException(
                status_code=404,
                detail=f"service {service_id!r} does not claim {kind} availability",
            )
        locator = descriptor.artifact_locator(artifact_kind)
        if locator is None:
            raise HTTPException(
                status_code=404,
                detail=f"service {service_id!r} declares no {kind} location",
            )
        if locator.startswith(("http://", "https://")):
            return RedirectResponse(locator, status_code=307)
        path = Path(locator)
        if not path.is_file():
            raise HTTPException(status_code=502, detail=f"artifact locator unreachable: {locator}")
        return FileResponse(path)

    # -- consent gate and data access -----------------------------------------

    def _consent_gate_response(pending: list[str]) -> JSONResponse:
        return JSONResponse(
            status_code=428,
            content={
                "consent_required": True,
                "pending": pending,
                "factsheet": "/factsheets/privacy",
            },
        )

    @app.post("/services/{service_id}/access")
    def access_service(
        service_id: str,
        body: Optional[dict[str, Any]] = None,
        authorization: Optional[str] = Header(None),
    ):
        """The consent gate: first contact with a data-using service yields
        428 and no data access until an explicit grant exists."""
        user_id = current_user(authorization)
        runtime.registry.find_service(service_id)
        pending = runtime.consent.pending_consents(user_id, runtime.system_id)
        if service_id in pending:
            return _consent_gate_response(pending)

        requested = (body or {}).get("categories")
        if requested is None:
            view = runtime.enforcer.materialize_view(user_id, service_id)
            return view.to_dict()
        outcome = runtime.enforcer.enforce_access(user_id, service_id, requested)
        if isinstance(outcome, Denial):
            if service_id in degraded:
                grantable = set(requested) - set(outcome.missing_categories)
                fallback = runtime.enforcer.enforce_access(
                    user_id, service_id, grantable
                )
                return {
                    "degraded": True,
                    "missing_categories": list(outcome.missing_categories),
                    "view": fallback.to_dict(),
                }
            return JSONResponse(status_code=403, content=outcome.to_dict())
        return outcome.to_dict()

    @app.get("/views/{view_id}")
    def get_view(view_id: str, authorization: Optional[str] = Header(None)):
        user_id = current_user(authorization)
        view, invalidated = runtime.enforcer.get_view(view_id)
        if view.user_id != user_id:
            raise HTTPException(status_code=404, detail="no such view")
        if invalidated:
            return JSONResponse(
                status_code=410,
                content={"error": "ViewInvalidated", "view_id": view_id},
            )
        return view.to_dict()

    # -- consent endpoints -------------------------------------------------------

    @app.get("/consents")
    def list_consents(authorization: Optional[str] = Header(None)) -> dict[str, Any]:
        user_id = current_user(authorization)
        return {
            "grants": [g.to_dict() for g in runtime.consent.grants_of(user_id)],
            "pending": runtime.consent.pending_consents(user_id, runtime.system_id),
        }

    @app.post("/consents")
    def grant_consent(
        body: dict[str, Any], authorization: Optional[str] = Header(None)
    ) -> dict[str, Any]:
        user_id = current_user(authorization)
        service_id = body.get("service_id")
        if not service_id:
            raise HTTPException(status_code=400, detail="service_id required")
        grant = runtime.consent.grant(
            user_id, service_id, body.get("categories", [])
        )
        return {
            "grant": grant.to_dict(),
            "pending": runtime.consent.pending_consents(user_id, runtime.system_id),
        }

    @app.delete("/consents/{service_id}")
    def revoke_consent(
        service_id: str, authorization: Optional[str] = Header(None)
    ) -> dict[str, Any]:
        user_id = current_user(authorization)
        receipt = runtime.consent.revoke(user_id, service_id)
        return {
            "revoked": service_id,
            "already_absent": receipt.already_absent,
            "pending": runtime.consent.pending_consents(user_id, runtime.system_id),
        }

    # -- dashboard ------------------------------------------------------------------

    def _source_filter(sources: Optional[str]) -> Optional[set[SourceKind]]:
        if not sources:
            return None
        return {SourceKind(s) for s in sources.split(",") if s}

    @app.get("/my-data")
    def my_data(
        categories: Optional[str] = None,
        sources: Optional[str] = None,
        authorization: Optional[str] = Header(None),
    ) -> dict[str, Any]:
        user_id = current_user(authorization)
        category_filter = set(categories.split(",")) if categories else None
        records = runtime.subject_access.browse(
            user_id, categories=category_filter, sources=_source_filter(sources)
        )
        return {
            "user_id": user_id,
            "records": [r.to_dict() for r in records],
            "data_version": runtime.records.data_version(user_id),
        }

    @app.get("/my-data/export")
    def export_my_data(authorization: Optional[str] = Header(None)) -> Response:
        user_id = current_user(authorization)
        package = runtime.subject_access.export_all(user_id)
        return Response(
            content=package.to_bytes(),
            media_type="application/json",
            headers={
                "Content-Disposition": f'attachment; filename="{user_id}-data.json"'
            },
        )

    @app.post("/my-data/erasure")
    def erase_my_data(
        body: Optional[dict[str, Any]] = None,
        authorization: Optional[str] = Header(None),
    ) -> dict[str, Any]:
        user_id = current_user(authorization)
        body = body or {}
        sources = body.get("sources")
        count = runtime.subject_access.request_erasure(
            user_id,
            categories=body.get("categories"),
            sources={SourceKind(s) for s in sources} if sources else None,
        )
        return {"erased": count}

    @app.post("/my-data/rectification")
    def rectify_my_data(
        body: dict[str, Any], authorization: Optional[str] = Header(None)
    ) -> dict[str, Any]:
        user_id = current_user(authorization)
        payload = base64.b64decode(body["payload_b64"])
        version = runtime.subject_access.request_rectification(
            user_id, body["record_id"], payload
        )
        return {"record_id": body["record_id"], "version": version}

    @app.get("/my-data/trace")
    def my_trace(authorization: Optional[str] = Header(None)) -> dict[str, Any]:
        user_id = current_user(authorization)
        return runtime.audit.export_trace(user_id)

    @app.post("/complaints")
    def file_complaint(
        body: dict[str, Any], authorization: Optional[str] = Header(None)
    ) -> dict[str, Any]:
        user_id = current_user(authorization)
        receipt_id = runtime.subject_access.file_complaint(user_id, body.get("text", ""))
        return {"receipt_id": receipt_id}

    if config.ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=config.ui_dir, html=True), name="ui")

    return app


def build_runtime(config: GatewayConfig) -> SystemRuntime:
    """Construct and populate a runtime from config: descriptor document,
    optional persistence directory, optional seed data."""
    from datetime import timedelta

    runtime = SystemRuntime(
        data_dir=config.data_dir,
        snapshot_retention=timedelta(days=config.snapshot_retention_days),
    )
    if config.descriptor_path:
        doc = json.loads(Path(config.descriptor_path).read_text(encoding="utf-8"))
        runtime.install_document(doc)
    if config.seed_path:
        seed = json.loads(Path(config.seed_path).read_text(encoding="utf-8"))
        load_seed_data(runtime, seed)
    return runtime
