"""Registry of purposes, data categories, and service/system descriptors.

Stores descriptors immutably by content digest, detects changes of
conditions, and builds the two second-level factsheets.  Reads are
concurrent; registrations are serialized per registry instance.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Any, Optional

from .model import (
    AIServiceDescriptor,
    DataCategory,
    Purpose,
    PurposeCategory,
    SignTriplet,
    TransparencyError,
    VaguenessRegistry,
    Violation,
    canonical_json_bytes,
    content_digest,
    validate_service_descriptor,
)
from .signs import SystemSigns, aggregate_system_signs, derive_service_signs


class VaguePurposeError(TransparencyError):
    def __init__(self, purpose_id: str, label: str):
        self.purpose_id = purpose_id
        self.label = label
        super().__init__(f"purpose {purpose_id!r} has a vague label: {label!r}")


class DuplicateIdError(TransparencyError):
    def __init__(self, kind: str, dup_id: str):
        self.kind = kind
        self.dup_id = dup_id
        super().__init__(f"{kind} id already registered: {dup_id!r}")


class UnknownSystemError(TransparencyError):
    def __init__(self, system_id: str):
        self.system_id = system_id
        super().__init__(f"unknown system: {system_id!r}")


class UnknownServiceError(TransparencyError):
    def __init__(self, service_id: str):
        self.service_id = service_id
        super().__init__(f"unknown service: {service_id!r}")


class ValidationFailedError(TransparencyError):
    def __init__(self, service_id: str, violations: list[Violation]):
        self.service_id = service_id
        self.violations = violations
        rules = ", ".join(v.rule for v in violations)
        super().__init__(f"descriptor {service_id!r} failed validation: {rules}")


# Purposes preloaded into every registry: the aggregate consent categories
# plus the specific example services the scheme expects purposes to look like.
SEED_PURPOSES: tuple[Purpose, ...] = (
    Purpose(
        "device-access",
        "Store and/or access information on a device",
        PurposeCategory.DEVICE_ACCESS,
    ),
    Purpose("ad-selection", "Ad selection or evaluation", PurposeCategory.AD_SELECTION),
    Purpose(
        "content-service",
        "Content selection, creation and/or evaluation",
        PurposeCategory.CONTENT_SERVICE,
    ),
    Purpose("market-research", "Market research", PurposeCategory.MARKET_RESEARCH),
    Purpose("route-planning", "Route planning", PurposeCategory.CONTENT_SERVICE, True),
    Purpose(
        "product-recommendation",
        "Product recommendation",
        PurposeCategory.CONTENT_SERVICE,
        True,
    ),
    Purpose(
        "language-translation",
        "Language translation",
        PurposeCategory.CONTENT_SERVICE,
        True,
    ),
    Purpose("image-generation", "Image generation", PurposeCategory.CONTENT_SERVICE, True),
    Purpose(
        "conversational-agents",
        "Conversational agents",
        PurposeCategory.CONTENT_SERVICE,
        True,
    ),
)

SEED_CATEGORIES: tuple[DataCategory, ...] = (
    DataCategory("location", "location"),
    DataCategory("images", "images"),
    DataCategory("navigation", "navigation"),
    DataCategory("use-statistics", "use statistics"),
)


@dataclass(frozen=True)
class PrivacyFactsheetRow:
    """One data-requesting service, carrying the four disclosure answers:
    which data, for which purpose, for how long, and who has access."""

    service_id: str
    data_categories: tuple[str, ...]
    purpose: str
    retention: str
    accessors: tuple[dict[str, str], ...]
    default_granted: bool = False
    bundle_id: Optional[str] = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "service_id": self.service_id,
            "data_categories": list(self.data_categories),
            "purpose": self.purpose,
            "retention": self.retention,
            "accessors": [dict(a) for a in self.accessors],
            "default_granted": self.default_granted,
            "bundle_id": self.bundle_id,
        }


@dataclass(frozen=True)
class TransparencyFactsheetRow:
    """One AI service with its purpose, data needs, and freshly derived signs."""

    service_id: str
    purpose: str
    data_categories: tuple[str, ...]
    signs: SignTriplet
    artifact_links: tuple[dict[str, str], ...]
    bundle_id: Optional[str] = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "service_id": self.service_id,
            "purpose": self.purpose,
            "data_categories": list(self.data_categories),
            "signs": self.signs.as_dict(),
            "artifact_links": [dict(link) for link in self.artifact_links],
            "bundle_id": self.bundle_id,
        }


@dataclass(frozen=True)
class ConsentBundle:
    bundle_id: str
    service_ids: tuple[str, ...]
    purpose_category: PurposeCategory

    def to_dict(self) -> dict[str, Any]:
        return {
            "bundle_id": self.bundle_id,
            "service_ids": list(self.service_ids),
            "purpose_category": self.purpose_category.value,
        }


@dataclass
class _ServiceEntry:
    current_digest: str
    descriptor: AIServiceDescriptor
    # digest -> canonical descriptor document bytes, append-only
    versions: dict[str, bytes] = field(default_factory=dict)


@dataclass
class _SystemEntry:
    system_id: str
    name: str
    services: dict[str, _ServiceEntry] = field(default_factory=dict)
    bundles: dict[str, ConsentBundle] = field(default_factory=dict)

    def version_digest(self) -> str:
        return content_digest([e.current_digest for e in self.services.values()])


class Registry:
    """Purpose, category, and descriptor registry; implements the
    DescriptorContext protocol used by validation."""

    def __init__(self, vagueness: Optional[VaguenessRegistry] = None):
        self._lock = threading.RLock()
        self.vagueness = vagueness or VaguenessRegistry()
        self._purposes: dict[str, Purpose] = {}
        self._categories: dict[str, DataCategory] = {}
        self._systems: dict[str, _SystemEntry] = {}
        for p in SEED_PURPOSES:
            self._purposes[p.id] = p
        for c in SEED_CATEGORIES:
            self._categories[c.id] = c

    # -- vocabulary ---------------------------------------------------------

    def get_purpose(self, purpose_id: str) -> Optional[Purpose]:
        return self._purposes.get(purpose_id)

    def get_category(self, category_id: str) -> Optional[DataCategory]:
        return self._categories.get(category_id)

    def purposes(self) -> list[Purpose]:
        return sorted(self._purposes.values(), key=lambda p: p.id)

    def categories(self) -> list[DataCategory]:
        return sorted(self._categories.values(), key=lambda c: c.id)

    def register_purpose(self, p: Purpose) -> str:
        if not p.label:
            raise TransparencyError("purpose label must be nonempty")
        with self._lock:
            if self.vagueness.is_vague(p.label):
                raise VaguePurposeError(p.id, p.label)
            if p.id in self._purposes:
                raise DuplicateIdError("purpose", p.id)
            self._purposes[p.id] = p
            return p.id

    def register_category(self, c: DataCategory) -> str:
        with self._lock:
            if c.id in self._categories:
                raise DuplicateIdError("category", c.id)
            self._categories[c.id] = c
            return c.id

    # -- systems and services -----------------------------------------------

    def register_system(self, system_id: str, name: str = "") -> None:
        with self._lock:
            if system_id in self._systems:
                raise DuplicateIdError("system", system_id)
            self._systems[system_id] = _SystemEntry(system_id, name or system_id)

    def has_system(self, system_id: str) -> bool:
        return system_id in self._systems

    def system_ids(self) -> list[str]:
        return sorted(self._systems)

    def _system(self, system_id: str) -> _SystemEntry:
        entry = self._systems.get(system_id)
        if entry is None:
            raise UnknownSystemError(system_id)
        return entry

    def register_service(
        self, system_id: str, d: AIServiceDescriptor
    ) -> tuple[str, bool]:
        """Store a descriptor version; returns (digest, change_of_conditions).

        A change of conditions is any registration of a new service or of a
        descriptor whose digest differs from the previously registered one.
        """
        with self._lock:
            system = self._system(system_id)
            violations = validate_service_descriptor(d, self)
            if violations:
                raise ValidationFailedError(d.id, violations)

            digest = d.content_digest()
            canonical = canonical_json_bytes(d.to_dict())
            entry = system.services.get(d.id)
            if entry is None:
                entry = _ServiceEntry(current_digest=digest, descriptor=d)
                entry.versions[digest] = canonical
                system.services[d.id] = entry
                return digest, True

            changed = entry.current_digest != digest
            entry.versions.setdefault(digest, canonical)
            entry.current_digest = digest
            entry.descriptor = d
            return digest, changed

    def get_service(self, system_id: str, service_id: str) -> AIServiceDescriptor:
        entry = self._system(system_id).services.get(service_id)
        if entry is None:
            raise UnknownServiceError(service_id)
        return entry.descriptor

    def find_service(self, service_id: str) -> tuple[str, AIServiceDescriptor]:
        """Resolve a service id across systems (unique in a single-system
        deployment)."""
        with self._lock:
            matches = [
                (sys_id, entry.services[service_id].descriptor)
                for sys_id, entry in self._systems.items()
                if service_id in entry.services
            ]
        if not matches:
            raise UnknownServiceError(service_id)
        if len(matches) > 1:
            raise TransparencyError(f"service id {service_id!r} is ambiguous")
        return matches[0]

    def current_service_digest(self, service_id: str) -> str:
        system_id, _ = self.find_service(service_id)
        return self._system(system_id).services[service_id].current_digest

    def get_version_bytes(
        self, system_id: str, service_id: str, digest: str
    ) -> bytes:
        entry = self._system(system_id).services.get(service_id)
        if entry is None:
            raise UnknownServiceError(service_id)
        data = entry.versions.get(digest)
        if data is None:
            raise TransparencyError(
                f"no stored version {digest!r} for service {service_id!r}"
            )
        return data

    def system_version(self, system_id: str) -> str:
        with self._lock:
            return self._system(system_id).version_digest()

    def system_services(self, system_id: str) -> list[AIServiceDescriptor]:
        with self._lock:
            system = self._system(system_id)
            return [e.descriptor for _, e in sorted(system.services.items())]

    # -- bundles --------------------------------------------------------------

    def declare_bundle(
        self, system_id: str, bundle_id: str, service_ids: list[str]
    ) -> ConsentBundle:
        """Group services that serve a common, inter-dependable purpose so
        consent can be requested and granted for them together."""
        with self._lock:
            system = self._system(system_id)
            categories = set()
            for sid in service_ids:
                entry = system.services.get(sid)
                if entry is None:
                    raise UnknownServiceError(sid)
                purpose = self.get_purpose(entry.descriptor.purpose)
                assert purpose is not None
                categories.add(purpose.category)
            if len(categories) != 1:
                raise TransparencyError(
                    f"bundle {bundle_id!r} members must share one purpose category"
                )
            bundle = ConsentBundle(bundle_id, tuple(sorted(service_ids)), categories.pop())
            system.bundles[bundle_id] = bundle
            return bundle

    def bundle_of(self, system_id: str, service_id: str) -> Optional[str]:
        system = self._system(system_id)
        for bundle in system.bundles.values():
            if service_id in bundle.service_ids:
                return bundle.bundle_id
        return None

    def bundles(self, system_id: str) -> list[ConsentBundle]:
        return sorted(self._system(system_id).bundles.values(), key=lambda b: b.bundle_id)

    # -- signs and factsheets ---------------------------------------------------

    def service_signs(self, system_id: str, service_id: str) -> SignTriplet:
        return derive_service_signs(self.get_service(system_id, service_id))

    def system_signs(self, system_id: str) -> SystemSigns:
        services = self.system_services(system_id)
        return aggregate_system_signs(derive_service_signs(d) for d in services)

    def build_privacy_factsheet(self, system_id: str) -> list[PrivacyFactsheetRow]:
        """Rows for every service that requests at least one data category."""
        rows = []
        for d in self.system_services(system_id):
            if not d.data_categories:
                continue
            rows.append(
                PrivacyFactsheetRow(
                    service_id=d.id,
                    data_categories=tuple(sorted(d.data_categories)),
                    purpose=d.purpose,
                    retention=d.retention.value,
                    accessors=tuple(a.to_dict() for a in sorted(d.accessors)),
                    default_granted=False,
                    bundle_id=self.bundle_of(system_id, d.id),
                )
            )
        return rows

    def build_transparency_factsheet(
        self, system_id: str
    ) -> list[TransparencyFactsheetRow]:
        """One row per AI service, signs freshly derived, artifact links
        filtered down to what the availability flags actually claim."""
        rows = []
        for d in self.system_services(system_id):
            links = tuple(
                loc.to_dict()
                for loc in sorted(d.artifact_locations)
                if d.claims_artifact(loc.kind)
            )
            rows.append(
                TransparencyFactsheetRow(
                    service_id=d.id,
                    purpose=d.purpose,
                    data_categories=tuple(sorted(d.data_categories)),
                    signs=derive_service_signs(d),
                    artifact_links=links,
                    bundle_id=self.bundle_of(system_id, d.id),
                )
            )
        return rows

    def factsheet_vocabulary(self, system_id: str) -> dict[str, dict[str, str]]:
        """Purpose and category labels referenced by a system's factsheets."""
        purposes: dict[str, str] = {}
        categories: dict[str, str] = {}
        for d in self.system_services(system_id):
            purpose = self.get_purpose(d.purpose)
            if purpose is not None:
                purposes[d.purpose] = purpose.label
            for cat_id in d.data_categories:
                category = self.get_category(cat_id)
                if category is not None:
                    categories[cat_id] = category.label
        return {"purposes": purposes, "categories": categories}


# ---------------------------------------------------------------------------
# System descriptor documents
# ---------------------------------------------------------------------------


class _DocumentContext:
    """Resolves references against a document's own vocabulary plus the seeds,
    without touching a live registry.  Vague purposes resolve here so that
    validation can report them as violations instead of failing to parse."""

    def __init__(self, doc: dict[str, Any], vagueness: Optional[VaguenessRegistry] = None):
        self.vagueness = vagueness or VaguenessRegistry()
        self._purposes = {p.id: p for p in SEED_PURPOSES}
        self._categories = {c.id: c for c in SEED_CATEGORIES}
        for raw in doc.get("purposes", ()):
            p = Purpose.from_dict(raw)
            self._purposes[p.id] = p
        for raw in doc.get("data_categories", ()):
            c = DataCategory.from_dict(raw)
            self._categories[c.id] = c

    def get_purpose(self, purpose_id: str) -> Optional[Purpose]:
        return self._purposes.get(purpose_id)

    def get_category(self, category_id: str) -> Optional[DataCategory]:
        return self._categories.get(category_id)


def parse_system_document(doc: dict[str, Any]) -> list[AIServiceDescriptor]:
    return [AIServiceDescriptor.from_dict(raw) for raw in doc.get("services", ())]


def validate_system_document(
    doc: dict[str, Any], vagueness: Optional[VaguenessRegistry] = None
) -> list[Violation]:
    """Validate every service in a descriptor document; never mutates state."""
    context = _DocumentContext(doc, vagueness)
    violations: list[Violation] = []
    for d in parse_system_document(doc):
        violations.extend(validate_service_descriptor(d, context))
    return violations


def install_system_document(registry: Registry, doc: dict[str, Any]) -> str:
    """Register a document's vocabulary, system, services, and bundles.

    Purposes and categories already present with identical content are
    skipped; conflicting redefinitions raise DuplicateIdError.  Returns the
    system id.
    """
    system_id = doc["id"]
    for raw in doc.get("purposes", ()):
        p = Purpose.from_dict(raw)
        existing = registry.get_purpose(p.id)
        if existing == p:
            continue
        registry.register_purpose(p)
    for raw in doc.get("data_categories", ()):
        c = DataCategory.from_dict(raw)
        existing_cat = registry.get_category(c.id)
        if existing_cat == c:
            continue
        registry.register_category(c)
    if not registry.has_system(system_id):
        registry.register_system(system_id, doc.get("name", system_id))
    for d in parse_system_document(doc):
        registry.register_service(system_id, d)
    for raw in doc.get("bundles", ()):
        registry.declare_bundle(system_id, raw["bundle_id"], list(raw["service_ids"]))
    return system_id
