"""Core domain model: the three-axis sign lattice, the purpose and data
vocabulary, and service/system descriptors with their validity rules.

Everything in this module is an immutable value or a pure function; it is
safe to share across threads.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable, Optional, Protocol


class TransparencyError(Exception):
    """Base exception for the clearsign package."""


class MismatchedAxisError(TransparencyError):
    """A sign value was compared against the wrong axis."""


class UnresolvedReferenceError(TransparencyError):
    """A descriptor references a purpose or data category that is unknown."""

    def __init__(self, kind: str, ref_id: str):
        self.kind = kind
        self.ref_id = ref_id
        super().__init__(f"unresolved {kind} reference: {ref_id!r}")


# ---------------------------------------------------------------------------
# Sign lattice
# ---------------------------------------------------------------------------
# Each axis is a total severity order; enum definition order is the order,
# least exposing first.  The enum values are the wire strings of the header
# protocol (privacy axis) or the lowercase names used in documents.


class PrivacySign(str, Enum):
    NOT_GATHERED = "not gathered"
    STORED_USED = "may be stored"
    DISTRIBUTED = "may be exploited"


class CodeDataSign(str, Enum):
    OPEN = "open"
    PUBLIC = "public"
    OPAQUE = "opaque"


class ObjectivitySign(str, Enum):
    INDISTINCT = "indistinct"
    PERSONALISED = "personalised"


class SignAxis(Enum):
    PRIVACY = PrivacySign
    CODE_DATA = CodeDataSign
    OBJECTIVITY = ObjectivitySign


class Ordering(Enum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


def severity_rank(sign: PrivacySign | CodeDataSign | ObjectivitySign) -> int:
    """Position of a sign in its axis's severity order (0 = least exposing)."""
    return list(type(sign)).index(sign)


def severity_compare(axis: SignAxis, a: Any, b: Any) -> Ordering:
    """Compare two sign values under the axis's total severity order.

    Raises:
        MismatchedAxisError: if ``a`` or ``b`` is not a value of ``axis``.
    """
    sign_type = axis.value
    if not isinstance(a, sign_type) or not isinstance(b, sign_type):
        raise MismatchedAxisError(
            f"values {a!r}, {b!r} do not both belong to axis {axis.name}"
        )
    ra, rb = severity_rank(a), severity_rank(b)
    if ra < rb:
        return Ordering.LESS
    if ra > rb:
        return Ordering.GREATER
    return Ordering.EQUAL


@dataclass(frozen=True)
class SignTriplet:
    """The three-axis transparency state of a service or system."""

    privacy: PrivacySign
    code_data: CodeDataSign
    objectivity: ObjectivitySign

    def as_dict(self) -> dict[str, str]:
        return {
            "privacy": self.privacy.value,
            "code_data": self.code_data.value,
            "objectivity": self.objectivity.value,
        }

    @classmethod
    def from_dict(cls, data: dict[str, str]) -> "SignTriplet":
        return cls(
            privacy=PrivacySign(data["privacy"]),
            code_data=CodeDataSign(data["code_data"]),
            objectivity=ObjectivitySign(data["objectivity"]),
        )


def all_triplets() -> list[SignTriplet]:
    """Every combination of the three axes (3 x 3 x 2 = 18 triplets)."""
    return [
        SignTriplet(p, c, o)
        for p in PrivacySign
        for c in CodeDataSign
        for o in ObjectivitySign
    ]


def validate_triplet(t: SignTriplet) -> Optional[str]:
    """Check the sign consistency rule; return the violated rule or None.

    An indistinct objectivity sign can only be displayed when the system
    either gathers no personal data or is fully open, since otherwise the
    claim cannot be verified.
    """
    if t.objectivity is ObjectivitySign.INDISTINCT:
        if (
            t.privacy is not PrivacySign.NOT_GATHERED
            and t.code_data is not CodeDataSign.OPEN
        ):
            return "indistinct requires not-gathered or open"
    return None


def is_valid_triplet(t: SignTriplet) -> bool:
    return validate_triplet(t) is None


# ---------------------------------------------------------------------------
# Purpose and data vocabulary
# ---------------------------------------------------------------------------


class PurposeCategory(str, Enum):
    DEVICE_ACCESS = "device_access"
    AD_SELECTION = "ad_selection"
    CONTENT_SERVICE = "content_service"
    MARKET_RESEARCH = "market_research"


@dataclass(frozen=True)
class Purpose:
    """A declared reason for processing personal data.

    ``specific`` is true when the label names a concrete service
    (e.g. "Route planning") rather than a whole category of uses.
    """

    id: str
    label: str
    category: PurposeCategory
    specific: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "label": self.label,
            "category": self.category.value,
            "specific": self.specific,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Purpose":
        return cls(
            id=data["id"],
            label=data["label"],
            category=PurposeCategory(data["category"]),
            specific=bool(data.get("specific", False)),
        )


@dataclass(frozen=True)
class DataCategory:
    id: str
    label: str

    def to_dict(self) -> dict[str, str]:
        return {"id": self.id, "label": self.label}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "DataCategory":
        return cls(id=data["id"], label=data["label"])


class RetentionPeriod(str, Enum):
    LESS_THAN_DAY = "less_than_day"
    LESS_THAN_MONTH = "less_than_month"
    LESS_THAN_YEAR = "less_than_year"
    YEAR_OR_MORE = "year_or_more"

    @property
    def rank(self) -> int:
        return list(RetentionPeriod).index(self)


class AccessorKind(str, Enum):
    SYSTEM_ITSELF = "system_itself"
    COMPANY = "company"
    GOVERNMENT = "government"
    CONGLOMERATE = "conglomerate"


@dataclass(frozen=True, order=True)
class AccessorEntity:
    name: str
    kind: AccessorKind

    def to_dict(self) -> dict[str, str]:
        return {"name": self.name, "kind": self.kind.value}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "AccessorEntity":
        return cls(name=data["name"], kind=AccessorKind(data["kind"]))


class ArtifactKind(str, Enum):
    SOURCE_CODE = "source_code"
    MODEL = "model"
    TRAINING_DATA = "training_data"
    METADATA = "metadata"


# Artifact kinds implied by each availability claim: open code covers the
# algorithms and models, open data covers the training data and its
# descriptive metadata.
CODE_ARTIFACT_KINDS = frozenset({ArtifactKind.SOURCE_CODE, ArtifactKind.MODEL})
DATA_ARTIFACT_KINDS = frozenset({ArtifactKind.TRAINING_DATA, ArtifactKind.METADATA})


@dataclass(frozen=True, order=True)
class ArtifactLocation:
    kind: ArtifactKind
    locator: str

    def to_dict(self) -> dict[str, str]:
        return {"kind": self.kind.value, "locator": self.locator}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ArtifactLocation":
        return cls(kind=ArtifactKind(data["kind"]), locator=data["locator"])


# ---------------------------------------------------------------------------
# Canonical serialization and content digests
# ---------------------------------------------------------------------------


def canonical_json_bytes(obj: Any) -> bytes:
    """Canonical UTF-8 JSON: sorted keys, compact separators, no ASCII escapes."""
    return json.dumps(
        obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False
    ).encode("utf-8")


def content_digest(obj: Any) -> str:
    """Lowercase hex SHA-256 over the canonical serialization of ``obj``."""
    return hashlib.sha256(canonical_json_bytes(obj)).hexdigest()


# ---------------------------------------------------------------------------
# Service and system descriptors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AIServiceDescriptor:
    """A registered AI service: one purpose, its data needs, and openness claims.

    ``purpose`` and ``data_categories`` are references (ids) into a registry.
    The version identity of a descriptor is its content digest, computed over
    the canonical document excluding the digest itself.
    """

    id: str
    name: str
    purpose: str
    data_categories: frozenset[str] = frozenset()
    retention: RetentionPeriod = RetentionPeriod.LESS_THAN_DAY
    accessors: frozenset[AccessorEntity] = frozenset()
    code_available: bool = False
    training_data_available: bool = False
    declared_objective: bool = False
    artifact_locations: frozenset[ArtifactLocation] = frozenset()

    def to_dict(self, include_version: bool = True) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "id": self.id,
            "name": self.name,
            "purpose": self.purpose,
            "data_categories": sorted(self.data_categories),
            "retention": self.retention.value,
            "accessors": [a.to_dict() for a in sorted(self.accessors)],
            "code_available": self.code_available,
            "training_data_available": self.training_data_available,
            "declared_objective": self.declared_objective,
            "artifact_locations": [
                loc.to_dict() for loc in sorted(self.artifact_locations)
            ],
        }
        if include_version:
            doc["version"] = self.content_digest()
        return doc

    def content_digest(self) -> str:
        return content_digest(self.to_dict(include_version=False))

    def artifact_locator(self, kind: ArtifactKind) -> Optional[str]:
        for loc in sorted(self.artifact_locations):
            if loc.kind is kind:
                return loc.locator
        return None

    def claims_artifact(self, kind: ArtifactKind) -> bool:
        """Whether the corresponding availability flag covers this kind."""
        if kind in CODE_ARTIFACT_KINDS:
            return self.code_available
        return self.training_data_available

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "AIServiceDescriptor":
        return cls(
            id=data["id"],
            name=data.get("name", data["id"]),
            purpose=data["purpose"],
            data_categories=frozenset(data.get("data_categories", ())),
            retention=RetentionPeriod(data.get("retention", "less_than_day")),
            accessors=frozenset(
                AccessorEntity.from_dict(a) for a in data.get("accessors", ())
            ),
            code_available=bool(data.get("code_available", False)),
            training_data_available=bool(data.get("training_data_available", False)),
            declared_objective=bool(data.get("declared_objective", False)),
            artifact_locations=frozenset(
                ArtifactLocation.from_dict(loc)
                for loc in data.get("artifact_locations", ())
            ),
        )


@dataclass(frozen=True)
class SystemDescriptor:
    """A user-facing system containing zero or more AI services."""

    id: str
    name: str
    services: tuple[AIServiceDescriptor, ...] = ()

    def __post_init__(self) -> None:
        ids = [s.id for s in self.services]
        if len(ids) != len(set(ids)):
            raise TransparencyError(f"duplicate service ids in system {self.id!r}")

    def content_digest(self) -> str:
        return content_digest([s.content_digest() for s in self.services])

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "name": self.name,
            "services": [s.to_dict() for s in self.services],
            "version": self.content_digest(),
        }


# ---------------------------------------------------------------------------
# Purpose vagueness
# ---------------------------------------------------------------------------

# Blanket "internal improvement" wording names no concrete service and gives
# the data owner nothing checkable to consent to.
DEFAULT_BANNED_PATTERNS: tuple[str, ...] = (
    r"develop\s+and/?\s*(?:or\s+)?improve\s+products",
    r"other\s+internal\s+uses",
)


class VaguenessRegistry:
    """Configurable list of banned purpose-label patterns."""

    def __init__(self, patterns: Iterable[str] = DEFAULT_BANNED_PATTERNS):
        self._patterns = [re.compile(p, re.IGNORECASE) for p in patterns]

    def add(self, pattern: str) -> None:
        self._patterns.append(re.compile(pattern, re.IGNORECASE))

    def is_vague(self, label: str) -> bool:
        return any(p.search(label) for p in self._patterns)


# ---------------------------------------------------------------------------
# Descriptor validation
# ---------------------------------------------------------------------------


class DescriptorContext(Protocol):
    """What descriptor validation needs to resolve references."""

    def get_purpose(self, purpose_id: str) -> Optional[Purpose]: ...

    def get_category(self, category_id: str) -> Optional[DataCategory]: ...

    @property
    def vagueness(self) -> VaguenessRegistry: ...


@dataclass(frozen=True)
class Violation:
    rule: str
    detail: str
    service_id: str = ""

    def to_dict(self) -> dict[str, str]:
        return {"rule": self.rule, "detail": self.detail, "service_id": self.service_id}


VAGUE_PURPOSE = "vague-purpose"
MISSING_ARTIFACT = "missing-artifact"
UNAUDITABLE_OBJECTIVITY = "unauditable-objectivity"
NO_ACCESSORS = "no-accessors"
DUPLICATE_SYSTEM_ACCESSOR = "duplicate-system-accessor"


def validate_service_descriptor(
    d: AIServiceDescriptor, context: DescriptorContext
) -> list[Violation]:
    """Validate one descriptor against a registry context.

    Returns violations (possibly empty); raises UnresolvedReferenceError when
    a referenced purpose or category id is unknown to the context.
    """
    purpose = context.get_purpose(d.purpose)
    if purpose is None:
        raise UnresolvedReferenceError("purpose", d.purpose)
    for cat_id in d.data_categories:
        if context.get_category(cat_id) is None:
            raise UnresolvedReferenceError("category", cat_id)

    violations: list[Violation] = []

    if context.vagueness.is_vague(purpose.label):
        violations.append(
            Violation(
                VAGUE_PURPOSE,
                f"purpose label {purpose.label!r} matches a banned pattern",
                d.id,
            )
        )

    if d.code_available and d.artifact_locator(ArtifactKind.SOURCE_CODE) is None:
        violations.append(
            Violation(
                MISSING_ARTIFACT,
                "code_available is claimed but no source_code artifact location is declared",
                d.id,
            )
        )
    if (
        d.training_data_available
        and d.artifact_locator(ArtifactKind.TRAINING_DATA) is None
    ):
        violations.append(
            Violation(
                MISSING_ARTIFACT,
                "training_data_available is claimed but no training_data artifact location is declared",
                d.id,
            )
        )

    if d.declared_objective and d.data_categories and not d.code_available:
        violations.append(
            Violation(
                UNAUDITABLE_OBJECTIVITY,
                "objectivity is declared over personal data but the code is not available to audit it",
                d.id,
            )
        )

    if d.data_categories and not d.accessors:
        violations.append(
            Violation(
                NO_ACCESSORS,
                "personal data is requested but no accessing entity is declared",
                d.id,
            )
        )

    system_accessors = [
        a for a in d.accessors if a.kind is AccessorKind.SYSTEM_ITSELF
    ]
    if len(system_accessors) > 1:
        violations.append(
            Violation(
                DUPLICATE_SYSTEM_ACCESSOR,
                "the system itself may appear at most once in the accessor set",
                d.id,
            )
        )

    return violations
