"""Sign derivation and aggregation, plus the transparency header protocol.

Pure functions over immutable inputs; callable concurrently without
restriction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable, Optional, Sequence

from .model import (
    AccessorKind,
    AIServiceDescriptor,
    CodeDataSign,
    ObjectivitySign,
    PrivacySign,
    SignTriplet,
    TransparencyError,
    is_valid_triplet,
    severity_rank,
    validate_service_descriptor,
    validate_triplet,
)


class InvalidDescriptorError(TransparencyError):
    """Sign derivation was asked for a descriptor that fails validation."""

    def __init__(self, service_id: str, violations):
        self.service_id = service_id
        self.violations = list(violations)
        rules = ", ".join(v.rule for v in self.violations)
        super().__init__(f"descriptor {service_id!r} is invalid: {rules}")


class InvalidTripletError(TransparencyError):
    """An aggregation input violates the sign consistency rule."""


class HeaderError(TransparencyError):
    """Base for header protocol parse failures."""


class MissingHeaderError(HeaderError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"missing transparency header: {name}")


class DuplicateHeaderError(HeaderError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"duplicate transparency header: {name}")


class UnknownValueError(HeaderError):
    def __init__(self, name: str, value: str):
        self.name = name
        self.value = value
        super().__init__(f"unknown value for {name}: {value!r}")


# The triplet shown for a system that runs no AI services at all: nothing is
# gathered, there is nothing closed, and every interaction is indistinct.
NO_AI_TRIPLET = SignTriplet(
    PrivacySign.NOT_GATHERED, CodeDataSign.OPEN, ObjectivitySign.INDISTINCT
)


@dataclass(frozen=True)
class SystemSigns:
    """System-wide signs plus the flags the UI needs to render them honestly.

    ``objectivity_coerced`` is set when the per-axis maximum of the member
    services would display an indistinct sign the combination rule forbids,
    forcing the personalised sign instead.
    """

    triplet: SignTriplet
    has_ai_services: bool = True
    objectivity_coerced: bool = False

    def as_dict(self) -> dict[str, Any]:
        return {
            "signs": self.triplet.as_dict(),
            "has_ai_services": self.has_ai_services,
            "objectivity_coerced": self.objectivity_coerced,
        }


HEADER_PRIVACY = "X-Personal-Data"
HEADER_CODE_DATA = "X-Transparency-Code-Data"
HEADER_OBJECTIVITY = "X-Transparency-Objectivity"

TRANSPARENCY_HEADER_NAMES = (HEADER_PRIVACY, HEADER_CODE_DATA, HEADER_OBJECTIVITY)

_HEADER_AXES = {
    HEADER_PRIVACY: PrivacySign,
    HEADER_CODE_DATA: CodeDataSign,
    HEADER_OBJECTIVITY: ObjectivitySign,
}


def derive_service_signs(
    d: AIServiceDescriptor, context=None, *, validated: bool = False
) -> SignTriplet:
    """Derive the per-service sign triplet from a descriptor.

    Privacy follows where the data may travel: nothing declared means not
    gathered, data kept strictly inside the system means stored, any outside
    accessor means exploited.  Code/data openness follows the availability
    claims.  Objectivity holds only when no personal data is touched, or when
    an explicit objectivity declaration can be audited against fully open
    code and data.

    When ``context`` is given and ``validated`` is false, the descriptor is
    validated first and InvalidDescriptorError raised on any violation.
    """
    if context is not None and not validated:
        violations = validate_service_descriptor(d, context)
        if violations:
            raise InvalidDescriptorError(d.id, violations)

    if not d.data_categories:
        privacy = PrivacySign.NOT_GATHERED
    elif all(a.kind is AccessorKind.SYSTEM_ITSELF for a in d.accessors):
        privacy = PrivacySign.STORED_USED
    else:
        privacy = PrivacySign.DISTRIBUTED

    if d.code_available and d.training_data_available:
        code_data = CodeDataSign.OPEN
    elif d.code_available:
        code_data = CodeDataSign.PUBLIC
    else:
        code_data = CodeDataSign.OPAQUE

    if not d.data_categories or (
        d.declared_objective and code_data is CodeDataSign.OPEN
    ):
        objectivity = ObjectivitySign.INDISTINCT
    else:
        objectivity = ObjectivitySign.PERSONALISED

    return SignTriplet(privacy, code_data, objectivity)


def aggregate_system_signs(triplets: Iterable[SignTriplet]) -> SystemSigns:
    """Combine per-service triplets into the system-wide signs.

    The system shows the most restrictive sign on each axis.  If the
    resulting combination would claim indistinctness it cannot guarantee,
    objectivity is coerced to personalised and flagged.
    """
    triplets = list(triplets)
    for t in triplets:
        reason = validate_triplet(t)
        if reason is not None:
            raise InvalidTripletError(f"invalid input triplet {t}: {reason}")

    if not triplets:
        return SystemSigns(NO_AI_TRIPLET, has_ai_services=False)

    privacy = max((t.privacy for t in triplets), key=severity_rank)
    code_data = max((t.code_data for t in triplets), key=severity_rank)
    objectivity = max((t.objectivity for t in triplets), key=severity_rank)

    combined = SignTriplet(privacy, code_data, objectivity)
    if not is_valid_triplet(combined):
        combined = SignTriplet(privacy, code_data, ObjectivitySign.PERSONALISED)
        return SystemSigns(combined, has_ai_services=True, objectivity_coerced=True)
    return SystemSigns(combined, has_ai_services=True)


def encode_sign_headers(s: SystemSigns) -> list[tuple[str, str]]:
    """Emit the three transparency headers, in protocol order, bit-exact."""
    t = s.triplet
    return [
        (HEADER_PRIVACY, t.privacy.value),
        (HEADER_CODE_DATA, t.code_data.value),
        (HEADER_OBJECTIVITY, t.objectivity.value),
    ]


def parse_sign_headers(headers: Sequence[tuple[str, str]]) -> SystemSigns:
    """Parse the transparency headers back into SystemSigns.

    Header names match case-insensitively; values match exactly after
    trimming surrounding whitespace.  The headers cannot say whether the
    system has AI services, so the parsed SystemSigns assumes it does.

    Raises:
        MissingHeaderError, DuplicateHeaderError, UnknownValueError
    """
    by_name: dict[str, str] = {}
    canonical = {name.lower(): name for name in TRANSPARENCY_HEADER_NAMES}
    for name, value in headers:
        wanted = canonical.get(name.lower())
        if wanted is None:
            continue
        if wanted in by_name:
            raise DuplicateHeaderError(wanted)
        by_name[wanted] = value

    values: dict[str, Any] = {}
    for name in TRANSPARENCY_HEADER_NAMES:
        if name not in by_name:
            raise MissingHeaderError(name)
        raw = by_name[name].strip()
        try:
            values[name] = _HEADER_AXES[name](raw)
        except ValueError:
            raise UnknownValueError(name, raw) from None

    return SystemSigns(
        SignTriplet(
            privacy=values[HEADER_PRIVACY],
            code_data=values[HEADER_CODE_DATA],
            objectivity=values[HEADER_OBJECTIVITY],
        )
    )


def render_sign_lines(s: SystemSigns) -> list[str]:
    """One line per axis for CLI output; zero-service systems show "no AI"."""
    code_line = "no AI" if not s.has_ai_services else s.triplet.code_data.value
    return [
        f"privacy: {s.triplet.privacy.value}",
        f"code-data: {code_line}",
        f"objectivity: {s.triplet.objectivity.value}",
    ]


def render_sign_summary(s: SystemSigns) -> str:
    """Compact one-line form, e.g. ``may be exploited / opaque / personalised``."""
    code = "no AI" if not s.has_ai_services else s.triplet.code_data.value
    return f"{s.triplet.privacy.value} / {code} / {s.triplet.objectivity.value}"
