"""clearsign: transparency-and-consent enforcement gateway for AI systems."""

from .model import (
    AccessorEntity,
    AccessorKind,
    AIServiceDescriptor,
    ArtifactKind,
    ArtifactLocation,
    CodeDataSign,
    DataCategory,
    ObjectivitySign,
    PrivacySign,
    Purpose,
    PurposeCategory,
    RetentionPeriod,
    SignAxis,
    SignTriplet,
    SystemDescriptor,
    TransparencyError,
    severity_compare,
    validate_service_descriptor,
    validate_triplet,
)
from .signs import (
    SystemSigns,
    aggregate_system_signs,
    derive_service_signs,
    encode_sign_headers,
    parse_sign_headers,
)

__version__ = "0.1.0"

__all__ = [
    "AccessorEntity",
    "AccessorKind",
    "AIServiceDescriptor",
    "ArtifactKind",
    "ArtifactLocation",
    "CodeDataSign",
    "DataCategory",
    "ObjectivitySign",
    "PrivacySign",
    "Purpose",
    "PurposeCategory",
    "RetentionPeriod",
    "SignAxis",
    "SignTriplet",
    "SystemDescriptor",
    "SystemSigns",
    "TransparencyError",
    "aggregate_system_signs",
    "derive_service_signs",
    "encode_sign_headers",
    "parse_sign_headers",
    "severity_compare",
    "validate_service_descriptor",
    "validate_triplet",
    "__version__",
]
