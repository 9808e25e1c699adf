"""Registry, factsheet, and change-of-conditions tests."""

from __future__ import annotations

import pytest

from clearsign.model import (
    AccessorEntity,
    AccessorKind,
    AIServiceDescriptor,
    ArtifactKind,
    ArtifactLocation,
    CodeDataSign,
    ObjectivitySign,
    PrivacySign,
    Purpose,
    PurposeCategory,
    RetentionPeriod,
    SignTriplet,
    canonical_json_bytes,
)
from clearsign.registry import (
    DuplicateIdError,
    Registry,
    UnknownSystemError,
    VaguePurposeError,
    ValidationFailedError,
    install_system_document,
    validate_system_document,
)
from clearsign.signs import aggregate_system_signs

SELF = AccessorEntity("the system", AccessorKind.SYSTEM_ITSELF)
COMPANY_A = AccessorEntity("company A", AccessorKind.COMPANY)


def ads_service(**kwargs) -> AIServiceDescriptor:
    base = dict(
        id="targeted-ads",
        name="Targeted ads",
        purpose="ad-selection",
        data_categories=frozenset({"location"}),
        retention=RetentionPeriod.LESS_THAN_YEAR,
        accessors=frozenset({SELF, COMPANY_A}),
    )
    base.update(kwargs)
    return AIServiceDescriptor(**base)


def translation_service(**kwargs) -> AIServiceDescriptor:
    base = dict(
        id="translator",
        name="Language translation",
        purpose="language-translation",
    )
    base.update(kwargs)
    return AIServiceDescriptor(**base)


@pytest.fixture
def registry():
    r = Registry()
    r.register_system("demo", "Demo system")
    return r


class TestPurposes:
    def test_seed_taxonomy_is_preloaded(self, registry):
        for pid in (
            "device-access",
            "ad-selection",
            "content-service",
            "market-research",
            "route-planning",
            "product-recommendation",
            "language-translation",
            "image-generation",
            "conversational-agents",
        ):
            assert registry.get_purpose(pid) is not None

    def test_register_specific_purpose(self, registry):
        pid = registry.register_purpose(
            Purpose("chess-coach", "Chess coaching", PurposeCategory.CONTENT_SERVICE, True)
        )
        assert registry.get_purpose(pid).label == "Chess coaching"

    def test_vague_purpose_rejected(self, registry):
        with pytest.raises(VaguePurposeError):
            registry.register_purpose(
                Purpose(
                    "improve",
                    "Develop and improve products",
                    PurposeCategory.CONTENT_SERVICE,
                )
            )

    def test_duplicate_id_rejected(self, registry):
        p = Purpose("x", "Chess coaching", PurposeCategory.CONTENT_SERVICE, True)
        registry.register_purpose(p)
        with pytest.raises(DuplicateIdError):
            registry.register_purpose(p)

    def test_seed_categories(self, registry):
        assert {c.id for c in registry.categories()} >= {
            "location",
            "images",
            "navigation",
            "use-statistics",
        }


class TestServiceRegistration:
    def test_first_registration_is_a_change(self, registry):
        digest, changed = registry.register_service("demo", ads_service())
        assert changed is True
        assert len(digest) == 64

    def test_identical_reregistration_is_not_a_change(self, registry):
        d = ads_service()
        digest1, _ = registry.register_service("demo", d)
        digest2, changed = registry.register_service("demo", d)
        assert digest1 == digest2
        assert changed is False

    def test_modified_descriptor_is_a_change(self, registry):
        digest1, _ = registry.register_service("demo", ads_service())
        digest2, changed = registry.register_service(
            "demo", ads_service(data_categories=frozenset({"location", "navigation"}))
        )
        assert digest1 != digest2
        assert changed is True

    def test_validation_failure_carries_violations(self, registry):
        bad = ads_service(accessors=frozenset())
        with pytest.raises(ValidationFailedError) as exc:
            registry.register_service("demo", bad)
        assert [v.rule for v in exc.value.violations] == ["no-accessors"]

    def test_unknown_system(self, registry):
        with pytest.raises(UnknownSystemError):
            registry.register_service("nope", ads_service())

    def test_versions_are_append_only_and_byte_identical(self, registry):
        d1 = ads_service()
        digest1, _ = registry.register_service("demo", d1)
        registry.register_service(
            "demo", ads_service(data_categories=frozenset({"location", "images"}))
        )
        stored = registry.get_version_bytes("demo", d1.id, digest1)
        assert stored == canonical_json_bytes(d1.to_dict())
        # re-reading returns the identical bytes
        assert registry.get_version_bytes("demo", d1.id, digest1) == stored

    def test_system_version_tracks_services(self, registry):
        v0 = registry.system_version("demo")
        registry.register_service("demo", ads_service())
        v1 = registry.system_version("demo")
        assert v0 != v1


class TestFactsheets:
    def test_privacy_factsheet_row_shape(self, registry):
        registry.register_service("demo", ads_service())
        registry.register_service("demo", translation_service())
        rows = registry.build_privacy_factsheet("demo")
        assert len(rows) == 1  # only the data-requesting service
        row = rows[0]
        assert row.service_id == "targeted-ads"
        assert row.data_categories == ("location",)
        assert row.purpose == "ad-selection"
        assert row.retention == "less_than_year"
        assert {a["name"] for a in row.accessors} == {"the system", "company A"}
        assert row.default_granted is False

    def test_privacy_factsheet_empty_for_data_free_system(self, registry):
        registry.register_service("demo", translation_service())
        assert registry.build_privacy_factsheet("demo") == []

    def test_default_granted_always_false(self, registry):
        registry.register_service("demo", ads_service())
        registry.register_service(
            "demo",
            ads_service(id="more-ads", data_categories=frozenset({"navigation"})),
        )
        assert all(
            row.default_granted is False
            for row in registry.build_privacy_factsheet("demo")
        )

    def test_transparency_factsheet_covers_all_services(self, registry):
        registry.register_service("demo", ads_service())
        registry.register_service("demo", translation_service())
        rows = registry.build_transparency_factsheet("demo")
        assert [r.service_id for r in rows] == ["targeted-ads", "translator"]
        assert rows[0].signs == SignTriplet(
            PrivacySign.DISTRIBUTED, CodeDataSign.OPAQUE, ObjectivitySign.PERSONALISED
        )

    def test_public_service_links_source_but_not_training_data(self, registry):
        d = translation_service(
            code_available=True,
            artifact_locations=frozenset(
                {
                    ArtifactLocation(ArtifactKind.SOURCE_CODE, "https://example/src"),
                    ArtifactLocation(ArtifactKind.TRAINING_DATA, "https://example/data"),
                }
            ),
        )
        registry.register_service("demo", d)
        (row,) = registry.build_transparency_factsheet("demo")
        assert row.signs.code_data is CodeDataSign.PUBLIC
        kinds = {link["kind"] for link in row.artifact_links}
        assert kinds == {"source_code"}

    def test_factsheet_aggregate_matches_system_signs(self, registry):
        registry.register_service("demo", ads_service())
        registry.register_service("demo", translation_service())
        rows = registry.build_transparency_factsheet("demo")
        aggregate = aggregate_system_signs(r.signs for r in rows)
        assert aggregate == registry.system_signs("demo")

    def test_empty_system_signs(self, registry):
        assert registry.build_transparency_factsheet("demo") == []
        assert registry.system_signs("demo").has_ai_services is False


class TestBundles:
    def test_bundled_rows_share_bundle_id(self, registry):
        registry.register_service(
            "demo",
            ads_service(
                id="route-a",
                purpose="route-planning",
                data_categories=frozenset({"location"}),
                accessors=frozenset({SELF}),
            ),
        )
        registry.register_service(
            "demo",
            ads_service(
                id="route-b",
                purpose="route-planning",
                data_categories=frozenset({"navigation"}),
                accessors=frozenset({SELF}),
            ),
        )
        registry.declare_bundle("demo", "routing", ["route-a", "route-b"])
        rows = registry.build_privacy_factsheet("demo")
        assert {r.bundle_id for r in rows} == {"routing"}

    def test_bundle_requires_shared_purpose_category(self, registry):
        registry.register_service("demo", ads_service())
        registry.register_service(
            "demo",
            ads_service(id="router", purpose="route-planning"),
        )
        with pytest.raises(Exception):
            registry.declare_bundle("demo", "mixed", ["targeted-ads", "router"])


class TestDocuments:
    DOC = {
        "id": "demo-site",
        "name": "Demo site",
        "purposes": [
            {
                "id": "weather",
                "label": "Weather forecasting",
                "category": "content_service",
                "specific": True,
            }
        ],
        "data_categories": [{"id": "climate", "label": "climate readings"}],
        "services": [
            {
                "id": "forecast",
                "name": "Forecast",
                "purpose": "weather",
                "data_categories": ["location"],
                "retention": "less_than_day",
                "accessors": [{"name": "the system", "kind": "system_itself"}],
            }
        ],
    }

    def test_validate_clean_document(self):
        assert validate_system_document(self.DOC) == []

    def test_validate_reports_vague_purpose(self):
        doc = {
            "id": "vague-site",
            "purposes": [
                {
                    "id": "improve",
                    "label": "Develop and improve products",
                    "category": "content_service",
                }
            ],
            "services": [
                {
                    "id": "mystery",
                    "purpose": "improve",
                    "data_categories": ["location"],
                    "accessors": [{"name": "the system", "kind": "system_itself"}],
                }
            ],
        }
        violations = validate_system_document(doc)
        assert [v.rule for v in violations] == ["vague-purpose"]

    def test_install_document(self):
        registry = Registry()
        system_id = install_system_document(registry, self.DOC)
        assert system_id == "demo-site"
        assert registry.get_service("demo-site", "forecast").purpose == "weather"
        assert registry.get_category("climate") is not None

    def test_install_is_repeatable(self):
        registry = Registry()
        install_system_document(registry, self.DOC)
        install_system_document(registry, self.DOC)
        assert len(registry.system_services("demo-site")) == 1
