"""Sign derivation, aggregation algebra, and header protocol tests."""

from __future__ import annotations

from hypothesis import given
from hypothesis import strategies as st
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
    RetentionPeriod,
    SignTriplet,
    all_triplets,
    severity_rank,
    validate_triplet,
)
from clearsign.signs import (
    DuplicateHeaderError,
    InvalidTripletError,
    MissingHeaderError,
    NO_AI_TRIPLET,
    SystemSigns,
    UnknownValueError,
    aggregate_system_signs,
    derive_service_signs,
    encode_sign_headers,
    parse_sign_headers,
    render_sign_lines,
    render_sign_summary,
)

VALID_TRIPLETS = [t for t in all_triplets() if validate_triplet(t) is None]

valid_triplet_st = st.sampled_from(VALID_TRIPLETS)


def axis_max_oracle(triplets):
    """Brute-force per-axis maximum via ranked index lookups."""
    return SignTriplet(
        max((t.privacy for t in triplets), key=severity_rank),
        max((t.code_data for t in triplets), key=severity_rank),
        max((t.objectivity for t in triplets), key=severity_rank),
    )


def make_descriptor(**kwargs) -> AIServiceDescriptor:
    base = dict(
        id="svc",
        name="Service",
        purpose="language-translation",
        retention=RetentionPeriod.LESS_THAN_DAY,
    )
    base.update(kwargs)
    return AIServiceDescriptor(**base)


SELF = AccessorEntity("the system", AccessorKind.SYSTEM_ITSELF)
COMPANY_C = AccessorEntity("company C", AccessorKind.COMPANY)

OPEN_ARTIFACTS = frozenset(
    {
        ArtifactLocation(ArtifactKind.SOURCE_CODE, "https://example/src"),
        ArtifactLocation(ArtifactKind.TRAINING_DATA, "https://example/data"),
    }
)


class TestDerivation:
    def test_fully_open_no_data(self):
        d = make_descriptor(
            code_available=True,
            training_data_available=True,
            declared_objective=True,
            artifact_locations=OPEN_ARTIFACTS,
        )
        assert derive_service_signs(d) == SignTriplet(
            PrivacySign.NOT_GATHERED, CodeDataSign.OPEN, ObjectivitySign.INDISTINCT
        )

    def test_sharing_history_with_third_party(self):
        d = make_descriptor(
            data_categories=frozenset({"history", "profile"}),
            accessors=frozenset({SELF, COMPANY_C}),
        )
        assert derive_service_signs(d) == SignTriplet(
            PrivacySign.DISTRIBUTED, CodeDataSign.OPAQUE, ObjectivitySign.PERSONALISED
        )

    def test_open_but_not_declared_objective(self):
        d = make_descriptor(
            data_categories=frozenset({"location"}),
            accessors=frozenset({SELF}),
            code_available=True,
            training_data_available=True,
            artifact_locations=OPEN_ARTIFACTS,
        )
        assert derive_service_signs(d) == SignTriplet(
            PrivacySign.STORED_USED, CodeDataSign.OPEN, ObjectivitySign.PERSONALISED
        )

    def test_declared_objective_with_open_code_data(self):
        d = make_descriptor(
            data_categories=frozenset({"location"}),
            accessors=frozenset({SELF}),
            code_available=True,
            training_data_available=True,
            declared_objective=True,
            artifact_locations=OPEN_ARTIFACTS,
        )
        assert derive_service_signs(d) == SignTriplet(
            PrivacySign.STORED_USED, CodeDataSign.OPEN, ObjectivitySign.INDISTINCT
        )

    def test_code_only_is_public_and_personalised(self):
        d = make_descriptor(
            data_categories=frozenset({"location"}),
            accessors=frozenset({SELF}),
            code_available=True,
            declared_objective=True,
            artifact_locations=frozenset(
                {ArtifactLocation(ArtifactKind.SOURCE_CODE, "https://example/src")}
            ),
        )
        assert derive_service_signs(d) == SignTriplet(
            PrivacySign.STORED_USED, CodeDataSign.PUBLIC, ObjectivitySign.PERSONALISED
        )

    @given(
        categories=st.frozensets(st.sampled_from(["location", "images", "navigation"])),
        third_party=st.booleans(),
        code=st.booleans(),
        data=st.booleans(),
        objective=st.booleans(),
    )
    def test_derived_triplet_always_valid(
        self, categories, third_party, code, data, objective
    ):
        accessors = {SELF} if categories else set()
        if third_party and categories:
            accessors.add(COMPANY_C)
        d = make_descriptor(
            data_categories=categories,
            accessors=frozenset(accessors),
            code_available=code,
            training_data_available=data,
            declared_objective=objective,
        )
        assert validate_triplet(derive_service_signs(d)) is None


class TestAggregation:
    def test_empty_system(self):
        signs = aggregate_system_signs([])
        assert signs.triplet == NO_AI_TRIPLET
        assert signs.has_ai_services is False
        assert signs.objectivity_coerced is False

    def test_singleton_identity(self):
        signs = aggregate_system_signs([NO_AI_TRIPLET])
        assert signs.triplet == NO_AI_TRIPLET
        assert signs.has_ai_services is True

    def test_per_axis_max(self):
        worst = SignTriplet(
            PrivacySign.DISTRIBUTED, CodeDataSign.OPAQUE, ObjectivitySign.PERSONALISED
        )
        signs = aggregate_system_signs([NO_AI_TRIPLET, worst])
        assert signs.triplet == worst

    def test_rejects_invalid_input(self):
        bad = SignTriplet(
            PrivacySign.STORED_USED, CodeDataSign.OPAQUE, ObjectivitySign.INDISTINCT
        )
        with pytest.raises(InvalidTripletError):
            aggregate_system_signs([bad])

    def test_coercion_when_max_violates_rule(self):
        # both inputs valid, but their per-axis max claims indistinct while
        # neither not-gathered nor open holds
        a = SignTriplet(
            PrivacySign.NOT_GATHERED, CodeDataSign.OPAQUE, ObjectivitySign.INDISTINCT
        )
        b = SignTriplet(
            PrivacySign.DISTRIBUTED, CodeDataSign.OPEN, ObjectivitySign.INDISTINCT
        )
        signs = aggregate_system_signs([a, b])
        assert signs.triplet == SignTriplet(
            PrivacySign.DISTRIBUTED, CodeDataSign.OPAQUE, ObjectivitySign.PERSONALISED
        )
        assert signs.objectivity_coerced is True

    @given(st.lists(valid_triplet_st, min_size=1, max_size=8))
    def test_matches_axis_max_oracle_up_to_coercion(self, triplets):
        signs = aggregate_system_signs(triplets)
        oracle = axis_max_oracle(triplets)
        assert signs.triplet.privacy == oracle.privacy
        assert signs.triplet.code_data == oracle.code_data
        if validate_triplet(oracle) is None:
            assert signs.triplet == oracle
            assert not signs.objectivity_coerced
        else:
            assert signs.triplet.objectivity is ObjectivitySign.PERSONALISED
            assert signs.objectivity_coerced
        assert validate_triplet(signs.triplet) is None

    @given(st.lists(valid_triplet_st, min_size=1, max_size=6))
    def test_idempotent_and_commutative(self, triplets):
        once = aggregate_system_signs(triplets)
        doubled = aggregate_system_signs(triplets + triplets)
        assert once == doubled
        assert aggregate_system_signs(list(reversed(triplets))) == once

    @given(
        st.lists(valid_triplet_st, min_size=1, max_size=4),
        st.lists(valid_triplet_st, min_size=1, max_size=4),
    )
    def test_monotone(self, base, extra):
        before = aggregate_system_signs(base).triplet
        after = aggregate_system_signs(base + extra).triplet
        assert severity_rank(after.privacy) >= severity_rank(before.privacy)
        assert severity_rank(after.code_data) >= severity_rank(before.code_data)
        assert severity_rank(after.objectivity) >= severity_rank(before.objectivity)


class TestHeaderProtocol:
    def test_encode_worst_case(self):
        signs = SystemSigns(
            SignTriplet(
                PrivacySign.DISTRIBUTED,
                CodeDataSign.OPAQUE,
                ObjectivitySign.PERSONALISED,
            )
        )
        assert encode_sign_headers(signs) == [
            ("X-Personal-Data", "may be exploited"),
            ("X-Transparency-Code-Data", "opaque"),
            ("X-Transparency-Objectivity", "personalised"),
        ]

    def test_encode_best_case(self):
        assert encode_sign_headers(SystemSigns(NO_AI_TRIPLET)) == [
            ("X-Personal-Data", "not gathered"),
            ("X-Transparency-Code-Data", "open"),
            ("X-Transparency-Objectivity", "indistinct"),
        ]

    def test_parse_example(self):
        signs = parse_sign_headers(
            [
                ("X-Personal-Data", "may be stored"),
                ("X-Transparency-Code-Data", "public"),
                ("X-Transparency-Objectivity", "personalised"),
            ]
        )
        assert signs.triplet == SignTriplet(
            PrivacySign.STORED_USED, CodeDataSign.PUBLIC, ObjectivitySign.PERSONALISED
        )

    def test_parse_is_case_insensitive_on_names_and_trims_values(self):
        signs = parse_sign_headers(
            [
                ("x-personal-data", "  not gathered "),
                ("X-TRANSPARENCY-CODE-DATA", "open"),
                ("x-transparency-objectivity", "indistinct"),
            ]
        )
        assert signs.triplet == NO_AI_TRIPLET

    def test_missing_header(self):
        with pytest.raises(MissingHeaderError) as exc:
            parse_sign_headers(
                [
                    ("X-Personal-Data", "not gathered"),
                    ("X-Transparency-Code-Data", "open"),
                ]
            )
        assert exc.value.name == "X-Transparency-Objectivity"

    def test_unknown_value(self):
        with pytest.raises(UnknownValueError):
            parse_sign_headers(
                [
                    ("X-Personal-Data", "maybe stored"),
                    ("X-Transparency-Code-Data", "open"),
                    ("X-Transparency-Objectivity", "indistinct"),
                ]
            )

    def test_duplicate_header(self):
        with pytest.raises(DuplicateHeaderError):
            parse_sign_headers(
                [
                    ("X-Personal-Data", "not gathered"),
                    ("X-Personal-Data", "may be stored"),
                    ("X-Transparency-Code-Data", "open"),
                    ("X-Transparency-Objectivity", "indistinct"),
                ]
            )

    def test_round_trip_all_valid_triplets(self):
        for t in VALID_TRIPLETS:
            signs = SystemSigns(t)
            assert parse_sign_headers(encode_sign_headers(signs)).triplet == t


class TestRendering:
    def test_lines(self):
        signs = SystemSigns(
            SignTriplet(
                PrivacySign.DISTRIBUTED,
                CodeDataSign.OPAQUE,
                ObjectivitySign.PERSONALISED,
            )
        )
        assert render_sign_lines(signs) == [
            "privacy: may be exploited",
            "code-data: opaque",
            "objectivity: personalised",
        ]

    def test_no_ai_rendering(self):
        signs = SystemSigns(NO_AI_TRIPLET, has_ai_services=False)
        assert render_sign_lines(signs)[1] == "code-data: no AI"
        assert render_sign_summary(signs) == "not gathered / no AI / indistinct"
