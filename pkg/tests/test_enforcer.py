"""Enforcer: filters, views, denials, leak-freedom, audit coupling."""

from __future__ import annotations

import random

import pytest

from clearsign.audit import AuditLog, AuditOrigin
from clearsign.consent import ConsentStore
from clearsign.enforcer import (
    Denial,
    Enforcer,
    FilteredView,
    StorageFailureError,
    ViewNotFoundError,
    describe_filter,
)
from clearsign.records import RecordStore
from clearsign.registry import UnknownServiceError

from conftest import route_service


@pytest.fixture
def enforcer(demo_registry, consent, records, audit):
    return Enforcer(demo_registry, consent, records, audit)


class TestBuildFilter:
    def test_no_grants_means_empty_allow(self, enforcer):
        f = enforcer.build_filter("u1", "route")
        assert f.allowed_categories == frozenset()

    def test_partial_grant(self, enforcer, consent):
        consent.grant("u1", "route", {"location"})
        f = enforcer.build_filter("u1", "route")
        assert f.allowed_categories == frozenset({"location"})

    def test_per_category_permission_oracle(self, enforcer, consent):
        consent.grant("u1", "route", {"location", "navigation"})
        f = enforcer.build_filter("u1", "route")
        declared = {"location", "navigation"}
        expected = {
            c for c in declared if consent.is_permitted("u1", "route", c, "route-planning")
        }
        assert f.allowed_categories == expected

    def test_stale_grant_yields_empty_allow(self, enforcer, consent, demo_registry):
        consent.grant("u1", "route", {"location"})
        demo_registry.register_service(
            "demo", route_service(data_categories=frozenset({"location", "images"}))
        )
        assert enforcer.build_filter("u1", "route").allowed_categories == frozenset()

    def test_unknown_service(self, enforcer):
        with pytest.raises(UnknownServiceError):
            enforcer.build_filter("u1", "nope")


class TestDescribeFilter:
    def test_empty_allow_set(self, enforcer):
        f = enforcer.build_filter("u1", "route")
        assert " allow={} " in describe_filter(f)

    def test_sorted_categories(self, enforcer, consent):
        consent.grant("u1", "route", {"navigation", "location"})
        f = enforcer.build_filter("u1", "route")
        assert "allow={location,navigation}" in describe_filter(f)

    def test_format_shape(self, enforcer, consent):
        consent.grant("u1", "route", {"location"})
        f = enforcer.build_filter("u1", "route")
        line = describe_filter(f)
        assert line.startswith("user=u1 service=route@")
        assert " purpose=route-planning " in line
        assert " consent=" in line

    def test_equal_filters_equal_strings(self, enforcer, consent):
        consent.grant("u1", "route", {"location"})
        a = describe_filter(enforcer.build_filter("u1", "route"))
        b = describe_filter(enforcer.build_filter("u1", "route"))
        assert a == b

    def test_distinct_filters_distinct_strings(self, enforcer, consent):
        seen = set()
        filters = []
        filters.append(enforcer.build_filter("u1", "route"))
        consent.grant("u1", "route", {"location"})
        filters.append(enforcer.build_filter("u1", "route"))
        consent.grant("u2", "route", {"navigation"})
        filters.append(enforcer.build_filter("u2", "route"))
        filters.append(enforcer.build_filter("u2", "gallery"))
        for f in filters:
            line = describe_filter(f)
            assert line not in seen
            seen.add(line)


class TestMaterializeView:
    def test_filters_records_by_allowed_category(self, enforcer, consent, records):
        records.put_record("u1", "location", b"a")
        records.put_record("u1", "location", b"b")
        records.put_record("u1", "images", b"c")
        consent.grant("u1", "route", {"location"})
        view = enforcer.materialize_view("u1", "route")
        assert len(view.records) == 2
        assert {r.category for r in view.records} == {"location"}

    def test_no_grants_yields_empty_view_still_audited(self, enforcer, records, audit):
        records.put_record("u1", "location", b"a")
        before = len(audit)
        view = enforcer.materialize_view("u1", "route")
        assert view.records == ()
        assert len(audit) == before + 1
        assert audit.records()[-1].origin is AuditOrigin.SERVICE_EXECUTION

    def test_determinism_across_calls(self, enforcer, consent, records, audit):
        records.put_record("u1", "location", b"a")
        consent.grant("u1", "route", {"location"})
        audit_before = len(audit)
        v1 = enforcer.materialize_view("u1", "route")
        v2 = enforcer.materialize_view("u1", "route")
        assert v1.record_set_digest() == v2.record_set_digest()
        assert v1.data_version == v2.data_version
        assert v1.view_id != v2.view_id
        assert len(audit) == audit_before + 2

    def test_service_execution_records_have_all_fields(self, enforcer, consent, records, audit):
        records.put_record("u1", "location", b"a")
        consent.grant("u1", "route", {"location"})
        enforcer.materialize_view("u1", "route")
        record = audit.records()[-1]
        assert record.data_version
        assert record.filter_description.startswith("user=u1 service=route@")
        assert record.service_version
        assert record.at

    def test_third_party_share_origin(self, enforcer, consent, records, audit):
        consent.grant("u1", "gallery", {"images"})
        enforcer.materialize_view("u1", "gallery", origin=AuditOrigin.THIRD_PARTY_SHARE)
        assert audit.records()[-1].origin is AuditOrigin.THIRD_PARTY_SHARE

    def test_storage_failure_is_audited_and_no_view_created(
        self, enforcer, consent, records, audit, monkeypatch
    ):
        records.put_record("u1", "location", b"a")
        consent.grant("u1", "route", {"location"})

        def broken(*args, **kwargs):
            raise OSError("disk on fire")

        monkeypatch.setattr(records, "get_records", broken)
        views_before = len(enforcer.views_of("u1"))
        with pytest.raises(StorageFailureError):
            enforcer.materialize_view("u1", "route")
        assert audit.records()[-1].origin is AuditOrigin.ENFORCEMENT_ERROR
        assert len(enforcer.views_of("u1")) == views_before


class TestEnforceAccess:
    def test_covered_request_returns_view(self, enforcer, consent, records):
        records.put_record("u1", "location", b"a")
        consent.grant("u1", "route", {"location"})
        outcome = enforcer.enforce_access("u1", "route", {"location"})
        assert isinstance(outcome, FilteredView)
        assert {r.category for r in outcome.records} == {"location"}

    def test_view_restricted_to_requested(self, enforcer, consent, records):
        records.put_record("u1", "location", b"a")
        records.put_record("u1", "navigation", b"b")
        consent.grant("u1", "route", {"location", "navigation"})
        outcome = enforcer.enforce_access("u1", "route", {"location"})
        assert {r.category for r in outcome.records} == {"location"}

    def test_uncovered_request_is_denied(self, enforcer, consent):
        consent.grant("u1", "route", {"location"})
        outcome = enforcer.enforce_access("u1", "route", {"location", "navigation"})
        assert isinstance(outcome, Denial)
        assert outcome.missing_categories == ("navigation",)

    def test_empty_request_is_vacuously_permitted(self, enforcer, audit):
        before = len(audit)
        outcome = enforcer.enforce_access("u1", "route", set())
        assert isinstance(outcome, FilteredView)
        assert outcome.records == ()
        assert len(audit) == before + 1

    def test_denial_is_audited_once(self, enforcer, consent, audit):
        before = len(audit)
        enforcer.enforce_access("u1", "route", {"location"})
        assert len(audit) == before + 1
        assert "denied" in audit.records()[-1].detail


class TestViewRegistry:
    def test_view_addressable(self, enforcer, consent, records):
        records.put_record("u1", "location", b"a")
        consent.grant("u1", "route", {"location"})
        view = enforcer.materialize_view("u1", "route")
        found, invalidated = enforcer.get_view(view.view_id)
        assert found == view
        assert invalidated is False

    def test_unknown_view(self, enforcer):
        with pytest.raises(ViewNotFoundError):
            enforcer.get_view("missing")

    def test_erasure_invalidates_but_preserves_contents(
        self, enforcer, consent, records
    ):
        records.put_record("u1", "location", b"a")
        consent.grant("u1", "route", {"location"})
        view = enforcer.materialize_view("u1", "route")
        digest_before = view.record_set_digest()
        records.erase("u1")
        found, invalidated = enforcer.get_view(view.view_id)
        assert invalidated is True
        assert found.record_set_digest() == digest_before


class TestLeakFreedom:
    def test_randomized_against_brute_force_oracle(self, demo_registry):
        """No materialized view may ever contain a record whose category
        lacks a live, version-current grant."""
        rng = random.Random(404)
        audit = AuditLog()
        records = RecordStore(demo_registry, audit)
        consent = ConsentStore(demo_registry, audit)
        enforcer = Enforcer(demo_registry, consent, records, audit)

        declared = {
            "route": ["location", "navigation"],
            "gallery": ["images"],
        }
        purposes = {"route": "route-planning", "gallery": "product-recommendation"}

        for step in range(500):
            user = rng.choice(["u1", "u2", "u3"])
            action = rng.choice(["put", "grant", "revoke", "erase", "enforce"])
            if action == "put":
                records.put_record(
                    user,
                    rng.choice(["location", "navigation", "images"]),
                    f"payload-{step}".encode(),
                )
            elif action == "grant":
                service = rng.choice(list(declared))
                cats = rng.sample(
                    declared[service], k=rng.randint(1, len(declared[service]))
                )
                consent.grant(user, service, cats)
            elif action == "revoke":
                consent.revoke(user, rng.choice(list(declared)))
            elif action == "erase":
                records.erase(user)
            else:
                service = rng.choice(list(declared))
                view = enforcer.materialize_view(user, service)
                # brute-force oracle: filter every live record directly
                allowed = {
                    c
                    for c in declared[service]
                    if consent.is_permitted(user, service, c, purposes[service])
                }
                oracle = [
                    r for r in records.get_records(user) if r.category in allowed
                ]
                assert sorted(r.record_id for r in view.records) == sorted(
                    r.record_id for r in oracle
                )
                for r in view.records:
                    assert r.category in allowed


class TestAuditCompleteness:
    def test_enforcement_op_count_equals_record_count(
        self, demo_registry
    ):
        rng = random.Random(99)
        audit = AuditLog()
        records = RecordStore(demo_registry, audit)
        consent = ConsentStore(demo_registry, audit)
        enforcer = Enforcer(demo_registry, consent, records, audit)

        enforcement_calls = 0
        for step in range(300):
            action = rng.choice(["put", "grant", "materialize", "access"])
            if action == "put":
                records.put_record("u1", "location", b"x")
            elif action == "grant":
                consent.grant("u1", "route", {"location"})
            elif action == "materialize":
                enforcer.materialize_view("u1", "route")
                enforcement_calls += 1
            else:
                enforcer.enforce_access("u1", "route", {"location", "navigation"})
                enforcement_calls += 1

        counts = audit.count_by_origin()
        enforcement_records = (
            counts[AuditOrigin.SERVICE_EXECUTION]
            + counts[AuditOrigin.ENFORCEMENT_ERROR]
        )
        assert enforcement_records == enforcement_calls
        assert audit.verify_integrity() is None
