"""Shared fixtures: a small demo system with data-using and data-free services.

Also collects the outcomes of the acceptance suite and prints one pass/fail
line per criterion in the terminal summary.
"""

from __future__ import annotations

import pytest

_ACCEPTANCE_OUTCOMES: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _ACCEPTANCE_OUTCOMES[name] = report.outcome


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _ACCEPTANCE_OUTCOMES.items():
        label = name.removeprefix("test_").replace("_", "-")
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{status} {label}")

from clearsign.audit import AuditLog
from clearsign.consent import ConsentStore
from clearsign.model import (
    AccessorEntity,
    AccessorKind,
    AIServiceDescriptor,
    RetentionPeriod,
)
from clearsign.records import RecordStore
from clearsign.registry import Registry

SELF = AccessorEntity("the system", AccessorKind.SYSTEM_ITSELF)
COMPANY_A = AccessorEntity("company A", AccessorKind.COMPANY)


def route_service(**kwargs) -> AIServiceDescriptor:
    base = dict(
        id="route",
        name="Route planning",
        purpose="route-planning",
        data_categories=frozenset({"location", "navigation"}),
        retention=RetentionPeriod.LESS_THAN_MONTH,
        accessors=frozenset({SELF}),
    )
    base.update(kwargs)
    return AIServiceDescriptor(**base)


def gallery_service(**kwargs) -> AIServiceDescriptor:
    base = dict(
        id="gallery",
        name="Photo curation",
        purpose="product-recommendation",
        data_categories=frozenset({"images"}),
        retention=RetentionPeriod.LESS_THAN_YEAR,
        accessors=frozenset({SELF, COMPANY_A}),
    )
    base.update(kwargs)
    return AIServiceDescriptor(**base)


def translator_service(**kwargs) -> AIServiceDescriptor:
    base = dict(
        id="translator",
        name="Language translation",
        purpose="language-translation",
    )
    base.update(kwargs)
    return AIServiceDescriptor(**base)


@pytest.fixture
def demo_registry() -> Registry:
    registry = Registry()
    registry.register_system("demo", "Demo system")
    registry.register_service("demo", route_service())
    registry.register_service("demo", gallery_service())
    registry.register_service("demo", translator_service())
    return registry


@pytest.fixture
def audit() -> AuditLog:
    return AuditLog()


@pytest.fixture
def consent(demo_registry, audit) -> ConsentStore:
    return ConsentStore(demo_registry, audit)


@pytest.fixture
def records(demo_registry, audit) -> RecordStore:
    return RecordStore(demo_registry, audit)
