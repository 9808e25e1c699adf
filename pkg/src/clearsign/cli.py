"""Operator command line: validate descriptors, derive signs, run the
gateway, export audit traces, and emit the bundled site fixtures."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import fixtures as fixture_lib
from .audit import AuditLog
from .gateway import GatewayConfig, SnapshotScheduler, build_runtime, create_app
from .model import canonical_json_bytes
from .registry import Registry, install_system_document, validate_system_document
from .signs import (
    aggregate_system_signs,
    derive_service_signs,
    encode_sign_headers,
    render_sign_summary,
)

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_PARSE = 2
EXIT_CHAIN = 3


def _read_document(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        click.echo(f"cannot read descriptor: {exc}", err=True)
        sys.exit(EXIT_PARSE)


@click.group()
@click.version_option()
def main() -> None:
    """Transparency-and-consent gateway toolkit."""


@main.command()
@click.argument("descriptor", type=click.Path())
def validate(descriptor: str) -> None:
    """Validate a system descriptor document; exit 0 only when clean."""
    doc = _read_document(descriptor)
    try:
        violations = validate_system_document(doc)
    except Exception as exc:
        click.echo(f"descriptor is not well-formed: {exc}", err=True)
        sys.exit(EXIT_PARSE)
    if violations:
        for v in violations:
            click.echo(f"{v.service_id}: {v.rule}: {v.detail}")
        sys.exit(EXIT_VIOLATIONS)
    click.echo("ok")


@main.command()
@click.argument("descriptor", type=click.Path())
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["text", "headers", "json"]),
    default="text",
    show_default=True,
)
def signs(descriptor: str, fmt: str) -> None:
    """Derive per-service signs, the system aggregate, and header values."""
    doc = _read_document(descriptor)
    try:
        violations = validate_system_document(doc)
        if violations:
            for v in violations:
                click.echo(f"{v.service_id}: {v.rule}: {v.detail}", err=True)
            sys.exit(EXIT_VIOLATIONS)
        registry = Registry()
        system_id = install_system_document(registry, doc)
    except SystemExit:
        raise
    except Exception as exc:
        click.echo(f"descriptor is not well-formed: {exc}", err=True)
        sys.exit(EXIT_PARSE)

    services = registry.system_services(system_id)
    triplets = {d.id: derive_service_signs(d) for d in services}
    system_signs = aggregate_system_signs(triplets.values())
    headers = encode_sign_headers(system_signs)

    if fmt == "headers":
        for name, value in headers:
            click.echo(f"{name}: {value}")
        return
    if fmt == "json":
        document = {
            "system_id": system_id,
            **system_signs.as_dict(),
            "headers": dict(headers),
            "services": {
                sid: t.as_dict() for sid, t in sorted(triplets.items())
            },
        }
        click.echo(canonical_json_bytes(document).decode("utf-8"))
        return
    for sid in sorted(triplets):
        t = triplets[sid]
        click.echo(
            f"service {sid}: {t.privacy.value} / {t.code_data.value} / {t.objectivity.value}"
        )
    click.echo(f"system: {render_sign_summary(system_signs)}")
    for name, value in headers:
        click.echo(f"{name}: {value}")


def _render_table(headers: list[str], rows: list[list[str]]) -> str:
    widths = [len(h) for h in headers]
    for row in rows:
        for index, cell in enumerate(row):
            widths[index] = max(widths[index], len(cell))

    def line(cells: list[str]) -> str:
        return "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(cells)).rstrip()

    separator = "  ".join("-" * w for w in widths)
    return "\n".join([line(headers), separator] + [line(r) for r in rows])


@main.command()
@click.argument("descriptor", type=click.Path())
@click.option(
    "--kind",
    type=click.Choice(["privacy", "transparency"]),
    default="privacy",
    show_default=True,
)
def factsheet(descriptor: str, kind: str) -> None:
    """Print a factsheet as an aligned plain-text table."""
    doc = _read_document(descriptor)
    try:
        registry = Registry()
        system_id = install_system_document(registry, doc)
    except Exception as exc:
        click.echo(f"descriptor is not well-formed: {exc}", err=True)
        sys.exit(EXIT_PARSE)

    if kind == "privacy":
        rows = [
            [
                row.service_id,
                ",".join(row.data_categories),
                row.purpose,
                row.retention.replace("_", " "),
                ";".join(a["name"] for a in row.accessors),
                "off",
            ]
            for row in registry.build_privacy_factsheet(system_id)
        ]
        click.echo(
            _render_table(
                ["service", "which data?", "purpose", "how long?", "who has access?", "consent"],
                rows,
            )
        )
    else:
        rows = [
            [
                row.service_id,
                row.purpose,
                ",".join(row.data_categories) or "-",
                f"{row.signs.privacy.value} / {row.signs.code_data.value} / {row.signs.objectivity.value}",
                ",".join(link["kind"] for link in row.artifact_links) or "-",
            ]
            for row in registry.build_transparency_factsheet(system_id)
        ]
        click.echo(
            _render_table(
                ["service", "purpose", "personal data", "signs", "artifacts"], rows
            )
        )


@main.command()
@click.argument("config_path", type=click.Path(exists=True))
def serve(config_path: str) -> None:
    """Run the gateway until interrupted."""
    import uvicorn

    config = GatewayConfig.load(config_path)
    runtime = build_runtime(config)
    app = create_app(runtime, config)
    scheduler = SnapshotScheduler(runtime, config.snapshot_cadence_hours)
    scheduler.start()
    try:
        uvicorn.run(app, host=config.listen_host, port=config.listen_port, log_level="warning")
    finally:
        scheduler.stop()


@main.command("audit-export")
@click.argument("user_id")
@click.option("--log", "log_path", type=click.Path(exists=True), required=True,
              help="Path to the audit log (audit.jsonl).")
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Write the trace document here instead of stdout.")
def audit_export(user_id: str, log_path: str, out_path: str | None) -> None:
    """Export one user's audit trace; fails if the chain does not verify."""
    log = AuditLog(log_path)
    bad_seq = log.verify_integrity()
    if bad_seq is not None:
        click.echo(f"audit chain verification failed at seq {bad_seq}", err=True)
        sys.exit(EXIT_CHAIN)
    trace = log.export_trace(user_id)
    payload = canonical_json_bytes(trace)
    if out_path:
        Path(out_path).write_bytes(payload + b"\n")
        click.echo(f"wrote {trace['record_count']} records to {out_path}")
    else:
        click.echo(payload.decode("utf-8"))


@main.command("consents-export")
@click.option("--store", "store_path", type=click.Path(exists=True), required=True,
              help="Path to the consent store file (consents.json).")
@click.option("--out", "out_path", type=click.Path(), default=None)
def consents_export(store_path: str, out_path: str | None) -> None:
    """Emit the live grant set as canonical JSON."""
    from .consent import ConsentStore

    store = ConsentStore(Registry(), AuditLog(), path=store_path)
    payload = store.export_grants()
    if out_path:
        Path(out_path).write_bytes(payload + b"\n")
        click.echo(f"wrote {len(store.live_grants())} grants to {out_path}")
    else:
        click.echo(payload.decode("utf-8"))


@main.command("fixtures")
@click.argument("name", required=False)
@click.option("--list", "list_only", is_flag=True, help="List fixture names.")
@click.option("--write", "write_dir", type=click.Path(), default=None,
              help="Write every fixture document into this directory.")
def fixtures_cmd(name: str | None, list_only: bool, write_dir: str | None) -> None:
    """Work with the bundled site survey fixtures."""
    if list_only:
        for fixture_name in fixture_lib.fixture_names():
            click.echo(fixture_name)
        return
    if write_dir:
        written = fixture_lib.write_fixtures(write_dir)
        click.echo(f"wrote {len(written)} documents to {write_dir}")
        return
    if not name:
        raise click.UsageError("pass a fixture name, --list, or --write DIR")
    click.echo(json.dumps(fixture_lib.build_fixture(name), indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
