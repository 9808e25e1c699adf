// Factsheet tables: the privacy sheet (which data, which purpose, how
// long, who has access — consent toggles all off) and the transparency
// sheet (per-service signs and artifact links).

import type {
  GatewayClient,
  PrivacyFactsheet,
  TransparencyFactsheet,
  TransparencyRow,
} from './api.js';
import { renderGlyph, signGlyphs } from './glyphs.js';

export function renderPrivacyFactsheet(
  sheet: PrivacyFactsheet,
  granted: Set<string> = new Set(),
): string {
  const header =
    '<tr><th>service</th><th>which data?</th><th>purpose</th>' +
    '<th>how long?</th><th>who has access?</th><th>consent</th></tr>';
  const rows = sheet.rows
    .map((row) => {
      const categories = row.data_categories
        .map((c) => sheet.vocabulary.categories[c] ?? c)
        .join(', ');
      const purpose = sheet.vocabulary.purposes[row.purpose] ?? row.purpose;
      const accessors = row.accessors.map((a) => `${a.name} (${a.kind})`).join(', ');
      // consent is never pre-enabled by the sheet itself; a checked box only
      // reflects a grant the user already made
      const checked = granted.has(row.service_id) ? ' checked' : '';
      const bundle = row.bundle_id ? ` <span class="bundle-tag">${row.bundle_id}</span>` : '';
      return (
        `<tr data-service="${row.service_id}">` +
        `<td>${row.service_id}${bundle}</td><td>${categories}</td>` +
        `<td>${purpose}</td><td>${row.retention.replaceAll('_', ' ')}</td>` +
        `<td>${accessors}</td>` +
        `<td><label class="toggle"><input type="checkbox" class="consent-toggle" ` +
        `data-service="${row.service_id}"${checked}> allow</label></td></tr>`
      );
    })
    .join('');
  return `<table class="factsheet privacy-factsheet">${header}${rows}</table>`;
}

function artifactLinks(row: TransparencyRow): string {
  if (row.artifact_links.length === 0) return '<em>none</em>';
  return row.artifact_links
    .map(
      (link) =>
        `<a href="/services/${row.service_id}/artifacts/${link.kind}" download>` +
        `${link.kind.replaceAll('_', ' ')}</a>`,
    )
    .join(' · ');
}

export function renderTransparencyFactsheet(sheet: TransparencyFactsheet): string {
  const header =
    '<tr><th>service</th><th>purpose</th><th>personal data</th>' +
    '<th>signs</th><th>artifacts</th></tr>';
  const rows = sheet.rows
    .map((row) => {
      const purpose = sheet.vocabulary.purposes[row.purpose] ?? row.purpose;
      const categories =
        row.data_categories
          .map((c) => sheet.vocabulary.categories[c] ?? c)
          .join(', ') || '<em>none</em>';
      const glyphs = signGlyphs(row.signs, true).map(renderGlyph).join('');
      return (
        `<tr data-service="${row.service_id}">` +
        `<td>${row.service_id}</td><td>${purpose}</td><td>${categories}</td>` +
        `<td>${glyphs}</td><td>${artifactLinks(row)}</td></tr>`
      );
    })
    .join('');
  const coercion = sheet.aggregate.objectivity_coerced
    ? '<p class="coerced-note">The systemwide objectivity sign was coerced to ' +
      'personalised: the combination of services cannot guarantee indistinct output.</p>'
    : '';
  const aggregate = signGlyphs(
    sheet.aggregate.signs,
    sheet.aggregate.has_ai_services,
  )
    .map(renderGlyph)
    .join('');
  return (
    `<div class="aggregate-signs">system signs: ${aggregate}</div>` +
    coercion +
    `<table class="factsheet transparency-factsheet">${header}${rows}</table>`
  );
}

export class FactsheetView {
  constructor(private readonly client: GatewayClient) {}

  /** Toggling a privacy row issues exactly one consent call. */
  async onToggle(serviceId: string, enabled: boolean, categories: string[]): Promise<void> {
    if (enabled) {
      await this.client.grantConsent(serviceId, categories);
    } else {
      await this.client.revokeConsent(serviceId);
    }
  }

  async loadPrivacyHtml(granted: Set<string>): Promise<string> {
    const { body } = await this.client.getPrivacyFactsheet();
    return renderPrivacyFactsheet(body, granted);
  }

  async loadTransparencyHtml(): Promise<string> {
    const { body } = await this.client.getTransparencyFactsheet();
    return renderTransparencyFactsheet(body);
  }
}
