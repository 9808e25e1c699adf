// First-contact consent prompt: shown when the gateway answers 428.
// Every toggle starts off; granting is the only action that talks to the
// consent endpoints, and denying everything issues no network calls at all.

import type { Bundle, GatewayClient, PrivacyFactsheet, PrivacyRow } from './api.js';
import { renderGlyph, signGlyphs } from './glyphs.js';

export interface ConsentGateBody {
  consent_required: boolean;
  pending: string[];
  factsheet: string;
}

export type PromptOutcome = 'granted' | 'denied' | 'open';

export class ConsentPrompt {
  pending: string[] = [];
  rows: PrivacyRow[] = [];
  bundles: Bundle[] = [];
  vocabulary: PrivacyFactsheet['vocabulary'] = { purposes: {}, categories: {} };
  // service id -> category -> enabled; everything starts disabled
  toggles = new Map<string, Map<string, boolean>>();
  outcome: PromptOutcome = 'open';

  constructor(private readonly client: GatewayClient) {}

  /** Populate from a 428 body plus the privacy factsheet it points at. */
  async load(gate: ConsentGateBody): Promise<void> {
    const { body } = await this.client.getPrivacyFactsheet();
    this.pending = [...gate.pending];
    this.rows = body.rows.filter((row) => gate.pending.includes(row.service_id));
    this.bundles = body.bundles.filter((bundle) =>
      bundle.service_ids.some((sid) => gate.pending.includes(sid)),
    );
    this.vocabulary = body.vocabulary;
    this.toggles = new Map(
      this.rows.map((row) => [
        row.service_id,
        // explicit consent: all options disabled by default
        new Map(row.data_categories.map((category) => [category, false])),
      ]),
    );
    this.outcome = 'open';
  }

  setToggle(serviceId: string, category: string, enabled: boolean): void {
    this.toggles.get(serviceId)?.set(category, enabled);
  }

  enabledCategories(serviceId: string): string[] {
    const categories = this.toggles.get(serviceId);
    if (!categories) return [];
    return [...categories.entries()].filter(([, on]) => on).map(([c]) => c);
  }

  /** Grant one service with its enabled categories: exactly one call. */
  async grantService(serviceId: string): Promise<string[]> {
    const { body } = await this.client.grantConsent(
      serviceId,
      this.enabledCategories(serviceId),
    );
    this.pending = body.pending;
    if (this.pending.length === 0) this.outcome = 'granted';
    return this.pending;
  }

  /** Bundle-level grant: one call per member service, enabled categories. */
  async grantBundle(bundleId: string): Promise<string[]> {
    const bundle = this.bundles.find((b) => b.bundle_id === bundleId);
    if (!bundle) return this.pending;
    for (const serviceId of bundle.service_ids) {
      if (this.toggles.has(serviceId)) {
        await this.grantService(serviceId);
      }
    }
    return this.pending;
  }

  /** Denying issues no network requests; the system stays gated. */
  denyAll(): void {
    this.outcome = 'denied';
  }

  render(): string {
    const bundleControls = this.bundles
      .map(
        (bundle) =>
          `<button class="grant-bundle" data-bundle="${bundle.bundle_id}">` +
          `grant bundle ${bundle.bundle_id} (${bundle.service_ids.length} services)</button>`,
      )
      .join('');
    const rows = this.rows
      .map((row) => {
        const purposeLabel = this.vocabulary.purposes[row.purpose] ?? row.purpose;
        const checkboxes = row.data_categories
          .map((category) => {
            const label = this.vocabulary.categories[category] ?? category;
            return (
              `<label class="toggle"><input type="checkbox" ` +
              `data-service="${row.service_id}" data-category="${category}"> ${label}</label>`
            );
          })
          .join('');
        return (
          `<div class="prompt-row" data-service="${row.service_id}">` +
          `<h3>${row.service_id}</h3>` +
          `<p>purpose: ${purposeLabel} · retention: ${row.retention} · ` +
          `access: ${row.accessors.map((a) => a.name).join(', ')}</p>` +
          `<div class="toggles">${checkboxes}</div>` +
          `<button class="grant-service" data-service="${row.service_id}">grant</button>` +
          `</div>`
        );
      })
      .join('');
    return (
      `<section class="consent-prompt" role="dialog" aria-label="consent required">` +
      `<h2>Explicit consent required</h2>` +
      `<p>The services below want access to personal data. Nothing is shared ` +
      `until you grant it; all options start off.</p>` +
      rows +
      bundleControls +
      `<button class="deny-all">deny all</button>` +
      `<a href="/factsheets/privacy">full privacy factsheet</a>` +
      `</section>`
    );
  }
}

export function renderSignPreview(rows: { signs: { privacy: string; code_data: string; objectivity: string } }[]): string {
  return rows
    .map((row) => signGlyphs(row.signs, true).map(renderGlyph).join(''))
    .join('<br>');
}
