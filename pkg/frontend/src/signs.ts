// Sign bar state: always reflects the most recent headers received, with a
// slow poll of /signs as fallback when no traffic is flowing.

import type { GatewayClient, SignState, SignValues } from './api.js';
import { renderGlyph, signGlyphs } from './glyphs.js';

export const POLL_INTERVAL_MS = 5_000;

export class SignBar {
  state: SignState | null = null;
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private readonly client: GatewayClient,
    private readonly onChange: (html: string) => void = () => {},
  ) {
    client.onSigns((signs) => this.applyHeaderSigns(signs));
  }

  applyHeaderSigns(signs: SignValues): void {
    // headers cannot lower has_ai_services knowledge obtained from /signs
    const hasAi = this.state?.has_ai_services ?? true;
    const coerced = this.state?.objectivity_coerced ?? false;
    this.state = { signs, has_ai_services: hasAi, objectivity_coerced: coerced };
    this.onChange(this.render());
  }

  async refresh(): Promise<void> {
    const { status, body } = await this.client.getSigns();
    if (status === 200) {
      this.state = {
        signs: body.signs,
        has_ai_services: body.has_ai_services,
        objectivity_coerced: body.objectivity_coerced,
      };
      this.onChange(this.render());
    }
  }

  startPolling(intervalMs: number = POLL_INTERVAL_MS): void {
    this.stopPolling();
    this.timer = setInterval(() => void this.refresh(), intervalMs);
  }

  stopPolling(): void {
    if (this.timer !== null) clearInterval(this.timer);
    this.timer = null;
  }

  render(): string {
    if (!this.state) return '<span class="sign-bar-loading">signs…</span>';
    const glyphs = signGlyphs(this.state.signs, this.state.has_ai_services);
    const coercion = this.state.objectivity_coerced
      ? '<span class="coerced-badge" title="The aggregate could not guarantee indistinct output and was coerced to personalised">coerced</span>'
      : '';
    return (
      `<a href="#/factsheets" class="sign-bar-link" aria-label="open transparency factsheets">` +
      glyphs.map(renderGlyph).join('') +
      `</a>${coercion}`
    );
  }
}
