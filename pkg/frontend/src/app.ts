// Application shell: hash routing between the service demo, the
// factsheets, and the dashboard, with the sign bar always visible.

import { GatewayClient } from './api.js';
import { ConsentPrompt, type ConsentGateBody } from './consent.js';
import { Dashboard } from './dashboard.js';
import { FactsheetView } from './factsheets.js';
import { SignBar } from './signs.js';

type Route = 'services' | 'factsheets' | 'dashboard';

function routeFromHash(hash: string): Route {
  if (hash.startsWith('#/factsheets')) return 'factsheets';
  if (hash.startsWith('#/dashboard')) return 'dashboard';
  return 'services';
}

export class App {
  readonly client: GatewayClient;
  readonly signBar: SignBar;
  readonly factsheets: FactsheetView;
  readonly dashboard: Dashboard;
  prompt: ConsentPrompt | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly signBarElement: HTMLElement,
    baseUrl = '',
  ) {
    this.client = new GatewayClient(baseUrl);
    this.signBar = new SignBar(this.client, (html) => {
      this.signBarElement.innerHTML = html;
    });
    this.factsheets = new FactsheetView(this.client);
    this.dashboard = new Dashboard(this.client);
  }

  async start(): Promise<void> {
    await this.signBar.refresh();
    this.signBar.startPolling();
    window.addEventListener('hashchange', () => void this.renderRoute());
    this.root.addEventListener('click', (event) => void this.onClick(event));
    this.root.addEventListener('change', (event) => void this.onChange(event));
    await this.renderRoute();
  }

  setToken(token: string): void {
    this.client.setToken(token || null);
    void this.renderRoute();
  }

  // -- routing ----------------------------------------------------------------

  async renderRoute(): Promise<void> {
    const route = routeFromHash(window.location.hash);
    if (route === 'factsheets') {
      await this.renderFactsheets();
    } else if (route === 'dashboard') {
      await this.renderDashboard();
    } else {
      await this.renderServices();
    }
  }

  private async renderServices(): Promise<void> {
    const { body } = await this.client.getTransparencyFactsheet();
    const buttons = body.rows
      .map(
        (row) =>
          `<li>${row.service_id} ` +
          `<button class="use-service" data-service="${row.service_id}" ` +
          `data-categories="${row.data_categories.join(',')}">use</button></li>`,
      )
      .join('');
    this.root.innerHTML =
      `<h2>Services</h2><ul class="service-list">${buttons}</ul>` +
      `<div id="service-result"></div><div id="consent-area"></div>`;
  }

  private async renderFactsheets(): Promise<void> {
    const granted = new Set<string>();
    if (this.client.hasToken()) {
      const { status, body } = await this.client.listConsents();
      if (status === 200) {
        for (const grant of body.grants as { service_id: string }[]) {
          granted.add(grant.service_id);
        }
      }
    }
    const privacy = await this.factsheets.loadPrivacyHtml(granted);
    const transparency = await this.factsheets.loadTransparencyHtml();
    this.root.innerHTML =
      `<h2>Data privacy factsheet</h2>${privacy}` +
      `<h2>AI transparency factsheet</h2>${transparency}`;
  }

  private async renderDashboard(): Promise<void> {
    await this.dashboard.browse();
    const traceView = await this.dashboard.loadTrace();
    this.root.innerHTML =
      `<h2>My data</h2>` +
      `<div class="dashboard-actions">` +
      `<button id="erase-all">erase all</button>` +
      `<button id="export-package">download my data</button>` +
      `</div>` +
      `<div id="records">${this.dashboard.renderRecords()}</div>` +
      `<h2>Audit trace</h2><div id="trace">${this.dashboard.renderTrace(traceView)}</div>` +
      `<h2>Complaint</h2><textarea id="complaint-text" rows="3"></textarea>` +
      `<button id="file-complaint">file complaint</button><span id="complaint-result"></span>`;
  }

  // -- interactions ------------------------------------------------------------

  private async onClick(event: Event): Promise<void> {
    const target = event.target as HTMLElement;
    if (target.matches('.use-service')) {
      await this.useService(
        target.dataset['service']!,
        (target.dataset['categories'] || '').split(',').filter(Boolean),
      );
    } else if (target.matches('.grant-service') && this.prompt) {
      await this.prompt.grantService(target.dataset['service']!);
      this.refreshPromptArea();
    } else if (target.matches('.grant-bundle') && this.prompt) {
      await this.prompt.grantBundle(target.dataset['bundle']!);
      this.refreshPromptArea();
    } else if (target.matches('.deny-all') && this.prompt) {
      this.prompt.denyAll();
      this.refreshPromptArea();
    } else if (target.id === 'erase-all') {
      const erased = await this.dashboard.eraseAll();
      const records = document.getElementById('records');
      if (records) records.innerHTML = this.dashboard.renderRecords();
      this.note(`erased ${erased} records`);
    } else if (target.id === 'export-package') {
      const data = await this.dashboard.downloadPackage();
      const blob = new Blob([JSON.stringify(data, null, 2)], {
        type: 'application/json',
      });
      const link = document.createElement('a');
      link.href = URL.createObjectURL(blob);
      link.download = 'my-data.json';
      link.click();
      URL.revokeObjectURL(link.href);
    } else if (target.matches('.rectify')) {
      const text = window.prompt('new value for this record:');
      if (text) {
        await this.dashboard.rectify(target.dataset['record']!, text);
        const records = document.getElementById('records');
        if (records) records.innerHTML = this.dashboard.renderRecords();
      }
    } else if (target.id === 'file-complaint') {
      const textarea = document.getElementById('complaint-text') as HTMLTextAreaElement;
      const { body } = await this.client.fileComplaint(textarea.value);
      this.note(`complaint recorded: ${body.receipt_id}`, 'complaint-result');
    }
  }

  private async onChange(event: Event): Promise<void> {
    const target = event.target as HTMLInputElement;
    if (target.matches('.consent-toggle')) {
      // factsheet row toggle: one consent call per toggle
      const serviceId = target.dataset['service']!;
      const row = target.closest('tr');
      const categories =
        row?.querySelector('td:nth-child(2)')?.textContent?.split(', ') ?? [];
      await this.factsheets.onToggle(serviceId, target.checked, categories);
    } else if (target.matches('.consent-prompt input[type="checkbox"]') && this.prompt) {
      this.prompt.setToggle(
        target.dataset['service']!,
        target.dataset['category']!,
        target.checked,
      );
    }
  }

  async useService(serviceId: string, categories: string[]): Promise<void> {
    const { status, body } = await this.client.accessService(serviceId, categories);
    const result = document.getElementById('service-result');
    const consentArea = document.getElementById('consent-area');
    if (status === 428) {
      this.prompt = new ConsentPrompt(this.client);
      await this.prompt.load(body as unknown as ConsentGateBody);
      if (consentArea) consentArea.innerHTML = this.prompt.render();
      if (result) result.innerHTML = '<p>waiting for explicit consent…</p>';
    } else if (status === 200) {
      if (consentArea) consentArea.innerHTML = '';
      const records = (body as { records?: unknown[] }).records ?? [];
      if (result) {
        result.innerHTML = `<p>service ran over a view of ${records.length} records.</p>`;
      }
    } else if (status === 403) {
      if (result) {
        const missing = (body as { missing_categories?: string[] }).missing_categories;
        result.innerHTML = `<p>denied; missing consent for: ${missing?.join(', ')}</p>`;
      }
    } else if (result) {
      result.innerHTML = `<p>error ${status}</p>`;
    }
  }

  private refreshPromptArea(): void {
    const consentArea = document.getElementById('consent-area');
    if (!consentArea || !this.prompt) return;
    if (this.prompt.outcome === 'open' && this.prompt.pending.length > 0) {
      consentArea.innerHTML = this.prompt.render();
    } else if (this.prompt.outcome === 'denied') {
      consentArea.innerHTML =
        '<p>Consent denied. The service stays blocked and no data was shared.</p>';
    } else {
      consentArea.innerHTML = '<p>Consent recorded. You can use the service now.</p>';
    }
  }

  private note(text: string, id = 'service-result'): void {
    const element = document.getElementById(id);
    if (element) element.textContent = text;
  }
}
