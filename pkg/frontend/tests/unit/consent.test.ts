// Consent prompt model: default-off toggles, single-call grants, silent
// denial.

import { beforeEach, describe, expect, it } from 'vitest';
import { GatewayClient } from '../../src/api.js';
import { ConsentPrompt } from '../../src/consent.js';
import { FakeGateway, PRIVACY_FACTSHEET } from './fakes.js';

const GATE_BODY = {
  consent_required: true,
  pending: ['gallery', 'route', 'traffic'],
  factsheet: '/factsheets/privacy',
};

describe('ConsentPrompt', () => {
  let gateway: FakeGateway;
  let client: GatewayClient;
  let prompt: ConsentPrompt;

  beforeEach(async () => {
    gateway = new FakeGateway();
    gateway.on('GET', '/factsheets/privacy', () => ({
      status: 200,
      body: PRIVACY_FACTSHEET,
    }));
    gateway.on('POST', '/consents', (req) => {
      const body = req.body as { service_id: string };
      const pending = GATE_BODY.pending.filter((s) => s !== body.service_id);
      return { status: 200, body: { grant: req.body, pending } };
    });
    client = new GatewayClient('', gateway.fetch);
    client.setToken('u1');
    prompt = new ConsentPrompt(client);
    await prompt.load(GATE_BODY);
  });

  it('starts with every toggle off', () => {
    for (const row of prompt.rows) {
      for (const category of row.data_categories) {
        expect(prompt.toggles.get(row.service_id)?.get(category)).toBe(false);
      }
    }
    expect(prompt.enabledCategories('route')).toEqual([]);
  });

  it('renders no pre-checked checkbox', () => {
    const html = prompt.render();
    expect(html).toContain('type="checkbox"');
    expect(html).not.toContain('checked');
  });

  it('loading the prompt issues no personal-data request', () => {
    expect(client.personalDataRequests()).toEqual([]);
  });

  it('denying all issues no network calls', () => {
    const before = gateway.requests.length;
    prompt.denyAll();
    expect(gateway.requests.length).toBe(before);
    expect(prompt.outcome).toBe('denied');
  });

  it('granting one service issues exactly one consent call', async () => {
    prompt.setToggle('route', 'location', true);
    const before = gateway.requests.filter((r) => r.path === '/consents').length;
    await prompt.grantService('route');
    const calls = gateway.requests.filter((r) => r.path === '/consents');
    expect(calls.length).toBe(before + 1);
    expect(calls.at(-1)?.body).toEqual({
      service_id: 'route',
      categories: ['location'],
    });
  });

  it('bundle grant issues one call per member service', async () => {
    prompt.setToggle('route', 'location', true);
    prompt.setToggle('traffic', 'navigation', true);
    await prompt.grantBundle('travel');
    const calls = gateway.requests.filter((r) => r.path === '/consents');
    expect(calls.map((c) => (c.body as { service_id: string }).service_id)).toEqual([
      'route',
      'traffic',
    ]);
  });

  it('tracks remaining pending services after a grant', async () => {
    await prompt.grantService('gallery');
    expect(prompt.pending).toEqual(['route', 'traffic']);
    expect(prompt.outcome).toBe('open');
  });
});
