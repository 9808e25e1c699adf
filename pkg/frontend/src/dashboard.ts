// Subject-access dashboard: browse stored personal data by category and
// source, rectify or erase it, inspect the chain-verified audit trace,
// and download the full data package.

import type { DataRecord, GatewayClient, TraceDocument } from './api.js';
import { verifyTrace, type ChainVerification, type TraceEntry } from './chain.js';

export interface TraceView {
  trace: TraceDocument;
  verification: ChainVerification;
}

function decodePayload(payloadB64: string): string {
  try {
    return atob(payloadB64);
  } catch {
    return `(binary, ${payloadB64.length} base64 chars)`;
  }
}

export class Dashboard {
  records: DataRecord[] = [];
  categoryFilter: string[] = [];
  sourceFilter: string[] = [];

  constructor(private readonly client: GatewayClient) {}

  async browse(): Promise<DataRecord[]> {
    const { body } = await this.client.myData(
      this.categoryFilter.length ? this.categoryFilter : undefined,
      this.sourceFilter.length ? this.sourceFilter : undefined,
    );
    this.records = body.records;
    return this.records;
  }

  async eraseAll(): Promise<number> {
    const { body } = await this.client.requestErasure();
    await this.browse();
    return body.erased;
  }

  async eraseCategories(categories: string[]): Promise<number> {
    const { body } = await this.client.requestErasure(categories);
    await this.browse();
    return body.erased;
  }

  async rectify(recordId: string, newText: string): Promise<number> {
    const { body } = await this.client.requestRectification(recordId, btoa(newText));
    await this.browse();
    return body.version;
  }

  async loadTrace(): Promise<TraceView> {
    const { body } = await this.client.getTrace();
    const verification = await verifyTrace(body.records as TraceEntry[]);
    return { trace: body, verification };
  }

  async downloadPackage(): Promise<Record<string, unknown>> {
    const { body } = await this.client.exportMyData();
    return body;
  }

  renderRecords(): string {
    if (this.records.length === 0) {
      return '<p class="empty">No personal data stored.</p>';
    }
    const header =
      '<tr><th>id</th><th>category</th><th>payload</th>' +
      '<th>source</th><th>version</th><th>actions</th></tr>';
    const rows = this.records
      .map(
        (record) =>
          `<tr data-record="${record.record_id}">` +
          `<td>${record.record_id}</td><td>${record.category}</td>` +
          `<td><code>${decodePayload(record.payload)}</code></td>` +
          `<td>${record.source.replaceAll('_', ' ')}` +
          (record.provenance ? ` — ${record.provenance}` : '') +
          `</td><td>v${record.version}</td>` +
          `<td><button class="rectify" data-record="${record.record_id}">rectify</button></td></tr>`,
      )
      .join('');
    return `<table class="records-table">${header}${rows}</table>`;
  }

  renderTrace(view: TraceView): string {
    const badge = view.verification.ok
      ? '<span class="badge badge-ok" title="every exported record matches its hash chain link">chain verified</span>'
      : `<span class="badge badge-bad">chain BROKEN at seq ${view.verification.firstBadSeq}</span>`;
    const rows = view.trace.records
      .map(
        (record) =>
          `<tr><td>${record.seq}</td><td>${record.origin.replaceAll('_', ' ')}</td>` +
          `<td>${record.at}</td><td>${record.detail}</td></tr>`,
      )
      .join('');
    return (
      `<div class="trace-header">${view.trace.record_count} audit records ${badge}</div>` +
      `<table class="trace-table"><tr><th>seq</th><th>origin</th><th>when</th><th>detail</th></tr>${rows}</table>`
    );
  }
}
