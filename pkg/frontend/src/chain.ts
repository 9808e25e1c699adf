// Client-side verification of the audit trace hash chain, independent of
// the backend: canonical JSON (sorted keys, compact separators, raw
// unicode) of [previous_chain, record_without_chain], hashed with SHA-256.
//
// A per-user trace is a filtered projection of the global log, so each
// exported record carries the chain value of its global predecessor
// (prev_chain); every link is checked on its own, plus seq monotonicity
// and continuity between adjacent trace records.

import type { TraceRecord } from './api.js';

export const GENESIS_CHAIN = '0'.repeat(64);

export interface TraceEntry extends TraceRecord {
  prev_chain: string;
}

export function canonicalJson(value: unknown): string {
  if (value === null || typeof value !== 'object') {
    return JSON.stringify(value);
  }
  if (Array.isArray(value)) {
    return '[' + value.map(canonicalJson).join(',') + ']';
  }
  const entries = Object.entries(value as Record<string, unknown>)
    .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0))
    .map(([key, val]) => JSON.stringify(key) + ':' + canonicalJson(val));
  return '{' + entries.join(',') + '}';
}

export async function sha256Hex(text: string): Promise<string> {
  const digest = await crypto.subtle.digest('SHA-256', new TextEncoder().encode(text));
  return Array.from(new Uint8Array(digest))
    .map((byte) => byte.toString(16).padStart(2, '0'))
    .join('');
}

export interface ChainVerification {
  ok: boolean;
  firstBadSeq: number | null;
  checked: number;
}

export async function verifyTrace(records: TraceEntry[]): Promise<ChainVerification> {
  let checked = 0;
  let previous: TraceEntry | null = null;
  for (const record of records) {
    const { chain, prev_chain, ...body } = record;
    const expected = await sha256Hex(canonicalJson([prev_chain, body]));
    const linkOk =
      expected === chain &&
      (record.seq > 1 || prev_chain === GENESIS_CHAIN) &&
      (previous === null || record.seq > previous.seq) &&
      // adjacent globally => must chain directly to each other
      (previous === null || record.seq !== previous.seq + 1 || prev_chain === previous.chain);
    if (!linkOk) {
      return { ok: false, firstBadSeq: record.seq, checked };
    }
    previous = record;
    checked += 1;
  }
  return { ok: true, firstBadSeq: null, checked };
}
