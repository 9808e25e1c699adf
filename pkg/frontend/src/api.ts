// Gateway HTTP client. Captures the transparency headers from every
// response and keeps a call log so tests (and the prompt logic itself) can
// prove that no personal-data request happens before a grant exists.

export interface SignValues {
  privacy: string;
  code_data: string;
  objectivity: string;
}

export interface SignState {
  signs: SignValues;
  has_ai_services: boolean;
  objectivity_coerced: boolean;
}

export type RequestKind = 'transparency' | 'consent' | 'personal-data';

export interface CallLogEntry {
  method: string;
  path: string;
  kind: RequestKind;
  status: number;
}

export interface ApiResponse<T = unknown> {
  status: number;
  body: T;
}

export interface PrivacyRow {
  service_id: string;
  data_categories: string[];
  purpose: string;
  retention: string;
  accessors: { name: string; kind: string }[];
  default_granted: boolean;
  bundle_id: string | null;
}

export interface TransparencyRow {
  service_id: string;
  purpose: string;
  data_categories: string[];
  signs: SignValues;
  artifact_links: { kind: string; locator: string }[];
  bundle_id: string | null;
}

export interface Bundle {
  bundle_id: string;
  service_ids: string[];
  purpose_category: string;
}

export interface FactsheetVocabulary {
  purposes: Record<string, string>;
  categories: Record<string, string>;
}

export interface PrivacyFactsheet {
  system_id: string;
  system_version: string;
  rows: PrivacyRow[];
  bundles: Bundle[];
  vocabulary: FactsheetVocabulary;
}

export interface TransparencyFactsheet {
  system_id: string;
  system_version: string;
  rows: TransparencyRow[];
  aggregate: SignState;
  vocabulary: FactsheetVocabulary;
}

export interface DataRecord {
  record_id: string;
  user_id: string;
  category: string;
  payload: string; // base64
  source: string;
  provenance: string;
  created_at: string;
  version: number;
  erased: boolean;
}

export interface TraceRecord {
  seq: number;
  origin: string;
  at: string;
  user_id: string;
  data_version: string;
  filter_description: string;
  service_version: string;
  detail: string;
  chain: string;
}

export interface TraceDocument {
  user_id: string;
  record_count: number;
  records: TraceRecord[];
}

const HEADER_PRIVACY = 'X-Personal-Data';
const HEADER_CODE_DATA = 'X-Transparency-Code-Data';
const HEADER_OBJECTIVITY = 'X-Transparency-Objectivity';

export type SignListener = (signs: SignValues) => void;

export class GatewayClient {
  readonly callLog: CallLogEntry[] = [];
  private token: string | null = null;
  private signListeners: SignListener[] = [];
  lastHeaderSigns: SignValues | null = null;

  constructor(
    readonly baseUrl: string = '',
    private readonly fetchImpl: typeof fetch = fetch.bind(globalThis),
  ) {}

  setToken(token: string | null): void {
    this.token = token;
  }

  hasToken(): boolean {
    return this.token !== null;
  }

  onSigns(listener: SignListener): void {
    this.signListeners.push(listener);
  }

  private captureSigns(headers: Headers): void {
    const privacy = headers.get(HEADER_PRIVACY);
    const codeData = headers.get(HEADER_CODE_DATA);
    const objectivity = headers.get(HEADER_OBJECTIVITY);
    if (privacy && codeData && objectivity) {
      this.lastHeaderSigns = { privacy, code_data: codeData, objectivity };
      for (const listener of this.signListeners) listener(this.lastHeaderSigns);
    }
  }

  async request<T = unknown>(
    method: string,
    path: string,
    kind: RequestKind,
    json?: unknown,
  ): Promise<ApiResponse<T>> {
    const headers: Record<string, string> = {};
    if (json !== undefined) headers['Content-Type'] = 'application/json';
    if (this.token) headers['Authorization'] = `Bearer ${this.token}`;
    const response = await this.fetchImpl(this.baseUrl + path, {
      method,
      headers,
      body: json === undefined ? undefined : JSON.stringify(json),
    });
    this.captureSigns(response.headers);
    this.callLog.push({ method, path, kind, status: response.status });
    const text = await response.text();
    const body = (text ? JSON.parse(text) : null) as T;
    return { status: response.status, body };
  }

  // -- transparency surface (no personal data involved) --

  getSigns() {
    return this.request<SignState & { headers: Record<string, string> }>(
      'GET', '/signs', 'transparency');
  }

  getPrivacyFactsheet() {
    return this.request<PrivacyFactsheet>('GET', '/factsheets/privacy', 'transparency');
  }

  getTransparencyFactsheet() {
    return this.request<TransparencyFactsheet>(
      'GET', '/factsheets/transparency', 'transparency');
  }

  // -- consent management --

  listConsents() {
    return this.request<{ grants: unknown[]; pending: string[] }>(
      'GET', '/consents', 'consent');
  }

  grantConsent(serviceId: string, categories: string[]) {
    return this.request<{ grant: unknown; pending: string[] }>(
      'POST', '/consents', 'consent', { service_id: serviceId, categories });
  }

  revokeConsent(serviceId: string) {
    return this.request<{ revoked: string; pending: string[] }>(
      'DELETE', `/consents/${serviceId}`, 'consent');
  }

  // -- personal data surface --

  accessService(serviceId: string, categories?: string[]) {
    const body = categories === undefined ? {} : { categories };
    return this.request<Record<string, unknown>>(
      'POST', `/services/${serviceId}/access`, 'personal-data', body);
  }

  myData(categories?: string[], sources?: string[]) {
    const params = new URLSearchParams();
    if (categories?.length) params.set('categories', categories.join(','));
    if (sources?.length) params.set('sources', sources.join(','));
    const query = params.toString();
    return this.request<{ records: DataRecord[]; data_version: string }>(
      'GET', `/my-data${query ? '?' + query : ''}`, 'personal-data');
  }

  exportMyData() {
    return this.request<Record<string, unknown>>(
      'GET', '/my-data/export', 'personal-data');
  }

  requestErasure(categories?: string[]) {
    const body = categories?.length ? { categories } : {};
    return this.request<{ erased: number }>(
      'POST', '/my-data/erasure', 'personal-data', body);
  }

  requestRectification(recordId: string, payloadB64: string) {
    return this.request<{ version: number }>(
      'POST', '/my-data/rectification', 'personal-data',
      { record_id: recordId, payload_b64: payloadB64 });
  }

  getTrace() {
    return this.request<TraceDocument>('GET', '/my-data/trace', 'personal-data');
  }

  fileComplaint(text: string) {
    return this.request<{ receipt_id: string }>(
      'POST', '/complaints', 'consent', { text });
  }

  personalDataRequests(): CallLogEntry[] {
    return this.callLog.filter((entry) => entry.kind === 'personal-data');
  }
}
