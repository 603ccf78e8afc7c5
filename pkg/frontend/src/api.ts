import { OfflineError } from './state.js';
import type { FieldStats, InterfaceReport, MapPayload, TagDecision } from './types.js';

export class ApiClient {
  constructor(private base = '') {}

  private async get<T>(path: string): Promise<T> {
    const response = await fetch(this.base + path);
    if (!response.ok) throw new Error(`GET ${path}: ${response.status}`);
    return (await response.json()) as T;
  }

  listFields(): Promise<{ fields: string[] }> {
    return this.get('/api/fields');
  }

  getMap(field: string): Promise<MapPayload> {
    return this.get(`/api/maps/${encodeURIComponent(field)}`);
  }

  getStats(field: string): Promise<FieldStats> {
    return this.get(`/api/fields/${encodeURIComponent(field)}/stats`);
  }

  getInterfaceReport(): Promise<InterfaceReport> {
    return this.get('/api/reports/interface');
  }

  async putTag(field: string, decision: TagDecision): Promise<void> {
    let response: Response;
    try {
      response = await fetch(
        `${this.base}/api/terms/${encodeURIComponent(field)}/${decision.term_id}/tag`,
        {
          method: 'PUT',
          headers: { 'Content-Type': 'application/json' },
          body: JSON.stringify({ tag: decision.tag, note: decision.note ?? '' }),
        },
      );
    } catch {
      // network unreachable: keep the mutation queued
      throw new OfflineError('server unreachable');
    }
    if (!response.ok) throw new Error(`PUT tag: ${response.status}`);
  }
}
