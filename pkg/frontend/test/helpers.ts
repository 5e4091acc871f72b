/** Scripted fetch backend standing in for the admin API. */

import type { JobStateName, JobStatus, RunReport, TargetConfig } from '../src/api.js';
import { ApiClient } from '../src/api.js';

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { 'Content-Type': 'application/json' },
  });
}

export interface FakeApiOptions {
  targets?: TargetConfig[];
  stateScript?: JobStateName[];
  lastReport?: RunReport | null;
}

/**
 * Minimal in-memory API double. Each /status request consumes the next
 * scripted state (the final one repeats), which lets a test walk a job
 * through idle, queued, running, and back.
 */
export class FakeApi {
  readonly calls: { url: string; method: string; body?: unknown }[] = [];
  targets: TargetConfig[];
  stateScript: JobStateName[];
  lastReport: RunReport | null;

  constructor(options: FakeApiOptions = {}) {
    this.targets = options.targets ?? [];
    this.stateScript = options.stateScript ?? ['idle'];
    this.lastReport = options.lastReport ?? null;
  }

  client(): ApiClient {
    return new ApiClient('', (url, init) => this.handle(url, init));
  }

  private nextState(): JobStateName {
    if (this.stateScript.length > 1) {
      return this.stateScript.shift() as JobStateName;
    }
    return this.stateScript[0] ?? 'idle';
  }

  private status(targetId: string): JobStatus {
    return {
      target_id: targetId,
      state: this.nextState(),
      next_run: 1700000000,
      last_report: this.lastReport,
    };
  }

  async handle(url: string, init?: RequestInit): Promise<Response> {
    const method = init?.method ?? 'GET';
    const body = init?.body ? JSON.parse(String(init.body)) : undefined;
    this.calls.push({ url, method, body });

    const statusMatch = url.match(/^\/api\/targets\/([^/]+)\/status$/);
    if (statusMatch && method === 'GET') {
      return jsonResponse(this.status(decodeURIComponent(statusMatch[1] ?? '')));
    }
    const harvestMatch = url.match(/^\/api\/targets\/([^/]+)\/harvest$/);
    if (harvestMatch && method === 'POST') {
      return jsonResponse({
        target_id: decodeURIComponent(harvestMatch[1] ?? ''),
        state: 'queued',
        next_run: 1700000000,
        last_report: this.lastReport,
      });
    }
    if (url === '/api/targets' && method === 'GET') {
      return jsonResponse(this.targets);
    }
    if (url === '/api/targets' && method === 'POST') {
      return jsonResponse(body, 201);
    }
    const targetMatch = url.match(/^\/api\/targets\/([^/]+)$/);
    if (targetMatch && method === 'PUT') {
      return jsonResponse(body);
    }
    if (url.startsWith('/api/search')) {
      return jsonResponse({ query: '', hits: [] });
    }
    return jsonResponse({ error: `unhandled ${method} ${url}` }, 500);
  }
}

export function sampleTarget(overrides: Partial<TargetConfig> = {}): TargetConfig {
  return {
    id: 't1',
    institution_id: 'inst-1',
    content_type: 'publication',
    start_url: 'http://site.test/section.html',
    depth: 1,
    paging_criterion: { keywords: ['page='], separator: '&', param_count: 1, scope: 'url_only' },
    focus_point: { tag_name: 'table', ordinal: 2 },
    content_link_rules: [
      { kind: 'full_text', keywords: ['pdf'], separator: '', param_count: 0, scope: 'url_only' },
      { kind: 'image', keywords: ['jpg'], separator: '', param_count: 0, scope: 'url_only' },
    ],
    reharvest_period_s: 3600,
    max_pages: 500,
    enabled: true,
    ...overrides,
  };
}

export function sampleReport(errors: { url: string; error: string }[] = []): RunReport {
  return {
    target_id: 't1',
    started_at: 1700000000,
    finished_at: 1700000009,
    pages_fetched: 13,
    records_extracted: 9,
    links_ignored: 2,
    errors,
    stopped_reason: 'exhausted',
  };
}
