/**
 * Typed client for the webharvest admin JSON API.
 *
 * The fetch function is injectable so component tests run against a
 * scripted mock instead of a live service. A 422 answer raises
 * ValidationError carrying the server's violations verbatim; the UI maps
 * them onto form fields but never rewrites them.
 */

export type LinkKind = 'image' | 'full_text' | 'other';
export type MatchScope = 'url_only' | 'anchor_text_only' | 'both';

export interface Criterion {
  keywords: string[];
  separator: string;
  param_count: number;
  scope: MatchScope;
}

export interface LinkRule extends Criterion {
  kind: LinkKind;
}

export interface FocusPoint {
  tag_name: string;
  ordinal: number;
}

export interface TargetConfig {
  id: string;
  institution_id: string;
  content_type: string;
  start_url: string;
  depth: number;
  paging_criterion: Criterion;
  title_criterion?: LinkRule;
  focus_point: FocusPoint;
  content_link_rules: LinkRule[];
  reharvest_period_s: number;
  max_pages: number;
  enabled: boolean;
}

export type JobStateName = 'idle' | 'queued' | 'running' | 'failed';

export interface RunReport {
  target_id: string;
  started_at: number;
  finished_at: number;
  pages_fetched: number;
  records_extracted: number;
  links_ignored: number;
  errors: { url: string; error: string }[];
  stopped_reason: string;
}

export interface JobStatus {
  target_id: string;
  state: JobStateName;
  next_run: number;
  last_report: RunReport | null;
}

export interface SearchHit {
  source_url: string;
  target_id: string;
  content_type: string;
  score: number;
  snippet: string;
}

export interface SearchResponse {
  query: string;
  hits: SearchHit[];
}

export interface Stats {
  documents: number;
  by_target: Record<string, number>;
  by_content_type: Record<string, number>;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
  }
}

export class ValidationError extends ApiError {
  constructor(readonly violations: string[]) {
    super(422, violations.join('; '));
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private readonly fetchFn: FetchLike;

  constructor(
    private readonly baseUrl = '',
    fetchFn?: FetchLike,
  ) {
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(this.baseUrl + path, init);
    } catch (err) {
      throw new ApiError(0, `API unreachable: ${String(err)}`);
    }
    if (response.status === 422) {
      const body = (await response.json()) as { violations?: string[] };
      throw new ValidationError(body.violations ?? ['validation failed']);
    }
    if (!response.ok) {
      throw new ApiError(response.status, `HTTP ${response.status} for ${path}`);
    }
    if (response.status === 204) {
      return undefined as T;
    }
    return (await response.json()) as T;
  }

  listTargets(): Promise<TargetConfig[]> {
    return this.request('/api/targets');
  }

  getTarget(id: string): Promise<TargetConfig> {
    return this.request(`/api/targets/${encodeURIComponent(id)}`);
  }

  createTarget(target: TargetConfig): Promise<TargetConfig> {
    return this.request('/api/targets', {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(target),
    });
  }

  updateTarget(id: string, target: TargetConfig): Promise<TargetConfig> {
    return this.request(`/api/targets/${encodeURIComponent(id)}`, {
      method: 'PUT',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(target),
    });
  }

  deleteTarget(id: string): Promise<void> {
    return this.request(`/api/targets/${encodeURIComponent(id)}`, { method: 'DELETE' });
  }

  triggerHarvest(id: string): Promise<JobStatus> {
    return this.request(`/api/targets/${encodeURIComponent(id)}/harvest`, {
      method: 'POST',
    });
  }

  getStatus(id: string): Promise<JobStatus> {
    return this.request(`/api/targets/${encodeURIComponent(id)}/status`);
  }

  search(query: string, limit: number): Promise<SearchResponse> {
    const params = new URLSearchParams({ q: query, limit: String(limit) });
    return this.request(`/api/search?${params.toString()}`);
  }

  stats(): Promise<Stats> {
    return this.request('/api/stats');
  }
}
