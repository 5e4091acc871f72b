/**
 * Search panel: query box, result limit, hit list.
 *
 * An empty query renders nothing and issues no request. Hits appear in
 * the exact order the API returned them; the panel adds no ranking of
 * its own.
 */

import type { ApiClient } from './api.js';
import { el, clear } from './dom.js';

export class SearchPanel {
  readonly element: HTMLElement;
  private readonly results: HTMLElement;
  private readonly banner: HTMLElement;
  private readonly queryInput: HTMLInputElement;
  private readonly limitSelect: HTMLSelectElement;

  constructor(private readonly client: ApiClient) {
    this.results = el('div', { 'data-role': 'results' });
    this.banner = el('div', { class: 'banner', 'data-role': 'search-banner', hidden: true });
    this.queryInput = el('input', {
      type: 'search',
      name: 'query',
      placeholder: 'Search indexed content',
    });
    this.limitSelect = el(
      'select',
      { name: 'limit' },
      ...['5', '10', '20', '50'].map((n) => el('option', { value: n }, n)),
    );
    this.limitSelect.value = '20';
    this.element = el('section', { class: 'search-panel' },
      el('form', {
        submit: (event: Event) => {
          event.preventDefault();
          void this.run();
        },
      },
        this.queryInput,
        ' ',
        this.limitSelect,
        ' ',
        el('button', { type: 'submit' }, 'Search'),
      ),
      this.banner,
      this.results,
    );
  }

  async run(): Promise<void> {
    this.banner.hidden = true;
    const query = this.queryInput.value.trim();
    if (query === '') {
      clear(this.results);
      return;
    }
    try {
      const response = await this.client.search(query, Number(this.limitSelect.value));
      clear(this.results);
      if (response.hits.length === 0) {
        this.results.append(el('p', { 'data-role': 'no-hits' }, 'No matches.'));
        return;
      }
      this.results.append(
        el('ol', { class: 'hits' },
          ...response.hits.map((hit) =>
            el('li', { class: 'hit' },
              el('a', { href: hit.source_url, 'data-role': 'hit-url' }, hit.source_url),
              el('span', { class: 'meta' },
                ` [${hit.content_type}] target ${hit.target_id}, score ${hit.score}`),
              el('p', { class: 'snippet' }, hit.snippet),
            ),
          ),
        ),
      );
    } catch (err) {
      this.banner.hidden = false;
      this.banner.textContent = `Search failed: ${String(err)}`;
    }
  }
}
