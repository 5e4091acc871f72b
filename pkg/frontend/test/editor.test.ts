/**
 * Target editor: inline validation before any network, form-to-API
 * mapping, and 422 violations landing on the offending fields.
 */

import { readFileSync } from 'node:fs';
import { dirname, join } from 'node:path';
import { fileURLToPath } from 'node:url';
import { beforeEach, describe, expect, it, vi } from 'vitest';

import { ApiClient, type TargetConfig } from '../src/api.js';
import { TargetEditor } from '../src/editor.js';
import { FakeApi, jsonResponse, sampleTarget } from './helpers.js';

function fieldError(editor: TargetEditor, key: string): string {
  const slot = editor.element.querySelector(`[data-error-for="${key}"]`);
  return slot?.textContent ?? '';
}

function setValue(editor: TargetEditor, name: string, value: string): void {
  const input = editor.element.querySelector(`[name="${name}"]`) as
    | HTMLInputElement
    | HTMLSelectElement;
  input.value = value;
}

beforeEach(() => {
  document.body.innerHTML = '';
});

describe('client-side validation', () => {
  it('submitting an empty form reports start_url inline without an API call', async () => {
    const fetchSpy = vi.fn();
    const editor = new TargetEditor(new ApiClient('', fetchSpy));
    document.body.append(editor.element);

    const saved = await editor.submit();

    expect(saved).toBe(false);
    expect(fetchSpy).not.toHaveBeenCalled();
    expect(fieldError(editor, 'id')).toBe('id must be non-empty');
    expect(fieldError(editor, 'start_url')).toBe('start_url must be an absolute http(s) URL');
  });

  it('never sends a form the server would reject for a modeled rule', async () => {
    const vectorsPath = join(
      dirname(fileURLToPath(import.meta.url)),
      '..', '..', 'shared', 'validation-vectors.json',
    );
    const vectors = JSON.parse(readFileSync(vectorsPath, 'utf-8')) as {
      valid_target: TargetConfig;
      cases: { name: string; mutate: Record<string, unknown>; violations: string[] }[];
    };
    for (const vectorCase of vectors.cases) {
      if (vectorCase.violations.length === 0) continue;
      const fetchSpy = vi.fn();
      const editor = new TargetEditor(new ApiClient('', fetchSpy));
      const target = {
        ...structuredClone(vectors.valid_target),
        ...structuredClone(vectorCase.mutate),
      } as TargetConfig;
      editor.loadExisting(target);
      const saved = await editor.submit();
      expect(saved, vectorCase.name).toBe(false);
      expect(fetchSpy, vectorCase.name).not.toHaveBeenCalled();
    }
  });

  it('round-trips a loaded target through the form unchanged', () => {
    const editor = new TargetEditor(new ApiClient('', vi.fn()));
    const target = sampleTarget({
      title_criterion: {
        kind: 'other', keywords: ['detail', 'view'], separator: ';', param_count: 2, scope: 'both',
      },
    });
    editor.loadExisting(target);
    expect(editor.readModel()).toEqual(target);
  });
});

describe('saving', () => {
  it('new targets POST to /api/targets', async () => {
    const api = new FakeApi();
    const editor = new TargetEditor(api.client());
    editor.loadNew();
    setValue(editor, 'id', 'fresh');
    setValue(editor, 'institution_id', 'inst-9');
    setValue(editor, 'start_url', 'http://site.test/x.html');

    expect(await editor.submit()).toBe(true);
    const post = api.calls.find((c) => c.method === 'POST');
    expect(post?.url).toBe('/api/targets');
    expect((post?.body as TargetConfig).id).toBe('fresh');
  });

  it('edited depth lands in the PUT body', async () => {
    const api = new FakeApi();
    const editor = new TargetEditor(api.client());
    editor.loadExisting(sampleTarget());
    setValue(editor, 'depth', '2');

    expect(await editor.submit()).toBe(true);
    const put = api.calls.find((c) => c.method === 'PUT');
    expect(put?.url).toBe('/api/targets/t1');
    expect((put?.body as TargetConfig).depth).toBe(2);
  });

  it('calls back after a successful save', async () => {
    const api = new FakeApi();
    const onSaved = vi.fn();
    const editor = new TargetEditor(api.client(), onSaved);
    editor.loadExisting(sampleTarget());
    await editor.submit();
    expect(onSaved).toHaveBeenCalledOnce();
  });
});

describe('server violations', () => {
  it('maps a 422 duplicate id onto the id field', async () => {
    const fetchSpy = vi.fn(async () =>
      jsonResponse({ violations: ["duplicate id 't1'"] }, 422),
    );
    const editor = new TargetEditor(new ApiClient('', fetchSpy));
    editor.loadExisting(sampleTarget());

    expect(await editor.submit()).toBe(false);
    expect(fieldError(editor, 'id')).toBe("duplicate id 't1'");
  });

  it('maps a 422 rule violation onto the rule row', async () => {
    const fetchSpy = vi.fn(async () =>
      jsonResponse(
        { violations: ['content_link_rules[1]: param_count must be ≥ 1 when separator set'] },
        422,
      ),
    );
    const editor = new TargetEditor(new ApiClient('', fetchSpy));
    editor.loadExisting(sampleTarget());

    await editor.submit();
    expect(fieldError(editor, 'content_link_rules[1].param_count')).toContain('param_count');
  });

  it('unmappable server messages land in the form banner', async () => {
    const fetchSpy = vi.fn(async () =>
      jsonResponse({ violations: ['something exotic happened'] }, 422),
    );
    const editor = new TargetEditor(new ApiClient('', fetchSpy));
    editor.loadExisting(sampleTarget());

    await editor.submit();
    const banner = editor.element.querySelector('[data-role="form-banner"]') as HTMLElement;
    expect(banner.hidden).toBe(false);
    expect(banner.textContent).toContain('something exotic');
  });

  it('shows an unreachable-API banner when fetch rejects', async () => {
    const fetchSpy = vi.fn(async () => {
      throw new TypeError('network down');
    });
    const editor = new TargetEditor(new ApiClient('', fetchSpy));
    editor.loadExisting(sampleTarget());

    expect(await editor.submit()).toBe(false);
    const banner = editor.element.querySelector('[data-role="form-banner"]') as HTMLElement;
    expect(banner.hidden).toBe(false);
    expect(banner.textContent).toContain('API unreachable');
  });
});

describe('rule rows', () => {
  it('added and removed rows keep violations on the right row', async () => {
    const fetchSpy = vi.fn();
    const editor = new TargetEditor(new ApiClient('', fetchSpy));
    editor.loadExisting(sampleTarget());

    // Remove the first rule, then break the remaining one (DOM index 1,
    // array index 0 after removal).
    const firstRow = editor.element.querySelector('[data-rule="0"]') as HTMLElement;
    firstRow.remove();
    setValue(editor, 'content_link_rules[1].separator', '&');
    setValue(editor, 'content_link_rules[1].param_count', '0');

    expect(await editor.submit()).toBe(false);
    expect(fetchSpy).not.toHaveBeenCalled();
    expect(fieldError(editor, 'content_link_rules[1].param_count'))
      .toBe('content_link_rules[0]: param_count must be ≥ 1 when separator set');
  });
});
