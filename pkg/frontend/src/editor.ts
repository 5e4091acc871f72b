/**
 * Target editor form: all harvesting parameters of one target, with
 * inline validation mirroring the server rules.
 *
 * Validation failures never leave the browser; a clean form is sent as
 * POST (new) or PUT (existing), and any server 422 (e.g. duplicate id)
 * is mapped back onto the offending fields.
 */

import type { ApiClient, Criterion, LinkKind, LinkRule, MatchScope, TargetConfig } from './api.js';
import { ValidationError, ApiError } from './api.js';
import { el, clear } from './dom.js';
import { validateTarget, violationField } from './validation.js';

const SCOPES: MatchScope[] = ['url_only', 'anchor_text_only', 'both'];
const KINDS: LinkKind[] = ['image', 'full_text', 'other'];
const CONTENT_TYPES = ['institution', 'person', 'publication', 'activity', 'news', 'ipr'];

export function emptyTarget(): TargetConfig {
  return {
    id: '',
    institution_id: '',
    content_type: 'publication',
    start_url: '',
    depth: 1,
    paging_criterion: { keywords: [], separator: '', param_count: 0, scope: 'url_only' },
    focus_point: { tag_name: 'table', ordinal: 1 },
    content_link_rules: [],
    reharvest_period_s: 86400,
    max_pages: 500,
    enabled: true,
  };
}

export class TargetEditor {
  readonly element: HTMLElement;
  private mode: 'create' | 'edit' = 'create';
  private originalId = '';
  private ruleCount = 0;
  private titleEnabled = false;

  constructor(
    private readonly client: ApiClient,
    private readonly onSaved: (target: TargetConfig) => void = () => {},
  ) {
    this.element = el('form', { class: 'target-editor', submit: (event: Event) => {
      event.preventDefault();
      void this.submit();
    } });
    this.load(emptyTarget());
  }

  /** Populate for a brand-new target. */
  loadNew(): void {
    this.mode = 'create';
    this.originalId = '';
    this.load(emptyTarget());
  }

  /** Populate from an existing target; saving issues PUT. */
  loadExisting(target: TargetConfig): void {
    this.mode = 'edit';
    this.originalId = target.id;
    this.load(target);
  }

  private load(target: TargetConfig): void {
    clear(this.element);
    this.ruleCount = 0;
    this.titleEnabled = Boolean(target.title_criterion);

    this.element.append(
      el('h2', {}, this.mode === 'edit' ? `Edit target ${target.id}` : 'New target'),
      el('div', { class: 'banner', 'data-role': 'form-banner', hidden: true }),
      this.textField('id', 'Target id', target.id, this.mode === 'edit'),
      this.textField('institution_id', 'Institution', target.institution_id),
      this.selectField('content_type', 'Content type', CONTENT_TYPES, target.content_type),
      this.textField('start_url', 'Start URL', target.start_url),
      this.numberField('depth', 'Depth (hops to final pages)', target.depth),
      this.criterionGroup('paging_criterion', 'Paging criterion', target.paging_criterion),
      this.titleCriterionGroup(target.title_criterion),
      this.focusGroup(target.focus_point),
      this.rulesGroup(target.content_link_rules),
      this.numberField('reharvest_period_s', 'Re-harvest period (seconds)', target.reharvest_period_s),
      this.numberField('max_pages', 'Page cap per run', target.max_pages),
      this.checkboxField('enabled', 'Enabled', target.enabled),
      el('button', { type: 'submit' }, 'Save'),
    );
  }

  // -- field builders

  private errorSlot(key: string): HTMLElement {
    return el('div', { class: 'field-error', 'data-error-for': key });
  }

  private textField(key: string, label: string, value: string, readonly = false): HTMLElement {
    const input = el('input', { type: 'text', name: key, value });
    input.value = value;
    if (readonly) input.setAttribute('readonly', '');
    return el('label', { class: 'field' }, `${label} `, input, this.errorSlot(key));
  }

  private numberField(key: string, label: string, value: number): HTMLElement {
    const input = el('input', { type: 'number', name: key });
    input.value = String(value);
    return el('label', { class: 'field' }, `${label} `, input, this.errorSlot(key));
  }

  private checkboxField(key: string, label: string, value: boolean): HTMLElement {
    const input = el('input', { type: 'checkbox', name: key });
    input.checked = value;
    return el('label', { class: 'field' }, input, ` ${label}`, this.errorSlot(key));
  }

  private selectField(key: string, label: string, options: string[], value: string): HTMLElement {
    const select = el(
      'select',
      { name: key },
      ...options.map((opt) => el('option', { value: opt }, opt)),
    );
    if (!options.includes(value)) {
      select.append(el('option', { value }, value));
    }
    select.value = value;
    return el('label', { class: 'field' }, `${label} `, select, this.errorSlot(key));
  }

  private criterionFields(prefix: string, criterion: Criterion): HTMLElement[] {
    const keywords = el('input', { type: 'text', name: `${prefix}.keywords` });
    keywords.value = criterion.keywords.join(', ');
    const separator = el('input', { type: 'text', name: `${prefix}.separator` });
    separator.value = criterion.separator;
    const paramCount = el('input', { type: 'number', name: `${prefix}.param_count` });
    paramCount.value = String(criterion.param_count);
    const scope = el(
      'select',
      { name: `${prefix}.scope` },
      ...SCOPES.map((s) => el('option', { value: s }, s)),
    );
    scope.value = criterion.scope;
    return [
      el('label', {}, 'Keywords (comma separated) ', keywords, this.errorSlot(`${prefix}.keywords`)),
      el('label', {}, 'Parameter separator ', separator, this.errorSlot(`${prefix}.separator`)),
      el('label', {}, 'Parameter count ', paramCount, this.errorSlot(`${prefix}.param_count`)),
      el('label', {}, 'Match scope ', scope, this.errorSlot(`${prefix}.scope`)),
    ];
  }

  private criterionGroup(prefix: string, title: string, criterion: Criterion): HTMLElement {
    return el(
      'fieldset',
      { class: 'criterion', 'data-group': prefix },
      el('legend', {}, title),
      ...this.criterionFields(prefix, criterion),
    );
  }

  private titleCriterionGroup(rule: LinkRule | undefined): HTMLElement {
    const body = el('div', { 'data-role': 'title-criterion-body' });
    const toggle = el('input', { type: 'checkbox', name: 'title_criterion.enabled' });
    toggle.checked = this.titleEnabled;
    toggle.addEventListener('change', () => {
      this.titleEnabled = toggle.checked;
      body.hidden = !toggle.checked;
    });
    const current = rule ?? {
      kind: 'other' as LinkKind,
      keywords: [],
      separator: '',
      param_count: 0,
      scope: 'url_only' as MatchScope,
    };
    body.append(...this.criterionFields('title_criterion', current));
    body.hidden = !this.titleEnabled;
    return el(
      'fieldset',
      { class: 'criterion', 'data-group': 'title_criterion' },
      el('legend', {}, 'Title criterion'),
      el('label', {}, toggle, ' Use an explicit title rule (default: same-host links)'),
      body,
    );
  }

  private focusGroup(focus: TargetConfig['focus_point']): HTMLElement {
    const tag = el('input', { type: 'text', name: 'focus_point.tag_name' });
    tag.value = focus.tag_name;
    const ordinal = el('input', { type: 'number', name: 'focus_point.ordinal' });
    ordinal.value = String(focus.ordinal);
    return el(
      'fieldset',
      { class: 'criterion', 'data-group': 'focus_point' },
      el('legend', {}, 'Focus point (content box)'),
      el('label', {}, 'Tag name ', tag, this.errorSlot('focus_point.tag_name')),
      el('label', {}, 'Occurrence from page top ', ordinal, this.errorSlot('focus_point.ordinal')),
    );
  }

  private rulesGroup(rules: LinkRule[]): HTMLElement {
    const list = el('div', { 'data-role': 'rules' });
    const group = el(
      'fieldset',
      { class: 'criterion', 'data-group': 'content_link_rules' },
      el('legend', {}, 'Content link rules (first match wins)'),
      list,
      el('button', {
        type: 'button',
        'data-role': 'add-rule',
        click: () => this.appendRule(list, {
          kind: 'other', keywords: [], separator: '', param_count: 0, scope: 'url_only',
        }),
      }, 'Add rule'),
    );
    for (const rule of rules) {
      this.appendRule(list, rule);
    }
    return group;
  }

  private appendRule(list: HTMLElement, rule: LinkRule): void {
    const index = this.ruleCount++;
    const prefix = `content_link_rules[${index}]`;
    const kind = el(
      'select',
      { name: `${prefix}.kind` },
      ...KINDS.map((k) => el('option', { value: k }, k)),
    );
    kind.value = rule.kind;
    const row = el(
      'div',
      { class: 'rule-row', 'data-rule': String(index) },
      el('label', {}, 'Kind ', kind),
      ...this.criterionFields(prefix, rule),
      el('button', { type: 'button', 'data-role': 'remove-rule', click: () => row.remove() }, 'Remove'),
    );
    list.append(row);
  }

  // -- model extraction

  private input(name: string): HTMLInputElement | HTMLSelectElement | null {
    return this.element.querySelector(`[name="${name}"]`);
  }

  private str(name: string): string {
    return this.input(name)?.value ?? '';
  }

  private num(name: string): number {
    const raw = this.str(name).trim();
    const value = Number(raw);
    return raw === '' || Number.isNaN(value) ? NaN : value;
  }

  private criterionFromForm(prefix: string): Criterion {
    const keywords = this.str(`${prefix}.keywords`)
      .split(',')
      .map((k) => k.trim())
      .filter((k) => k !== '');
    return {
      keywords,
      separator: this.str(`${prefix}.separator`),
      param_count: this.num(`${prefix}.param_count`),
      scope: this.str(`${prefix}.scope`) as MatchScope,
    };
  }

  /** DOM row index for each rule array position, set by readModel. */
  private ruleDomIndexes: string[] = [];

  readModel(): TargetConfig {
    this.ruleDomIndexes = [];
    const model: TargetConfig = {
      id: this.str('id'),
      institution_id: this.str('institution_id'),
      content_type: this.str('content_type'),
      start_url: this.str('start_url'),
      depth: this.num('depth'),
      paging_criterion: this.criterionFromForm('paging_criterion'),
      focus_point: {
        tag_name: this.str('focus_point.tag_name'),
        ordinal: this.num('focus_point.ordinal'),
      },
      content_link_rules: [],
      reharvest_period_s: this.num('reharvest_period_s'),
      max_pages: this.num('max_pages'),
      enabled: (this.input('enabled') as HTMLInputElement | null)?.checked ?? true,
    };
    if (this.titleEnabled) {
      model.title_criterion = {
        kind: (this.str('title_criterion.kind') || 'other') as LinkKind,
        ...this.criterionFromForm('title_criterion'),
      };
    }
    for (const row of this.element.querySelectorAll('[data-rule]')) {
      const index = row.getAttribute('data-rule') ?? '';
      const prefix = `content_link_rules[${index}]`;
      this.ruleDomIndexes.push(index);
      model.content_link_rules.push({
        kind: this.str(`${prefix}.kind`) as LinkKind,
        ...this.criterionFromForm(prefix),
      });
    }
    return model;
  }

  // -- validation display and save

  private clearErrors(): void {
    for (const slot of this.element.querySelectorAll('.field-error')) {
      slot.textContent = '';
    }
    const banner = this.element.querySelector('[data-role="form-banner"]') as HTMLElement;
    banner.hidden = true;
    banner.textContent = '';
  }

  private showViolations(violations: string[]): void {
    const extras: string[] = [];
    for (const violation of violations) {
      let key = violationField(violation);
      // Validation messages index rules by array position; rows keep
      // their original DOM index after removals, so translate.
      const ruleRef = key.match(/^content_link_rules\[(\d+)\]/);
      if (ruleRef) {
        const domIndex = this.ruleDomIndexes[Number(ruleRef[1])];
        if (domIndex !== undefined) {
          key = key.replace(ruleRef[0], `content_link_rules[${domIndex}]`);
        }
      }
      const slot = this.element.querySelector(`[data-error-for="${key}"]`);
      if (slot) {
        slot.textContent = violation;
      } else {
        extras.push(violation);
      }
    }
    if (extras.length > 0) {
      this.showBanner(extras.join('; '));
    }
  }

  private showBanner(message: string): void {
    const banner = this.element.querySelector('[data-role="form-banner"]') as HTMLElement;
    banner.hidden = false;
    banner.textContent = message;
  }

  /**
   * Validate and save. Returns true when the server accepted the target.
   * Invalid forms never reach the API.
   */
  async submit(): Promise<boolean> {
    this.clearErrors();
    const model = this.readModel();
    const violations = validateTarget(model);
    if (violations.length > 0) {
      this.showViolations(violations);
      return false;
    }
    try {
      if (this.mode === 'edit') {
        await this.client.updateTarget(this.originalId, model);
      } else {
        await this.client.createTarget(model);
      }
    } catch (err) {
      if (err instanceof ValidationError) {
        this.showViolations(err.violations);
      } else if (err instanceof ApiError) {
        this.showBanner(err.message);
      } else {
        throw err;
      }
      return false;
    }
    this.onSaved(model);
    return true;
  }
}
