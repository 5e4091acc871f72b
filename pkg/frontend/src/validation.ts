/**
 * Client-side replica of the server's target validation.
 *
 * Same rules, same messages, same field order, so a form that passes
 * here is never answered 422 for a modeled rule. The server stays
 * authoritative; this exists to give inline feedback before a round
 * trip. The shared vectors in shared/validation-vectors.json pin both
 * sides to identical behavior.
 */

import type { Criterion, TargetConfig } from './api.js';

export function isAbsoluteHttpUrl(value: string): boolean {
  let parsed: URL;
  try {
    parsed = new URL(value);
  } catch {
    return false;
  }
  return (parsed.protocol === 'http:' || parsed.protocol === 'https:') && parsed.host !== '';
}

function criterionViolations(prefix: string, criterion: Criterion): string[] {
  const out: string[] = [];
  if (criterion.param_count < 0) {
    out.push(`${prefix}param_count must be ≥ 0`);
  }
  if (criterion.separator !== '' && criterion.param_count < 1) {
    out.push(`${prefix}param_count must be ≥ 1 when separator set`);
  }
  return out;
}

export function validateTarget(target: TargetConfig): string[] {
  const violations: string[] = [];
  if (target.id === '') {
    violations.push('id must be non-empty');
  }
  if (!isAbsoluteHttpUrl(target.start_url)) {
    violations.push('start_url must be an absolute http(s) URL');
  }
  if (target.depth < 0) {
    violations.push('depth must be ≥ 0');
  }
  violations.push(...criterionViolations('', target.paging_criterion));
  if (target.title_criterion) {
    violations.push(...criterionViolations('title_criterion: ', target.title_criterion));
  }
  const tag = target.focus_point.tag_name;
  if (!/^[a-z0-9]+$/.test(tag)) {
    violations.push('focus_point.tag_name must be lowercase ASCII letters/digits');
  }
  if (target.focus_point.ordinal < 1) {
    violations.push('focus_point.ordinal must be ≥ 1');
  }
  target.content_link_rules.forEach((rule, index) => {
    violations.push(...criterionViolations(`content_link_rules[${index}]: `, rule));
  });
  if (target.reharvest_period_s <= 0) {
    violations.push('reharvest_period must be > 0');
  }
  if (target.max_pages < 1) {
    violations.push('max_pages must be ≥ 1');
  }
  return violations;
}

/**
 * Map a violation message to the form field that should display it.
 * Returns a dotted field key matching the editor's error slot names.
 */
export function violationField(violation: string): string {
  const prefixed = violation.match(/^(title_criterion|content_link_rules\[\d+\]): /);
  if (prefixed) {
    return `${prefixed[1]}.param_count`;
  }
  if (violation.startsWith('param_count ')) {
    return 'paging_criterion.param_count';
  }
  if (violation.startsWith('focus_point.tag_name ')) {
    return 'focus_point.tag_name';
  }
  if (violation.startsWith('focus_point.ordinal ')) {
    return 'focus_point.ordinal';
  }
  if (violation.startsWith('reharvest_period ')) {
    return 'reharvest_period_s';
  }
  if (violation.startsWith('duplicate id')) {
    return 'id';
  }
  const field = violation.split(' ', 1)[0];
  return field ?? 'id';
}
