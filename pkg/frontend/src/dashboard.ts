/**
 * Target dashboard: one row per target with its job state, next run,
 * last report counters, and a manual trigger.
 *
 * While any job is queued or running the dashboard polls statuses every
 * two seconds; the timer stops as soon as everything is settled and is
 * cancelled on dispose. A failed poll flags the view as stale rather
 * than blanking it. All numbers shown come straight from API fields.
 */

import type { ApiClient, JobStatus, TargetConfig } from './api.js';
import { el, clear } from './dom.js';

const POLL_INTERVAL_MS = 2000;

export class Dashboard {
  readonly element: HTMLElement;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private disposed = false;

  constructor(
    private readonly client: ApiClient,
    private readonly handlers: {
      onEdit?: (target: TargetConfig) => void;
      onCreate?: () => void;
    } = {},
  ) {
    this.element = el('section', { class: 'dashboard' });
  }

  dispose(): void {
    this.disposed = true;
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
  }

  async refresh(): Promise<void> {
    this.disposed = false;
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    let targets: TargetConfig[];
    let statuses: Map<string, JobStatus>;
    try {
      targets = await this.client.listTargets();
      statuses = new Map();
      for (const target of targets) {
        statuses.set(target.id, await this.client.getStatus(target.id));
      }
    } catch {
      this.element.setAttribute('data-stale', 'true');
      const banner = this.element.querySelector('[data-role="stale-banner"]');
      if (!banner) {
        this.element.prepend(
          el('div', { class: 'banner', 'data-role': 'stale-banner' },
            'Status data may be stale: the service is unreachable.'),
        );
      }
      this.scheduleNextPoll(true);
      return;
    }
    this.element.removeAttribute('data-stale');
    this.render(targets, statuses);
    const busy = [...statuses.values()].some(
      (s) => s.state === 'queued' || s.state === 'running',
    );
    this.scheduleNextPoll(busy);
  }

  private scheduleNextPoll(busy: boolean): void {
    if (this.disposed || !busy) {
      return;
    }
    this.timer = setTimeout(() => {
      void this.refresh();
    }, POLL_INTERVAL_MS);
  }

  private render(targets: TargetConfig[], statuses: Map<string, JobStatus>): void {
    clear(this.element);
    if (targets.length === 0) {
      this.element.append(
        el('div', { class: 'onboarding', 'data-role': 'onboarding' },
          'No harvesting targets yet. ',
          el('a', {
            href: '#new',
            click: (event: Event) => {
              event.preventDefault();
              this.handlers.onCreate?.();
            },
          }, 'Create the first target'),
          ' to start indexing.'),
      );
      return;
    }
    const rows = targets.map((target) => this.row(target, statuses.get(target.id)));
    this.element.append(
      el('table', { class: 'targets' },
        el('thead', {},
          el('tr', {},
            el('th', {}, 'Target'),
            el('th', {}, 'Type'),
            el('th', {}, 'State'),
            el('th', {}, 'Next run'),
            el('th', {}, 'Last run'),
            el('th', {}, 'Actions'),
          ),
        ),
        el('tbody', {}, ...rows),
      ),
    );
  }

  private row(target: TargetConfig, status: JobStatus | undefined): HTMLElement {
    const state = status?.state ?? 'idle';
    const report = status?.last_report ?? null;
    const summary = report
      ? `${report.pages_fetched} pages, ${report.records_extracted} records`
      : 'never run';

    const cellsAfterState: (HTMLElement | string)[] = [];
    const reportCell = el('td', { 'data-role': 'last-run' }, summary);
    if (report && report.errors.length > 0) {
      const details = el(
        'ul',
        { 'data-role': 'error-list', hidden: true },
        ...report.errors.map((e) => el('li', {}, `${e.url}: ${e.error}`)),
      );
      const badge = el('button', {
        type: 'button',
        class: 'error-badge',
        'data-role': 'error-badge',
        click: () => {
          details.hidden = !details.hidden;
        },
      }, `${report.errors.length} error(s)`);
      reportCell.append(' ', badge, details);
    }
    cellsAfterState.push(reportCell);

    const trigger = el('button', {
      type: 'button',
      'data-role': 'trigger',
      click: () => {
        void this.trigger(target.id);
      },
    }, 'Harvest now');
    if (!target.enabled || state === 'queued' || state === 'running') {
      trigger.setAttribute('disabled', '');
    }

    return el('tr', { 'data-target': target.id },
      el('td', {}, target.id),
      el('td', {}, target.content_type),
      el('td', { 'data-role': 'state', class: `state-${state}` }, state),
      el('td', { 'data-role': 'next-run' },
        status ? new Date(status.next_run * 1000).toISOString() : ''),
      ...cellsAfterState,
      el('td', {},
        trigger,
        ' ',
        el('button', {
          type: 'button',
          'data-role': 'edit',
          click: () => this.handlers.onEdit?.(target),
        }, 'Edit'),
      ),
    );
  }

  private async trigger(targetId: string): Promise<void> {
    try {
      await this.client.triggerHarvest(targetId);
    } catch {
      this.element.setAttribute('data-stale', 'true');
      return;
    }
    await this.refresh();
  }
}
