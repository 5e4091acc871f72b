/** Shell: tab navigation wiring the three panels to the live API. */

import { ApiClient } from './api.js';
import { Dashboard } from './dashboard.js';
import { TargetEditor } from './editor.js';
import { SearchPanel } from './search.js';
import { el, clear } from './dom.js';

export function mount(root: HTMLElement, client: ApiClient = new ApiClient('')): void {
  const content = el('main', {});
  const dashboard = new Dashboard(client, {
    onEdit: (target) => {
      editor.loadExisting(target);
      show('editor');
    },
    onCreate: () => {
      editor.loadNew();
      show('editor');
    },
  });
  const editor = new TargetEditor(client, () => {
    show('dashboard');
  });
  const search = new SearchPanel(client);

  const panels: Record<string, HTMLElement> = {
    dashboard: dashboard.element,
    editor: editor.element,
    search: search.element,
  };

  function show(name: keyof typeof panels): void {
    clear(content);
    const panel = panels[name];
    if (panel) {
      content.append(panel);
    }
    if (name === 'dashboard') {
      void dashboard.refresh();
    } else {
      dashboard.dispose();
    }
  }

  const nav = el('nav', {},
    el('button', { type: 'button', click: () => show('dashboard') }, 'Targets'),
    el('button', {
      type: 'button',
      click: () => {
        editor.loadNew();
        show('editor');
      },
    }, 'New target'),
    el('button', { type: 'button', click: () => show('search') }, 'Search'),
  );

  root.append(el('h1', {}, 'webharvest administration'), nav, content);
  show('dashboard');
}

const rootElement = typeof document !== 'undefined' ? document.getElementById('app') : null;
if (rootElement) {
  mount(rootElement);
}
