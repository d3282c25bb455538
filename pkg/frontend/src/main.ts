/**
 * Wires the review UI together: queue, highlighted document view, span
 * inspector, preview panel, and keyboard review. All transformations are
 * server-computed; the client never pseudonymizes anything itself.
 */

import { ApiError, ConflictError, ReviewApi } from './api.js';
import { actionForKey } from './keyboard.js';
import { renderDocument, renderQueue } from './render.js';
import * as S from './state.js';
import { STRATEGIES, SUBJECT_ROLES } from './types.js';
import type { Decision, SpanPatch, StrategyId } from './types.js';

let state = S.initialState();
let api = new ReviewApi('anonymous');

const $ = (id: string) => document.getElementById(id)!;

function setState(next: S.ViewState): void {
  state = next;
  render();
}

async function refreshQueue(): Promise<void> {
  const language = ($('filter-language') as HTMLSelectElement).value || undefined;
  const status = ($('filter-status') as HTMLSelectElement).value || undefined;
  try {
    const docs = await api.listDocs(language, status);
    renderQueue($('queue') as HTMLElement, docs, state.doc?.id ?? null, openDocument);
  } catch (err) {
    note(`queue refresh failed: ${String(err)}`);
  }
}

async function openDocument(docId: string): Promise<void> {
  try {
    const body = await api.checkout(docId);
    setState(S.loadDocument(state, body.doc, body.lease_expires, body.suggestions));
    note(`checked out ${docId}; lease until ${new Date(body.lease_expires * 1000).toLocaleTimeString()}`);
    await refreshPreview();
    await refreshQueue();
  } catch (err) {
    if (err instanceof ApiError && err.status === 409) {
      note(`document is being reviewed by someone else (${err.message})`);
    } else {
      note(`checkout failed: ${String(err)}`);
    }
  }
}

async function sendPatch(patch: SpanPatch): Promise<void> {
  if (!state.doc) return;
  const docId = state.doc.id;
  setState(S.queuePatch(state, patch));
  try {
    const body = await api.patchSpan(docId, patch);
    setState(
      S.ackPatch(
        state,
        patch,
        body.span,
        body.warnings.map((w) => `quasi-identifier risk: ${w.kept_spans.length} kept indirect spans`),
      ),
    );
    await refreshPreview();
  } catch (err) {
    if (err instanceof ConflictError) {
      setState(S.conflictPatch(state, patch, err.conflict));
    } else {
      setState(S.failPatch(state, patch));
      note(`patch queued for retry (${String(err)})`);
    }
  }
}

async function retryPending(): Promise<void> {
  for (const pending of [...state.pending]) {
    await sendPatch(pending.patch);
  }
}

async function refreshPreview(): Promise<void> {
  if (!state.doc) return;
  try {
    const body = await api.preview(state.doc.id, state.previewStrategy);
    setState(S.setPreview(state, state.previewStrategy, body.text));
  } catch (err) {
    setState(S.setPreview(state, state.previewStrategy, `(preview unavailable: ${String(err)})`));
  }
}

async function commit(): Promise<void> {
  if (!state.doc) return;
  try {
    await api.commit(state.doc.id);
    note(`${state.doc.id} committed`);
    await refreshQueue();
  } catch (err) {
    note(`commit rejected: ${String(err)}`);
  }
}

function selectedSpan() {
  return state.doc && state.selectedSpan !== null ? state.doc.spans[state.selectedSpan] : null;
}

function note(message: string): void {
  $('statusbar').textContent = message;
}

function render(): void {
  const doc = state.doc;
  $('doc-title').textContent = doc ? `${doc.id} [${doc.language}] ${doc.source}` : 'no document';
  if (doc) {
    renderDocument($('document') as HTMLElement, doc, state.selectedSpan, (index) =>
      setState(S.selectSpan(state, index)),
    );
    $('undecided').textContent = `${S.undecidedCount(doc)} undecided span(s)`;
  } else {
    $('document').textContent = 'Pick a document from the queue.';
    $('undecided').textContent = '';
  }
  renderInspector();
  $('preview-text').textContent = state.previewText ?? '';
  ($('preview-text') as HTMLElement).dir = doc?.language === 'ar' ? 'rtl' : 'ltr';
  $('warnings').textContent = state.warnings.join('\n');
  $('pending').textContent = state.pending.length
    ? `${state.pending.length} patch(es) pending retry`
    : '';
  renderConflict();
}

function renderInspector(): void {
  const span = selectedSpan();
  const inspector = $('inspector');
  inspector.style.display = span ? 'block' : 'none';
  if (!span) return;
  $('span-surface').textContent = span.surface;
  $('span-category').textContent = span.pii_category ?? '(uncategorized)';
  ($('role-select') as HTMLSelectElement).value = span.subject_role ?? 'Unassigned';
  $('span-decision').textContent = span.decision ?? 'undecided';
  const key = `${span.start}-${span.end}`;
  ($('replacement-input') as HTMLInputElement).value = span.replacement ?? '';
  ($('replacement-input') as HTMLInputElement).placeholder =
    state.suggestions[key] ?? 'replacement override';
}

function renderConflict(): void {
  const dialog = $('conflict-dialog');
  if (!state.conflict) {
    dialog.style.display = 'none';
    return;
  }
  dialog.style.display = 'block';
  const existing = state.conflict.existing;
  $('conflict-text').textContent =
    `${existing.original_surface} is already mapped to ` +
    `"${existing.replacement}" [${existing.pii_category}] by ${existing.created_by}. ` +
    'Reuse that mapping or pick a different replacement.';
}

function wire(): void {
  api = new ReviewApi(localStorage.getItem('reviewer') ?? 'anonymous');
  const reviewerInput = $('reviewer') as HTMLInputElement;
  reviewerInput.value = api.reviewer;
  reviewerInput.addEventListener('change', () => {
    api.reviewer = reviewerInput.value || 'anonymous';
    localStorage.setItem('reviewer', api.reviewer);
  });

  const roleSelect = $('role-select') as HTMLSelectElement;
  for (const role of SUBJECT_ROLES) {
    const option = document.createElement('option');
    option.value = role;
    option.textContent = role;
    roleSelect.appendChild(option);
  }
  roleSelect.addEventListener('change', () => {
    const span = selectedSpan();
    if (span) {
      void sendPatch({ start: span.start, end: span.end, subject_role: roleSelect.value as never });
    }
  });

  const strategySelect = $('strategy-select') as HTMLSelectElement;
  for (const strategy of STRATEGIES) {
    const option = document.createElement('option');
    option.value = strategy;
    option.textContent = strategy;
    strategySelect.appendChild(option);
  }
  strategySelect.value = state.previewStrategy;
  strategySelect.addEventListener('change', () => {
    state = { ...state, previewStrategy: strategySelect.value as StrategyId };
    void refreshPreview();
  });

  $('replacement-form').addEventListener('submit', (event) => {
    event.preventDefault();
    const span = selectedSpan();
    const value = ($('replacement-input') as HTMLInputElement).value.trim();
    if (span && value) {
      void sendPatch({ start: span.start, end: span.end, replacement: value });
    }
  });

  $('commit-button').addEventListener('click', () => void commit());
  $('retry-button').addEventListener('click', () => void retryPending());
  $('conflict-dismiss').addEventListener('click', () => setState(S.dismissConflict(state)));
  $('filter-language').addEventListener('change', () => void refreshQueue());
  $('filter-status').addEventListener('change', () => void refreshQueue());

  document.addEventListener('keydown', (event) => {
    const typing =
      event.target instanceof HTMLInputElement || event.target instanceof HTMLTextAreaElement;
    const action = actionForKey(event.key, { typing });
    if (!action) return;
    event.preventDefault();
    if (action.kind === 'next') setState(S.selectNext(state, 1));
    else if (action.kind === 'prev') setState(S.selectNext(state, -1));
    else if (action.kind === 'commit') void commit();
    else if (action.kind === 'dismiss') setState(S.dismissConflict(state));
    else if (action.kind === 'decision') {
      const span = selectedSpan();
      if (span) {
        void sendPatch({
          start: span.start,
          end: span.end,
          decision: action.decision as Decision,
        });
      }
    }
  });

  void refreshQueue();
  render();
}

document.addEventListener('DOMContentLoaded', wire);
