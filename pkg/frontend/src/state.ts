/**
 * View state and its pure transitions. Pending patches are cleared only on
 * a successful server ack; failed sends stay queued for retry, and a
 * conflict reverts the optimistic update and surfaces the existing mapping.
 * Everything here is reconstructible from server state after a reload.
 */

import type {
  DocumentJson,
  LedgerConflict,
  SpanJson,
  SpanPatch,
  StrategyId,
} from './types.js';

export interface PendingPatch {
  patch: SpanPatch;
  /** span snapshot taken before the optimistic update, for conflict revert */
  before: SpanJson;
  attempts: number;
}

export interface ViewState {
  doc: DocumentJson | null;
  selectedSpan: number | null;
  pending: PendingPatch[];
  previewStrategy: StrategyId;
  previewText: string | null;
  warnings: string[];
  conflict: LedgerConflict | null;
  leaseExpires: number | null;
  suggestions: Record<string, string>;
}

export function initialState(): ViewState {
  return {
    doc: null,
    selectedSpan: null,
    pending: [],
    previewStrategy: 'S2',
    previewText: null,
    warnings: [],
    conflict: null,
    leaseExpires: null,
    suggestions: {},
  };
}

/** Server state replaces local state wholesale (reload semantics). */
export function loadDocument(
  state: ViewState,
  doc: DocumentJson,
  leaseExpires: number,
  suggestions: Record<string, string>,
): ViewState {
  return {
    ...initialState(),
    previewStrategy: state.previewStrategy,
    doc,
    selectedSpan: doc.spans.length ? 0 : null,
    leaseExpires,
    suggestions,
  };
}

export function selectSpan(state: ViewState, index: number | null): ViewState {
  if (index === null || !state.doc || index < 0 || index >= state.doc.spans.length) {
    return { ...state, selectedSpan: null };
  }
  return { ...state, selectedSpan: index };
}

export function selectNext(state: ViewState, delta: 1 | -1): ViewState {
  if (!state.doc || state.doc.spans.length === 0) return state;
  const count = state.doc.spans.length;
  const current = state.selectedSpan ?? (delta === 1 ? -1 : 0);
  return { ...state, selectedSpan: (current + delta + count) % count };
}

function spanKey(span: { start: number; end: number }): string {
  return `${span.start}-${span.end}`;
}

/** Optimistically apply a patch and queue it for sending. */
export function queuePatch(state: ViewState, patch: SpanPatch): ViewState {
  if (!state.doc) return state;
  const index = state.doc.spans.findIndex((s) => spanKey(s) === spanKey(patch));
  if (index < 0) return state;
  const before = state.doc.spans[index];
  const optimistic: SpanJson = {
    ...before,
    ...(patch.pii_category !== undefined ? { pii_category: patch.pii_category } : {}),
    ...(patch.subject_role !== undefined ? { subject_role: patch.subject_role } : {}),
    ...(patch.decision !== undefined ? { decision: patch.decision } : {}),
    ...(patch.replacement !== undefined ? { replacement: patch.replacement } : {}),
  };
  const spans = state.doc.spans.slice();
  spans[index] = optimistic;
  return {
    ...state,
    doc: { ...state.doc, spans },
    pending: [...state.pending, { patch, before, attempts: 0 }],
    conflict: null,
  };
}

/** Server ack: replace the span with the authoritative version, drop the patch. */
export function ackPatch(
  state: ViewState,
  patch: SpanPatch,
  serverSpan: SpanJson,
  warnings: string[],
): ViewState {
  if (!state.doc) return state;
  const spans = state.doc.spans.map((s) => (spanKey(s) === spanKey(patch) ? serverSpan : s));
  return {
    ...state,
    doc: { ...state.doc, spans },
    pending: state.pending.filter((p) => p.patch !== patch),
    warnings,
    previewText: null, // stale: refresh after every ack'd patch
  };
}

/** Transport failure: keep the patch queued so it can be retried. */
export function failPatch(state: ViewState, patch: SpanPatch): ViewState {
  return {
    ...state,
    pending: state.pending.map((p) =>
      p.patch === patch ? { ...p, attempts: p.attempts + 1 } : p,
    ),
  };
}

/** Ledger conflict: revert the optimistic update, show the existing mapping. */
export function conflictPatch(
  state: ViewState,
  patch: SpanPatch,
  conflict: LedgerConflict,
): ViewState {
  if (!state.doc) return state;
  const queued = state.pending.find((p) => p.patch === patch);
  const spans = queued
    ? state.doc.spans.map((s) => (spanKey(s) === spanKey(patch) ? queued.before : s))
    : state.doc.spans;
  return {
    ...state,
    doc: { ...state.doc, spans },
    pending: state.pending.filter((p) => p.patch !== patch),
    conflict,
  };
}

export function dismissConflict(state: ViewState): ViewState {
  return { ...state, conflict: null };
}

export function setPreview(state: ViewState, strategy: StrategyId, text: string): ViewState {
  return { ...state, previewStrategy: strategy, previewText: text };
}

export function undecidedCount(doc: DocumentJson): number {
  return doc.spans.filter(
    (s) => s.decision === null || s.subject_role === null || s.subject_role === 'Unassigned',
  ).length;
}
