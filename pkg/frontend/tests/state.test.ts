import { describe, expect, it } from 'vitest';

import * as S from '../src/state.js';
import type { DocumentJson, LedgerConflict, SpanJson } from '../src/types.js';

function span(start: number, end: number, surface: string, extra: Partial<SpanJson> = {}): SpanJson {
  return {
    start,
    end,
    surface,
    ner_label: null,
    pii_category: 'USERNAME',
    subject_role: null,
    decision: null,
    replacement: null,
    detector: 'regex',
    ...extra,
  };
}

function doc(): DocumentJson {
  return {
    id: 'd1',
    language: 'en',
    source: 'twitter',
    text: 'Hit me up @marie.delattre1 on Insta',
    cfa_label: null,
    spans: [span(10, 26, '@marie.delattre1')],
    meta: {},
  };
}

function loaded(): S.ViewState {
  return S.loadDocument(S.initialState(), doc(), 123, { '10-26': '@jane.doe1' });
}

const CONFLICT: LedgerConflict = {
  error: 'taken',
  existing: {
    original_surface: '@marie.delattre1',
    pii_category: 'USERNAME',
    replacement: '@first.pick',
    languages: ['en'],
    created_by: 'reviewer',
    note: null,
  },
};

describe('view state transitions', () => {
  it('loadDocument selects the first span and keeps the preview strategy', () => {
    const state = S.setPreview(S.initialState(), 'S3', 'x');
    const next = S.loadDocument(state, doc(), 99, {});
    expect(next.selectedSpan).toBe(0);
    expect(next.previewStrategy).toBe('S3');
    expect(next.pending).toEqual([]);
  });

  it('queuePatch applies optimistically and records the pre-state', () => {
    const state = S.queuePatch(loaded(), { start: 10, end: 26, subject_role: 'PublicFigure' });
    expect(state.doc!.spans[0].subject_role).toBe('PublicFigure');
    expect(state.pending).toHaveLength(1);
    expect(state.pending[0].before.subject_role).toBeNull();
  });

  it('ackPatch replaces with the server span and clears the queue', () => {
    const patch = { start: 10, end: 26, subject_role: 'PublicFigure' as const };
    let state = S.queuePatch(loaded(), patch);
    const serverSpan = span(10, 26, '@marie.delattre1', {
      subject_role: 'PublicFigure',
      decision: 'keep',
    });
    state = S.ackPatch(state, patch, serverSpan, []);
    expect(state.pending).toEqual([]);
    expect(state.doc!.spans[0].decision).toBe('keep');
    expect(state.previewText).toBeNull(); // stale preview dropped
  });

  it('failPatch keeps the patch queued with an attempt count', () => {
    const patch = { start: 10, end: 26, subject_role: 'PublicFigure' as const };
    let state = S.queuePatch(loaded(), patch);
    state = S.failPatch(state, patch);
    expect(state.pending).toHaveLength(1);
    expect(state.pending[0].attempts).toBe(1);
  });

  it('conflictPatch reverts the optimistic update and surfaces the mapping', () => {
    const patch = { start: 10, end: 26, replacement: '@second.pick' };
    let state = S.queuePatch(loaded(), patch);
    expect(state.doc!.spans[0].replacement).toBe('@second.pick');
    state = S.conflictPatch(state, patch, CONFLICT);
    expect(state.doc!.spans[0].replacement).toBeNull();
    expect(state.pending).toEqual([]);
    expect(state.conflict!.existing.replacement).toBe('@first.pick');
    expect(S.dismissConflict(state).conflict).toBeNull();
  });

  it('selectNext wraps in both directions', () => {
    const twoSpans = {
      ...doc(),
      text: 'a b',
      spans: [span(0, 1, 'a'), span(2, 3, 'b')],
    };
    let state = S.loadDocument(S.initialState(), twoSpans, 0, {});
    state = S.selectNext(state, 1);
    expect(state.selectedSpan).toBe(1);
    state = S.selectNext(state, 1);
    expect(state.selectedSpan).toBe(0);
    state = S.selectNext(state, -1);
    expect(state.selectedSpan).toBe(1);
  });

  it('undecidedCount counts missing decisions and Unassigned roles', () => {
    const d = {
      ...doc(),
      spans: [
        span(10, 26, '@marie.delattre1', { decision: 'keep', subject_role: 'PublicFigure' }),
        span(30, 35, 'Insta', { decision: 'keep', subject_role: 'Unassigned' }),
        span(0, 3, 'Hit'),
      ],
    };
    expect(S.undecidedCount(d)).toBe(2);
  });

  it('reload reconstructs the same state from server data', () => {
    const a = S.loadDocument(S.initialState(), doc(), 5, {});
    const b = S.loadDocument(S.initialState(), doc(), 5, {});
    expect(a).toEqual(b);
  });
});
