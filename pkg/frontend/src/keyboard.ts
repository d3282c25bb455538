/**
 * Keyboard-first review: map key presses to review actions. Annotators work
 * through thousands of spans, so navigation and decisions never require the
 * mouse. Keys are ignored while the user types in an input.
 */

import type { Decision } from './types.js';

export type KeyAction =
  | { kind: 'next' }
  | { kind: 'prev' }
  | { kind: 'decision'; decision: Decision }
  | { kind: 'commit' }
  | { kind: 'dismiss' };

const DECISION_KEYS: Record<string, Decision> = {
  k: 'keep',
  s: 'pseudonymize',
  i: 'invalidate',
  d: 'delete',
};

export interface KeyContext {
  /** true when focus is inside a text input or textarea */
  typing: boolean;
}

export function actionForKey(key: string, context: KeyContext): KeyAction | null {
  if (context.typing) {
    return key === 'Escape' ? { kind: 'dismiss' } : null;
  }
  switch (key) {
    case 'n':
    case 'ArrowRight':
      return { kind: 'next' };
    case 'p':
    case 'ArrowLeft':
      return { kind: 'prev' };
    case 'c':
      return { kind: 'commit' };
    case 'Escape':
      return { kind: 'dismiss' };
    default: {
      const decision = DECISION_KEYS[key];
      return decision ? { kind: 'decision', decision } : null;
    }
  }
}
