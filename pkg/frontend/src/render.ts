/**
 * DOM rendering. The document view wraps each span in a highlighted element
 * color-coded by category with a decision badge; Arabic documents render
 * right-to-left while offsets stay logical (the server's code point offsets
 * are mapped through offsets.ts, never recomputed from the DOM).
 */

import { segmentText } from './offsets.js';
import type { DocSummary, DocumentJson, SpanJson } from './types.js';

const CATEGORY_CLASS: Record<string, string> = {
  PERSON_NAME: 'cat-person',
  USERNAME: 'cat-username',
  URL: 'cat-url',
  EMAIL: 'cat-email',
  PHONE: 'cat-phone',
  ADDRESS: 'cat-address',
  LOCATION: 'cat-location',
  ORG_NAME: 'cat-org',
  HASHTAG: 'cat-hashtag',
  MEDIA_TITLE: 'cat-title',
  OTHER: 'cat-other',
};

export function decisionBadge(span: SpanJson): string {
  if (!span.decision) return '?';
  return { keep: 'K', pseudonymize: 'P', invalidate: 'I', delete: 'D' }[span.decision];
}

export function renderDocument(
  container: HTMLElement,
  doc: DocumentJson,
  selected: number | null,
  onSelect: (index: number) => void,
): void {
  container.textContent = '';
  container.dir = doc.language === 'ar' ? 'rtl' : 'ltr';
  for (const segment of segmentText(doc.text, doc.spans)) {
    if (segment.spanIndex === null) {
      container.appendChild(document.createTextNode(segment.text));
      continue;
    }
    if (segment.conflict) {
      const marker = document.createElement('span');
      marker.className = 'span-conflict';
      marker.title = 'overlapping span: resolve in the detector output';
      marker.textContent = '⚠';
      container.appendChild(marker);
      continue;
    }
    const span = doc.spans[segment.spanIndex];
    const el = document.createElement('mark');
    el.className = [
      'span',
      CATEGORY_CLASS[span.pii_category ?? 'OTHER'] ?? 'cat-other',
      `decision-${span.decision ?? 'none'}`,
      segment.spanIndex === selected ? 'selected' : '',
    ]
      .filter(Boolean)
      .join(' ');
    el.textContent = segment.text;
    const badge = document.createElement('sup');
    badge.className = 'badge';
    badge.textContent = decisionBadge(span);
    el.appendChild(badge);
    const index = segment.spanIndex;
    el.addEventListener('click', () => onSelect(index));
    container.appendChild(el);
  }
}

export function renderQueue(
  container: HTMLElement,
  docs: DocSummary[],
  activeId: string | null,
  onOpen: (id: string) => void,
): void {
  container.textContent = '';
  for (const summary of docs) {
    const item = document.createElement('li');
    item.className = [
      'queue-item',
      summary.status,
      summary.id === activeId ? 'active' : '',
    ]
      .filter(Boolean)
      .join(' ');
    const lease = summary.leased_by ? ` 🔒${summary.leased_by}` : '';
    item.textContent =
      `${summary.id} [${summary.language}] ${summary.status} ` +
      `(${summary.undecided_spans}/${summary.spans} undecided)${lease}`;
    item.addEventListener('click', () => onOpen(summary.id));
    container.appendChild(item);
  }
}
