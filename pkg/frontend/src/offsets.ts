/**
 * Offset arithmetic between the server's Unicode code point offsets and
 * JavaScript's UTF-16 string indices. Astral characters (emoji) occupy one
 * code point but two UTF-16 units, so spans on Arabic/emoji content need
 * explicit conversion before they can slice a JS string.
 */

import type { SpanJson } from './types.js';

/** UTF-16 index of the given code point offset in text. */
export function cpToUtf16(text: string, cpOffset: number): number {
  if (cpOffset <= 0) return 0;
  let cp = 0;
  let i = 0;
  while (i < text.length && cp < cpOffset) {
    const code = text.codePointAt(i)!;
    i += code > 0xffff ? 2 : 1;
    cp += 1;
  }
  return i;
}

/** Code point offset of the given UTF-16 index in text. */
export function utf16ToCp(text: string, utf16Index: number): number {
  let cp = 0;
  let i = 0;
  while (i < text.length && i < utf16Index) {
    const code = text.codePointAt(i)!;
    i += code > 0xffff ? 2 : 1;
    cp += 1;
  }
  return cp;
}

/** Slice text by code point offsets (what the server means by start/end). */
export function sliceByCp(text: string, start: number, end: number): string {
  return text.substring(cpToUtf16(text, start), cpToUtf16(text, end));
}

export interface Segment {
  text: string;
  /** index into the document's span array, or null for plain text */
  spanIndex: number | null;
  /** span overlaps an earlier one; render a conflict marker, not text */
  conflict?: boolean;
}

/**
 * Split a document's text into plain and span segments, in order. Clean
 * corpora have sorted non-overlapping spans; a span overlapping its
 * predecessor (possible in raw detector output) degrades to a zero-width
 * conflict segment instead of corrupting the text.
 */
export function segmentText(text: string, spans: SpanJson[]): Segment[] {
  const segments: Segment[] = [];
  let cursor = 0;
  spans.forEach((span, index) => {
    if (span.start < cursor) {
      segments.push({ text: '', spanIndex: index, conflict: true });
      return;
    }
    if (span.start > cursor) {
      segments.push({ text: sliceByCp(text, cursor, span.start), spanIndex: null });
    }
    segments.push({ text: sliceByCp(text, span.start, span.end), spanIndex: index });
    cursor = span.end;
  });
  const total = utf16ToCp(text, text.length);
  if (cursor < total) {
    segments.push({ text: sliceByCp(text, cursor, total), spanIndex: null });
  }
  return segments;
}
