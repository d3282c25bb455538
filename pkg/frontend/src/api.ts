/**
 * Thin fetch wrappers over the review service API. The reviewer id travels
 * in the X-Reviewer header on every mutating call.
 */

import type {
  CheckoutResponse,
  DocSummary,
  LedgerConflict,
  PatchResponse,
  PreviewResponse,
  SpanPatch,
  StrategyId,
} from './types.js';

export class ConflictError extends Error {
  constructor(public conflict: LedgerConflict) {
    super(conflict.error);
  }
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

async function parseError(response: Response): Promise<never> {
  let detail: unknown = null;
  try {
    detail = (await response.json()).detail;
  } catch {
    // non-JSON error body
  }
  if (response.status === 409 && detail && typeof detail === 'object' && 'existing' in (detail as object)) {
    throw new ConflictError(detail as LedgerConflict);
  }
  const message =
    detail && typeof detail === 'object' && 'error' in (detail as object)
      ? String((detail as { error: unknown }).error)
      : response.statusText;
  throw new ApiError(response.status, message);
}

export class ReviewApi {
  constructor(
    public reviewer: string,
    public base: string = '',
  ) {}

  private headers(): Record<string, string> {
    return { 'X-Reviewer': this.reviewer, 'Content-Type': 'application/json' };
  }

  async listDocs(language?: string, status?: string): Promise<DocSummary[]> {
    const params = new URLSearchParams();
    if (language) params.set('language', language);
    if (status) params.set('status', status);
    const query = params.toString();
    const response = await fetch(`${this.base}/docs${query ? `?${query}` : ''}`);
    if (!response.ok) await parseError(response);
    return response.json();
  }

  async checkout(docId: string): Promise<CheckoutResponse> {
    const response = await fetch(`${this.base}/docs/${encodeURIComponent(docId)}/checkout`, {
      method: 'POST',
      headers: this.headers(),
    });
    if (!response.ok) await parseError(response);
    return response.json();
  }

  async patchSpan(docId: string, patch: SpanPatch): Promise<PatchResponse> {
    const response = await fetch(`${this.base}/docs/${encodeURIComponent(docId)}/spans`, {
      method: 'PATCH',
      headers: this.headers(),
      body: JSON.stringify(patch),
    });
    if (!response.ok) await parseError(response);
    return response.json();
  }

  async commit(docId: string): Promise<{ status: string }> {
    const response = await fetch(`${this.base}/docs/${encodeURIComponent(docId)}/commit`, {
      method: 'POST',
      headers: this.headers(),
    });
    if (!response.ok) await parseError(response);
    return response.json();
  }

  async preview(docId: string, strategy: StrategyId): Promise<PreviewResponse> {
    const response = await fetch(
      `${this.base}/docs/${encodeURIComponent(docId)}/preview?strategy=${strategy}`,
    );
    if (!response.ok) await parseError(response);
    return response.json();
  }

  async suggest(surface: string, category: string, language: string) {
    const params = new URLSearchParams({ surface, category, language });
    const response = await fetch(`${this.base}/ledger/suggest?${params}`);
    if (!response.ok) await parseError(response);
    return response.json() as Promise<{ replacement: string; existing: boolean }>;
  }
}
