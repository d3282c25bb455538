/**
 * JSON shapes exchanged with the review service. Field names follow the
 * corpus schema exactly; offsets are Unicode code points, not UTF-16 units.
 */

export type Decision = 'keep' | 'pseudonymize' | 'invalidate' | 'delete';

export type PiiCategory =
  | 'PERSON_NAME'
  | 'USERNAME'
  | 'URL'
  | 'EMAIL'
  | 'PHONE'
  | 'ADDRESS'
  | 'LOCATION'
  | 'ORG_NAME'
  | 'HASHTAG'
  | 'MEDIA_TITLE'
  | 'OTHER';

export const SUBJECT_ROLES = [
  'PrivateIndividual',
  'PublicFigure',
  'Influencer',
  'DeceasedPublicFigure',
  'DeceasedPrivatePerson',
  'DeceasedKnownTerrorist',
  'ConvictedUnclearOrMinor',
  'RadicalOrgAccount',
  'GenericOrganization',
  'VulnerableLinkedOrganization',
  'Unassigned',
] as const;

export type SubjectRole = (typeof SUBJECT_ROLES)[number];

export const STRATEGIES = ['S0', 'S1', 'S2', 'S3', 'REALISTIC'] as const;
export type StrategyId = (typeof STRATEGIES)[number];

export interface SpanJson {
  start: number;
  end: number;
  surface: string;
  ner_label: string | null;
  pii_category: PiiCategory | null;
  subject_role: SubjectRole | null;
  decision: Decision | null;
  replacement: string | null;
  detector: string;
}

export interface DocumentJson {
  id: string;
  language: string;
  source: string;
  text: string;
  cfa_label: string | null;
  spans: SpanJson[];
  meta: Record<string, string>;
}

export interface DocSummary {
  id: string;
  language: string;
  source: string;
  spans: number;
  undecided_spans: number;
  status: 'done' | 'pending';
  committed: boolean;
  leased_by: string | null;
}

export interface CheckoutResponse {
  doc: DocumentJson;
  lease_expires: number;
  suggestions: Record<string, string>;
}

export interface SpanPatch {
  start: number;
  end: number;
  pii_category?: PiiCategory;
  subject_role?: SubjectRole;
  decision?: Decision;
  replacement?: string;
  note?: string;
}

export interface PatchResponse {
  span: SpanJson;
  warnings: { doc_id: string; kept_spans: [number, number][] }[];
}

export interface PreviewResponse {
  doc_id: string;
  strategy: StrategyId;
  text: string;
  spans: SpanJson[];
}

export interface LedgerConflict {
  error: string;
  existing: {
    original_surface: string;
    pii_category: string;
    replacement: string;
    languages: string[];
    created_by: string;
    note: string | null;
  };
}
