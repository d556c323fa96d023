/** Wire types mirroring the service's response models. */

export type SessionState =
  | "suggested"
  | "drafted"
  | "approved"
  | "submitted"
  | "declined";

export interface DraftView {
  snippet: string;
  provenance: Record<string, unknown>;
  created_at: string;
}

export interface AssignmentView {
  session_id: string;
  question_id: number;
  title: string;
  similarity: number;
  component_scores: Record<string, number>;
  state: SessionState;
  draft: DraftView | null;
  edited_body: string | null;
  note: string;
  timestamps: Record<string, string>;
}

export interface AnswerView {
  answer_id: number;
  score: number;
  comment_count: number;
  answerer_reputation: number;
  body: string;
  code_blocks: string[];
}

export interface PostView {
  question_id: number;
  title: string;
  body: string;
  tags: string[];
  score: number;
  view_count: number;
  favorite_count: number;
  comment_count: number;
  accepted_answer_id: number | null;
  creation_date: string;
  last_activity_date: string;
  code_blocks: string[];
  answers: AnswerView[];
}

export interface OutboxView {
  session_id: string;
  question_id: number;
  answer_body: string;
  submitted_at: string;
  mode: string;
  failed: boolean;
}

export interface SettingsView {
  max_suggestions_per_day: number;
  weights: Record<string, number>;
  retry_period_hours: number;
  min_lines: number;
  similarity_floor: number;
  staleness_days: number;
  dry_run: boolean;
}

/** The four answer-set quality criteria the reviewer may tick. */
export const QUALITY_CRITERIA = [
  "completeness",
  "conciseness",
  "correctness",
  "comprehensibility",
] as const;

export type QualityCriterion = (typeof QUALITY_CRITERIA)[number];

export type Checklist = Record<QualityCriterion, boolean>;

export function emptyChecklist(): Checklist {
  return {
    completeness: false,
    conciseness: false,
    correctness: false,
    comprehensibility: false,
  };
}
