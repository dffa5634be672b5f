/** Wire types mirroring the service's answer envelope, verbatim. */

export interface TaggedTokenView {
  surface: string;
  display: string;
  label: string;
  span: [number, number];
  negated: boolean;
}

export interface AnswerView {
  record_id: string;
  kind: "exact" | "partial";
  score: number;
  similarity_measure: string;
  satisfied: number;
  dropped_condition: string | null;
  values: Record<string, string | number>;
}

export interface CorrectionView {
  original: string;
  replacement: string;
  kind: string;
}

export interface AnswerEnvelope {
  question: string;
  corrected: string;
  domain: string;
  posterior: number;
  interpretation: string;
  sql: string;
  tags: TaggedTokenView[];
  answers: AnswerView[];
  corrections: CorrectionView[];
  unrecognized: string[];
  message: string;
  relaxation_triggered: boolean;
  elapsed_ms: number;
}

export type ViewMode = "answers" | "explanation";
