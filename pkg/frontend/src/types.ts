// Wire types for the rating service API. Field names mirror the JSON
// exactly; a task never carries the accept/reject verdict.

export interface TaskView {
  item: string;
  question: string;
  answer: string;
  context?: string;
  position: number;
  total: number;
}

export interface TaskQueue {
  assessor: string;
  total: number;
  completed: number;
  show_context: boolean;
  tasks: TaskView[];
}

export type Q1Value =
  | "well_formed_and_understandable"
  | "understandable_only"
  | "neither";

export type Q2Value = "yes" | "no" | "dont_know";

export interface RatingPayload {
  assessor: string;
  item: string;
  q1: Q1Value;
  q2?: Q2Value;
}

export interface SubmitResult {
  status: string;
  assessor: string;
  item: string;
  completed: number;
  total: number;
}

export interface KappaBlock {
  status: "ok" | "pending" | "degenerate";
  kappa: number | null;
  complete_items: number;
  mean_observed_agreement?: number;
  expected_agreement?: number;
}

export interface Chi2Block {
  status: "ok" | "pending";
  statistic: number | null;
  df: number | null;
  p_value: number | null;
  table: number[][];
}

export type GroupPercentages = Record<string, number>;

export interface GroupSplit {
  accepted: GroupPercentages;
  rejected: GroupPercentages;
}

export interface Stats {
  n_ratings: number;
  kappa: { q1: KappaBlock; q2: KappaBlock };
  chi_squared: { q1: Chi2Block; q2: Chi2Block };
  aggregate: { q1: GroupSplit; q2: GroupSplit };
}

export interface Progress {
  assessors: Record<string, { completed: number; total: number }>;
  completed: number;
  total: number;
}
