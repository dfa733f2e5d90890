// The two rating questions, worded exactly as assessors must see them.
// Question 2 only makes sense for a question that is at least
// understandable, so it unlocks after question 1 is answered and may be
// left blank only when question 1 was rated Neither.

import type { Q1Value, Q2Value, RatingPayload } from "./types.js";

export const Q1_PROMPT =
  "Is the question well-formed and can you understand the meaning?";

export const Q2_PROMPT =
  "If the question is at least understandable, does the answer make sense in relation to the question?";

export const Q1_OPTIONS: { value: Q1Value; label: string }[] = [
  { value: "well_formed_and_understandable", label: "Both understandable and well-formed" },
  { value: "understandable_only", label: "Understandable, but not well-formed." },
  { value: "neither", label: "Neither" },
];

export const Q2_OPTIONS: { value: Q2Value; label: string }[] = [
  { value: "yes", label: "Yes" },
  { value: "no", label: "No" },
  { value: "dont_know", label: "I don't know" },
];

export class RatingDraft {
  q1: Q1Value | null = null;
  q2: Q2Value | null = null;

  q2Enabled(): boolean {
    return this.q1 !== null;
  }

  canSubmit(): boolean {
    if (this.q1 === null) return false;
    return this.q2 !== null || this.q1 === "neither";
  }

  toPayload(assessor: string, item: string): RatingPayload {
    if (this.q1 === null || !this.canSubmit()) {
      throw new Error("draft is not complete");
    }
    const payload: RatingPayload = { assessor, item, q1: this.q1 };
    if (this.q2 !== null) payload.q2 = this.q2;
    return payload;
  }
}
