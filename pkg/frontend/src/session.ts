/**
 * One assessor working through their queue, one item per screen.
 *
 * The server is the source of truth: the queue is fetched on load (so a
 * refresh resumes at the same pending item) and every submission is
 * confirmed before the UI advances. A rating that fails to reach the
 * server stays in the draft and the screen offers a retry instead of
 * advancing; a duplicate means the first rating already won server-side,
 * so the session surfaces a notice and moves on.
 */

import { ApiError, NetworkError, type TaskBackend } from "./api.js";
import { RatingDraft } from "./draft.js";
import type { TaskView } from "./types.js";

export type Screen = "loading" | "task" | "done" | "error";

export interface Notice {
  kind: "conflict" | "network" | "rejected";
  message: string;
}

export class Session {
  screen: Screen = "loading";
  tasks: TaskView[] = [];
  index = 0;
  draft = new RatingDraft();
  completed = 0;
  total = 0;
  showContext = false;
  notice: Notice | null = null;
  error = "";

  constructor(readonly backend: TaskBackend, readonly assessor: string) {}

  async load(): Promise<void> {
    try {
      const queue = await this.backend.fetchTasks(this.assessor);
      this.tasks = queue.tasks;
      this.total = queue.total;
      this.completed = queue.completed;
      this.showContext = queue.show_context;
      this.index = 0;
      this.draft = new RatingDraft();
      this.screen = this.tasks.length === 0 ? "done" : "task";
    } catch (err) {
      this.screen = "error";
      this.error = err instanceof Error ? err.message : String(err);
    }
  }

  current(): TaskView | null {
    if (this.screen !== "task") return null;
    return this.tasks[this.index] ?? null;
  }

  private advance(): void {
    this.draft = new RatingDraft();
    this.index += 1;
    if (this.index >= this.tasks.length) this.screen = "done";
  }

  async submit(): Promise<void> {
    const task = this.current();
    if (task === null || !this.draft.canSubmit()) return;
    const payload = this.draft.toPayload(this.assessor, task.item);
    try {
      const result = await this.backend.submitRating(payload);
      this.completed = result.completed;
      this.total = result.total;
      this.notice = null;
      this.advance();
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        // Already rated, e.g. from another tab; the first rating wins
        // server-side, so there is nothing to save here.
        this.notice = {
          kind: "conflict",
          message: "This item was already rated; the earlier rating was kept.",
        };
        this.advance();
      } else if (err instanceof NetworkError) {
        // Draft stays as entered; nothing was recorded.
        this.notice = {
          kind: "network",
          message: "Could not reach the server. Your answers are still here; try again.",
        };
      } else {
        this.notice = {
          kind: "rejected",
          message: err instanceof Error ? err.message : String(err),
        };
      }
    }
  }
}
