// @vitest-environment jsdom

import { beforeEach, describe, expect, it } from "vitest";

import { ApiError, type TaskBackend } from "../src/api.js";
import { Session } from "../src/session.js";
import { renderLanding, renderSession } from "../src/view.js";
import type { RatingPayload, SubmitResult, TaskQueue, TaskView } from "../src/types.js";

const tick = () => new Promise<void>((resolve) => setTimeout(resolve, 0));

function makeTask(i: number, total: number, context?: string): TaskView {
  const task: TaskView = {
    item: `item-${i}`,
    question: `where did cat ${i} sit`,
    answer: `on the mat ${i}`,
    position: i + 1,
    total,
  };
  if (context !== undefined) task.context = context;
  return task;
}

class StubBackend implements TaskBackend {
  rated = new Set<string>();
  submitted: RatingPayload[] = [];
  showContext = false;

  constructor(readonly items: TaskView[]) {}

  async fetchTasks(assessor: string): Promise<TaskQueue> {
    const tasks = this.items.filter((t) => !this.rated.has(t.item));
    return {
      assessor,
      total: this.items.length,
      completed: this.items.length - tasks.length,
      show_context: this.showContext,
      tasks,
    };
  }

  async submitRating(payload: RatingPayload): Promise<SubmitResult> {
    if (this.rated.has(payload.item)) throw new ApiError("duplicate rating", 409);
    this.rated.add(payload.item);
    this.submitted.push(payload);
    return {
      status: "recorded",
      assessor: payload.assessor,
      item: payload.item,
      completed: this.rated.size,
      total: this.items.length,
    };
  }
}

let root: HTMLElement;

beforeEach(() => {
  document.body.innerHTML = '<div id="app"></div>';
  root = document.getElementById("app")!;
});

async function mounted(backend: TaskBackend): Promise<Session> {
  const session = new Session(backend, "a1");
  await session.load();
  renderSession(root, session);
  return session;
}

const radio = (name: string, value: string) =>
  root.querySelector<HTMLInputElement>(`input[name="${name}"][value="${value}"]`)!;

const submitButton = () => root.querySelector<HTMLButtonElement>("button.submit")!;

describe("task screen", () => {
  it("shows both prompts with their exact wording", async () => {
    await mounted(new StubBackend([makeTask(0, 1)]));
    const legends = [...root.querySelectorAll("legend")].map((l) => l.textContent);
    expect(legends).toEqual([
      "Is the question well-formed and can you understand the meaning?",
      "If the question is at least understandable, does the answer make sense in relation to the question?",
    ]);
  });

  it("lists the three question-quality options verbatim", async () => {
    await mounted(new StubBackend([makeTask(0, 1)]));
    const labels = [...root.querySelectorAll("fieldset.q1 label")].map((l) =>
      l.textContent?.trim(),
    );
    expect(labels).toEqual([
      "Both understandable and well-formed",
      "Understandable, but not well-formed.",
      "Neither",
    ]);
  });

  it("shows question, answer and progress", async () => {
    await mounted(new StubBackend([makeTask(2, 8)]));
    expect(root.textContent).toContain("where did cat 2 sit");
    expect(root.textContent).toContain("on the mat 2");
    expect(root.textContent).toContain("Item 3 of 8");
  });

  it("keeps question 2 disabled until question 1 is answered", async () => {
    await mounted(new StubBackend([makeTask(0, 1)]));
    const q2 = root.querySelector<HTMLFieldSetElement>("fieldset.q2")!;
    expect(q2.disabled).toBe(true);
    expect(submitButton().disabled).toBe(true);

    radio("q1", "well_formed_and_understandable").click();
    await tick();
    expect(root.querySelector<HTMLFieldSetElement>("fieldset.q2")!.disabled).toBe(false);
    expect(submitButton().disabled).toBe(true);

    radio("q2", "yes").click();
    await tick();
    expect(submitButton().disabled).toBe(false);
  });

  it("unlocks submit without question 2 when the rating is Neither", async () => {
    await mounted(new StubBackend([makeTask(0, 1)]));
    radio("q1", "neither").click();
    await tick();
    expect(submitButton().disabled).toBe(false);
    expect(root.textContent).toContain("May be left unanswered");
  });

  it("hides the context passage unless the server enabled it", async () => {
    const withContext = [makeTask(0, 1, "the cat sat on the mat")];
    await mounted(new StubBackend(withContext));
    expect(root.querySelector("details.context")).toBeNull();

    const backend = new StubBackend(withContext);
    backend.showContext = true;
    await mounted(backend);
    expect(root.querySelector("details.context")?.textContent).toContain(
      "the cat sat on the mat",
    );
  });

  it("advances to the next item after submitting", async () => {
    const backend = new StubBackend([makeTask(0, 2), makeTask(1, 2)]);
    await mounted(backend);
    radio("q1", "neither").click();
    await tick();
    submitButton().click();
    await tick();
    expect(root.textContent).toContain("Item 2 of 2");
    expect(backend.submitted).toHaveLength(1);
    // fresh draft: everything locked again
    expect(root.querySelector<HTMLFieldSetElement>("fieldset.q2")!.disabled).toBe(true);
    expect(submitButton().disabled).toBe(true);
  });
});

describe("end states", () => {
  it("shows the completion screen when the queue is empty", async () => {
    const backend = new StubBackend([makeTask(0, 1)]);
    backend.rated.add("item-0");
    await mounted(backend);
    expect(root.textContent).toContain("All tasks complete");
    expect(root.textContent).toContain("1 of 1 ratings recorded");
    expect(root.querySelector("fieldset")).toBeNull();
  });

  it("shows the error screen for an unknown assessor", async () => {
    const backend = new StubBackend([]);
    backend.fetchTasks = async () => {
      throw new ApiError("unknown assessor: a1", 404);
    };
    await mounted(backend);
    expect(root.textContent).toContain("Cannot load tasks");
    expect(root.textContent).toContain("unknown assessor: a1");
  });
});

describe("notices", () => {
  it("shows a conflict toast and moves on after a duplicate", async () => {
    const backend = new StubBackend([makeTask(0, 2), makeTask(1, 2)]);
    const session = await mounted(backend);
    await backend.submitRating({ assessor: "a1", item: "item-0", q1: "neither" });

    radio("q1", "understandable_only").click();
    await tick();
    radio("q2", "no").click();
    await tick();
    submitButton().click();
    await tick();

    expect(root.querySelector(".notice.conflict")?.textContent).toContain("already rated");
    expect(session.current()?.item).toBe("item-1");
    expect(root.textContent).toContain("Item 2 of 2");
  });

  it("offers a retry after a network failure", async () => {
    const backend = new StubBackend([makeTask(0, 1)]);
    let healthy = false;
    const realSubmit = backend.submitRating.bind(backend);
    backend.submitRating = async (payload) => {
      if (!healthy) throw new (await import("../src/api.js")).NetworkError("refused");
      return realSubmit(payload);
    };

    await mounted(backend);
    radio("q1", "neither").click();
    await tick();
    submitButton().click();
    await tick();

    const retry = root.querySelector<HTMLButtonElement>(".notice.network button.retry");
    expect(retry).not.toBeNull();
    expect(root.textContent).toContain("Your answers are still here");
    // the selection survived the failure
    expect(radio("q1", "neither").checked).toBe(true);

    healthy = true;
    retry!.click();
    await tick();
    expect(root.textContent).toContain("All tasks complete");
    expect(backend.submitted).toHaveLength(1);
  });
});

describe("landing", () => {
  it("renders a name form and a statistics link", () => {
    renderLanding(root);
    expect(root.querySelector("input[name=assessor]")).not.toBeNull();
    expect(root.querySelector("a.stats-link")?.getAttribute("href")).toBe("?stats");
  });
});
