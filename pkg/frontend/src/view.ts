// DOM for the rating flow. Screens are rebuilt from session state on
// every change; no templating, no framework.

import { Q1_OPTIONS, Q1_PROMPT, Q2_OPTIONS, Q2_PROMPT } from "./draft.js";
import type { Session } from "./session.js";
import type { Q1Value, Q2Value } from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function field(label: string, text: string): HTMLElement {
  const wrap = el("div", "field");
  wrap.append(el("p", "field-label", label), el("p", "field-value", text));
  return wrap;
}

interface RadioChoice {
  value: string;
  label: string;
}

function questionBlock(
  name: string,
  prompt: string,
  options: RadioChoice[],
  selected: string | null,
  enabled: boolean,
  onSelect: (value: string) => void,
  note?: string,
): HTMLElement {
  const block = el("fieldset", `question ${name}`) as HTMLFieldSetElement;
  block.disabled = !enabled;
  block.append(el("legend", "prompt", prompt));
  for (const option of options) {
    const row = el("label", "option");
    const input = el("input") as HTMLInputElement;
    input.type = "radio";
    input.name = name;
    input.value = option.value;
    input.checked = selected === option.value;
    input.addEventListener("change", () => onSelect(option.value));
    row.append(input, document.createTextNode(option.label));
    block.append(row);
  }
  if (note) block.append(el("p", "note", note));
  return block;
}

function noticeBlock(session: Session, rerender: () => void): HTMLElement {
  if (session.notice === null) return el("span", "no-notice");
  const box = el("div", `notice ${session.notice.kind}`);
  box.append(el("p", undefined, session.notice.message));
  if (session.notice.kind === "network") {
    const retry = el("button", "retry", "Try again");
    retry.type = "button";
    retry.addEventListener("click", () => {
      void session.submit().then(rerender);
    });
    box.append(retry);
  }
  return box;
}

function taskScreen(session: Session, rerender: () => void): HTMLElement {
  const task = session.current();
  if (task === null) return doneScreen(session, rerender);

  const card = el("div", "card task");
  card.append(el("p", "progress", `Item ${task.position} of ${task.total}`));

  if (session.showContext && task.context !== undefined) {
    const details = el("details", "context");
    details.append(el("summary", undefined, "Context passage"));
    details.append(el("p", undefined, task.context));
    card.append(details);
  }

  card.append(field("Question", task.question));
  card.append(field("Answer", task.answer));

  card.append(
    questionBlock("q1", Q1_PROMPT, Q1_OPTIONS, session.draft.q1, true, (value) => {
      session.draft.q1 = value as Q1Value;
      rerender();
    }),
  );
  const q2Note =
    session.draft.q1 === "neither"
      ? "May be left unanswered when the question is rated Neither."
      : undefined;
  card.append(
    questionBlock(
      "q2",
      Q2_PROMPT,
      Q2_OPTIONS,
      session.draft.q2,
      session.draft.q2Enabled(),
      (value) => {
        session.draft.q2 = value as Q2Value;
        rerender();
      },
      q2Note,
    ),
  );

  const submit = el("button", "submit", "Submit rating");
  submit.type = "button";
  submit.disabled = !session.draft.canSubmit();
  submit.addEventListener("click", () => {
    void session.submit().then(rerender);
  });
  card.append(submit);
  card.append(noticeBlock(session, rerender));
  return card;
}

function doneScreen(session: Session, rerender: () => void): HTMLElement {
  const card = el("div", "card done");
  card.append(el("h1", undefined, "All tasks complete"));
  card.append(
    el("p", undefined, `${session.completed} of ${session.total} ratings recorded. Thank you.`),
  );
  card.append(noticeBlock(session, rerender));
  return card;
}

function errorScreen(session: Session): HTMLElement {
  const card = el("div", "card error");
  card.append(el("h1", undefined, "Cannot load tasks"));
  card.append(el("p", "message", session.error));
  card.append(el("p", undefined, "Check the assessor name in the address bar and reload."));
  return card;
}

export function renderSession(root: HTMLElement, session: Session): void {
  const rerender = () => renderSession(root, session);
  let screen: HTMLElement;
  switch (session.screen) {
    case "task":
      screen = taskScreen(session, rerender);
      break;
    case "done":
      screen = doneScreen(session, rerender);
      break;
    case "error":
      screen = errorScreen(session);
      break;
    default:
      screen = el("p", "loading", "Loading tasks ...");
  }
  root.replaceChildren(screen);
}

export function renderLanding(root: HTMLElement): void {
  const card = el("div", "card landing");
  card.append(el("h1", undefined, "Question rating"));
  card.append(el("p", undefined, "Enter your assessor name to begin."));

  const form = el("form");
  const input = el("input") as HTMLInputElement;
  input.type = "text";
  input.name = "assessor";
  input.placeholder = "assessor name";
  const go = el("button", "start", "Start rating");
  go.type = "submit";
  form.append(input, go);
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const name = input.value.trim();
    if (name) {
      window.location.search = `?assessor=${encodeURIComponent(name)}`;
    }
  });
  card.append(form);

  const statsLink = el("a", "stats-link", "View statistics");
  statsLink.setAttribute("href", "?stats");
  card.append(statsLink);
  root.replaceChildren(card);
}
