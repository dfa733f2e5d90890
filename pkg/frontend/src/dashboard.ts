/**
 * Statistics view: agreement on the shared block, the accepted/rejected
 * chi-squared tests, and percentage bars per rating category.
 *
 * buildDashboardModel is pure and keeps the server's numbers untouched
 * (display strings are derived, the raw values pass straight through),
 * so what the dashboard claims is exactly what the server computed.
 */

import { barWidth, formatChi2, formatKappa, formatPercent } from "./format.js";
import type { Chi2Block, GroupSplit, Stats } from "./types.js";

export interface KappaView {
  status: string;
  kappa: number | null;
  display: string;
  completeItems: number;
}

export interface Chi2View {
  display: string;
  table: number[][];
}

export interface BarRow {
  label: string;
  accepted: number;
  rejected: number;
}

export interface DashboardModel {
  submitted: number;
  kappa: { q1: KappaView; q2: KappaView };
  chi: { q1: Chi2View; q2: Chi2View };
  bars: { q1: BarRow[]; q2: BarRow[] };
}

const Q1_ROWS: [string, string][] = [
  ["well_formed_and_understandable", "Well-formed and understandable"],
  ["understandable_only", "Only understandable"],
  ["neither", "Neither"],
];

const Q2_ROWS: [string, string][] = [
  ["yes", "Yes"],
  ["no", "No"],
  ["dont_know", "I don't know"],
];

const SECTION_TITLES = {
  q1: "Question 1 (question quality)",
  q2: "Question 2 (answer compatibility)",
};

function kappaView(block: Stats["kappa"]["q1"]): KappaView {
  return {
    status: block.status,
    kappa: block.kappa,
    display: formatKappa(block),
    completeItems: block.complete_items,
  };
}

function chiView(block: Chi2Block): Chi2View {
  return { display: formatChi2(block), table: block.table };
}

function barRows(split: GroupSplit, rows: [string, string][]): BarRow[] {
  return rows.map(([key, label]) => ({
    label,
    accepted: split.accepted[key] ?? 0,
    rejected: split.rejected[key] ?? 0,
  }));
}

export function buildDashboardModel(stats: Stats): DashboardModel {
  return {
    submitted: stats.n_ratings,
    kappa: { q1: kappaView(stats.kappa.q1), q2: kappaView(stats.kappa.q2) },
    chi: { q1: chiView(stats.chi_squared.q1), q2: chiView(stats.chi_squared.q2) },
    bars: {
      q1: barRows(stats.aggregate.q1, Q1_ROWS),
      q2: barRows(stats.aggregate.q2, Q2_ROWS),
    },
  };
}

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

function bar(group: "accepted" | "rejected", pct: number): HTMLElement {
  const wrap = el("div", `bar ${group}`);
  const fill = el("span", "fill");
  fill.style.width = `${barWidth(pct)}%`;
  wrap.append(fill, el("span", "pct", formatPercent(pct)));
  return wrap;
}

function barSection(title: string, rows: BarRow[]): HTMLElement {
  const section = el("section", "bars");
  section.append(el("h2", undefined, title));
  for (const row of rows) {
    const line = el("div", "bar-row");
    line.append(el("span", "bar-label", row.label));
    line.append(bar("accepted", row.accepted));
    line.append(bar("rejected", row.rejected));
    section.append(line);
  }
  return section;
}

export function renderDashboard(
  root: HTMLElement,
  model: DashboardModel,
  onRefresh?: () => void,
): void {
  const page = el("div", "dashboard");
  page.append(el("h1", undefined, "Rating statistics"));
  page.append(el("p", "submitted", `${model.submitted} ratings submitted`));

  const agreement = el("section", "agreement");
  agreement.append(el("h2", undefined, "Agreement on shared items"));
  for (const q of ["q1", "q2"] as const) {
    const view = model.kappa[q];
    const line = el("p", `kappa ${q}`);
    line.append(el("span", "name", SECTION_TITLES[q] + ": "));
    line.append(el("span", "value", view.display));
    line.append(el("span", "detail", ` (${view.completeItems} fully rated items)`));
    agreement.append(line);
  }
  page.append(agreement);

  const tests = el("section", "chi");
  tests.append(el("h2", undefined, "Accepted vs rejected"));
  for (const q of ["q1", "q2"] as const) {
    const line = el("p", `chi2 ${q}`);
    line.append(el("span", "name", SECTION_TITLES[q] + ": "));
    line.append(el("span", "value", model.chi[q].display));
    tests.append(line);
  }
  page.append(tests);

  const legend = el("p", "legend");
  legend.append(el("span", "accepted", "accepted"), el("span", "rejected", "rejected"));
  page.append(legend);
  page.append(barSection(SECTION_TITLES.q1, model.bars.q1));
  page.append(barSection(SECTION_TITLES.q2, model.bars.q2));

  if (onRefresh) {
    const refresh = el("button", "refresh", "Refresh");
    refresh.type = "button";
    refresh.addEventListener("click", onRefresh);
    page.append(refresh);
  }
  root.replaceChildren(page);
}
