// @vitest-environment jsdom

import { beforeEach, describe, expect, it } from "vitest";

import { buildDashboardModel, renderDashboard } from "../src/dashboard.js";
import type { Stats } from "../src/types.js";

function okStats(): Stats {
  return {
    n_ratings: 16,
    kappa: {
      q1: {
        status: "ok",
        kappa: 0.55,
        complete_items: 3,
        mean_observed_agreement: 7 / 9,
        expected_agreement: 41 / 81,
      },
      q2: { status: "ok", kappa: 1.0, complete_items: 3 },
    },
    chi_squared: {
      q1: { status: "ok", statistic: 100 / 15, df: 2, p_value: 0.0357, table: [[20, 10, 10], [10, 10, 20]] },
      q2: { status: "ok", statistic: 1.84, df: 2, p_value: 0.398, table: [[5, 3, 2], [4, 4, 2]] },
    },
    aggregate: {
      q1: {
        accepted: { well_formed_and_understandable: 70.0, understandable_only: 18.0, neither: 12.0 },
        rejected: { well_formed_and_understandable: 69.0, understandable_only: 14.0, neither: 18.0 },
      },
      q2: {
        accepted: { yes: 50.0, no: 31.25, dont_know: 18.75 },
        rejected: { yes: 56.0, no: 30.0, dont_know: 14.0 },
      },
    },
  };
}

function pendingStats(): Stats {
  return {
    n_ratings: 0,
    kappa: {
      q1: { status: "pending", kappa: null, complete_items: 0 },
      q2: { status: "pending", kappa: null, complete_items: 0 },
    },
    chi_squared: {
      q1: { status: "pending", statistic: null, df: null, p_value: null, table: [[0, 0, 0], [0, 0, 0]] },
      q2: { status: "pending", statistic: null, df: null, p_value: null, table: [[0, 0, 0], [0, 0, 0]] },
    },
    aggregate: {
      q1: {
        accepted: { well_formed_and_understandable: 0.0, understandable_only: 0.0, neither: 0.0 },
        rejected: { well_formed_and_understandable: 0.0, understandable_only: 0.0, neither: 0.0 },
      },
      q2: {
        accepted: { yes: 0.0, no: 0.0, dont_know: 0.0 },
        rejected: { yes: 0.0, no: 0.0, dont_know: 0.0 },
      },
    },
  };
}

let root: HTMLElement;

beforeEach(() => {
  document.body.innerHTML = '<div id="app"></div>';
  root = document.getElementById("app")!;
});

describe("buildDashboardModel", () => {
  it("passes the agreement values through untouched", () => {
    const stats = okStats();
    const model = buildDashboardModel(stats);
    expect(Object.is(model.kappa.q1.kappa, stats.kappa.q1.kappa)).toBe(true);
    expect(Object.is(model.kappa.q2.kappa, stats.kappa.q2.kappa)).toBe(true);
    expect(model.submitted).toBe(stats.n_ratings);
  });

  it("derives the display strings", () => {
    const model = buildDashboardModel(okStats());
    expect(model.kappa.q1.display).toBe("0.55");
    expect(model.kappa.q2.display).toBe("1.00");
    expect(model.chi.q1.display).toBe("chi-squared = 6.67, df = 2, p = 0.036");
  });

  it("lays the bars out by category with both groups", () => {
    const model = buildDashboardModel(okStats());
    expect(model.bars.q1.map((r) => r.label)).toEqual([
      "Well-formed and understandable",
      "Only understandable",
      "Neither",
    ]);
    expect(model.bars.q2.map((r) => r.label)).toEqual(["Yes", "No", "I don't know"]);
    expect(model.bars.q1[0]).toEqual({
      label: "Well-formed and understandable",
      accepted: 70.0,
      rejected: 69.0,
    });
  });
});

describe("renderDashboard", () => {
  it("shows agreement, tests, counts and bars", () => {
    renderDashboard(root, buildDashboardModel(okStats()));
    const text = root.textContent ?? "";
    expect(text).toContain("16 ratings submitted");
    expect(text).toContain("0.55");
    expect(text).toContain("1.00");
    expect(text).toContain("p = 0.036");
    expect(text).toContain("Question 1 (question quality)");
    expect(text).toContain("Question 2 (answer compatibility)");

    const fills = [...root.querySelectorAll(".bars .bar.accepted .fill")] as HTMLElement[];
    expect(fills[0].style.width).toBe("70%");
    const pcts = [...root.querySelectorAll(".bars .bar-row")][0].textContent;
    expect(pcts).toContain("70%");
    expect(pcts).toContain("69%");
  });

  it("shows pending states and never NaN", () => {
    renderDashboard(root, buildDashboardModel(pendingStats()));
    const text = root.textContent ?? "";
    expect(text).toContain("pending");
    expect(text).not.toContain("NaN");
    expect(text).toContain("0 ratings submitted");
    for (const fill of root.querySelectorAll(".fill") as NodeListOf<HTMLElement>) {
      expect(fill.style.width).toBe("0%");
    }
  });

  it("wires the refresh callback", () => {
    let refreshed = 0;
    renderDashboard(root, buildDashboardModel(okStats()), () => {
      refreshed += 1;
    });
    root.querySelector<HTMLButtonElement>("button.refresh")!.click();
    expect(refreshed).toBe(1);
  });
});
