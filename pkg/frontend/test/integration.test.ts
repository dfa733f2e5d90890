// End-to-end against the real rating service: a scripted session works
// through the bundled 12-item fixture plan for every assessor, with the
// same client code the browser runs. Requires python3 with the backend
// package installed.

import { spawn, type ChildProcessWithoutNullStreams } from "node:child_process";
import { mkdtempSync, readFileSync } from "node:fs";
import net from "node:net";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { Api } from "../src/api.js";
import { buildDashboardModel } from "../src/dashboard.js";
import { formatKappa } from "../src/format.js";
import { Session } from "../src/session.js";
import type { Q1Value, Q2Value, RatingPayload, TaskView } from "../src/types.js";

let server: ChildProcessWithoutNullStreams;
let serverLog = "";
let base: string;
let api: Api;
let ratingsPath: string;

// Everything observed while the scripted sessions run, audited afterwards.
const seenTasks: TaskView[] = [];
const submitted: RatingPayload[] = [];

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const probe = net.createServer();
    probe.listen(0, "127.0.0.1", () => {
      const port = (probe.address() as net.AddressInfo).port;
      probe.close(() => resolve(port));
    });
    probe.on("error", reject);
  });
}

const sleep = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

// Deterministic rating keyed on the item id alone, so that every
// assessor gives the same answer to a shared item: the shared block is
// then in perfect agreement and the expected kappa is exactly 1.
const Q1_CYCLE: Q1Value[] = ["well_formed_and_understandable", "understandable_only", "neither"];

function plannedRating(item: string): { q1: Q1Value; q2: Q2Value | null } {
  const n = parseInt(item.slice(item.lastIndexOf("-") + 1), 10);
  const q1 = Q1_CYCLE[n % 3];
  if (q1 === "neither") {
    return { q1, q2: n % 2 === 0 ? null : "dont_know" };
  }
  return { q1, q2: n % 2 === 1 ? "yes" : "no" };
}

function fillDraft(session: Session, item: string): void {
  const { q1, q2 } = plannedRating(item);
  session.draft.q1 = q1;
  if (q2 !== null) session.draft.q2 = q2;
}

async function completeAll(session: Session): Promise<void> {
  let guard = 0;
  while (session.screen === "task") {
    if (++guard > 50) throw new Error("session did not reach the completion screen");
    const task = session.current()!;
    fillDraft(session, task.item);
    expect(session.draft.canSubmit()).toBe(true);
    submitted.push(session.draft.toPayload(session.assessor, task.item));
    await session.submit();
  }
  expect(session.screen).toBe("done");
}

beforeAll(async () => {
  ratingsPath = join(mkdtempSync(join(tmpdir(), "annotator-")), "ratings.jsonl");
  const port = await freePort();
  base = `http://127.0.0.1:${port}`;
  api = new Api(base);

  server = spawn("python3", [
    "-m", "mcqforge.testkit",
    "--port", String(port),
    "--ratings", ratingsPath,
  ]);
  server.stdout.on("data", (chunk) => (serverLog += chunk));
  server.stderr.on("data", (chunk) => (serverLog += chunk));

  const deadline = Date.now() + 30_000;
  for (;;) {
    try {
      const probe = await fetch(`${base}/api/progress`);
      if (probe.ok) break;
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) {
      throw new Error(`rating service did not come up:\n${serverLog}`);
    }
    await sleep(200);
  }
});

afterAll(async () => {
  if (!server) return;
  server.kill("SIGTERM");
  await new Promise<void>((resolve) => {
    const force = setTimeout(() => {
      server.kill("SIGKILL");
      resolve();
    }, 5_000);
    server.on("exit", () => {
      clearTimeout(force);
      resolve();
    });
  });
});

describe("scripted rating session", () => {
  it("completes every task for the first assessor, one confirmation at a time", async () => {
    const session = new Session(api, "assessor1");
    await session.load();
    expect(session.screen).toBe("task");
    seenTasks.push(...session.tasks);

    let expected = session.completed;
    while (session.screen === "task") {
      const task = session.current()!;
      fillDraft(session, task.item);
      submitted.push(session.draft.toPayload("assessor1", task.item));
      await session.submit();
      expect(session.notice).toBeNull();
      expected += 1;
      expect(session.completed).toBe(expected);
    }
    expect(session.screen).toBe("done");
    expect(session.completed).toBe(session.total);
  });

  it("surfaces a duplicate as a conflict and loses nothing", async () => {
    const session = new Session(api, "assessor2");
    await session.load();
    seenTasks.push(...session.tasks);
    const first = session.current()!;

    // a second tab wins the race on the first item
    const racing = plannedRating(first.item);
    const payload: RatingPayload = { assessor: "assessor2", item: first.item, q1: racing.q1 };
    if (racing.q2 !== null) payload.q2 = racing.q2;
    await api.submitRating(payload);
    submitted.push(payload);

    fillDraft(session, first.item);
    await session.submit();
    expect(session.notice?.kind).toBe("conflict");
    expect(session.current()?.item).not.toBe(first.item);

    await completeAll(session);
    expect(session.completed).toBe(session.total);
  });

  it("rejects a straight duplicate with 409 and keeps the stored count", async () => {
    const before = (await api.fetchStats()).n_ratings;
    await expect(api.submitRating(submitted[0])).rejects.toMatchObject({ status: 409 });
    const after = (await api.fetchStats()).n_ratings;
    expect(after).toBe(before);
  });

  it("saw every assessor finish", async () => {
    const progress = await api.fetchProgress();
    expect(Object.keys(progress.assessors).sort()).toEqual(["assessor1", "assessor2"]);
    expect(progress.completed).toBe(progress.total);
    for (const counts of Object.values(progress.assessors)) {
      expect(counts.completed).toBe(counts.total);
    }
  });

  it("never received a verdict or anything beyond the task fields", () => {
    expect(seenTasks.length).toBeGreaterThan(0);
    for (const task of seenTasks) {
      // context is absent too: the fixture service keeps it hidden
      expect(Object.keys(task).sort()).toEqual(["answer", "item", "position", "question", "total"]);
    }
    const raw = JSON.stringify(seenTasks);
    for (const leak of ["verdict", "accepted", "rejected", "source", "distractor"]) {
      expect(raw).not.toContain(leak);
    }
    expect(JSON.stringify(submitted)).not.toContain("verdict");
  });

  it("shows on the dashboard exactly what the server computed", async () => {
    const stats = await api.fetchStats();
    const model = buildDashboardModel(stats);

    // item-keyed ratings agree perfectly on the shared block
    expect(stats.kappa.q1.status).toBe("ok");
    expect(stats.kappa.q1.kappa).toBe(1.0);
    expect(model.kappa.q1.kappa).toBe(stats.kappa.q1.kappa);
    expect(model.kappa.q1.display).toBe("1.00");

    expect(model.kappa.q2.kappa).toBe(stats.kappa.q2.kappa);
    expect(model.kappa.q2.display).toBe(formatKappa(stats.kappa.q2));

    expect(model.chi.q1.display).toContain("p = ");
    expect(model.submitted).toBe(stats.n_ratings);
  });

  it("counts on the dashboard exactly as many ratings as the server journal", async () => {
    const stats = await api.fetchStats();
    const lines = readFileSync(ratingsPath, "utf8").split("\n").filter((l) => l.trim() !== "");
    expect(stats.n_ratings).toBe(16);
    expect(lines.length).toBe(stats.n_ratings);
    expect(buildDashboardModel(stats).submitted).toBe(lines.length);
  });
});
