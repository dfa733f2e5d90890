import { Api, NetworkError } from "./api.js";
import { buildDashboardModel, renderDashboard } from "./dashboard.js";
import { Session } from "./session.js";
import { renderLanding, renderSession } from "./view.js";

const api = new Api("");

async function showDashboard(root: HTMLElement): Promise<void> {
  try {
    const stats = await api.fetchStats();
    renderDashboard(root, buildDashboardModel(stats), () => {
      void showDashboard(root);
    });
  } catch (err) {
    const reason = err instanceof NetworkError ? "server unreachable" : String(err);
    root.textContent = `Statistics unavailable: ${reason}`;
  }
}

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) return;
  const params = new URLSearchParams(window.location.search);
  if (params.has("stats")) {
    await showDashboard(root);
    return;
  }
  const assessor = params.get("assessor");
  if (!assessor) {
    renderLanding(root);
    return;
  }
  const session = new Session(api, assessor);
  renderSession(root, session);
  await session.load();
  renderSession(root, session);
}

void boot();
