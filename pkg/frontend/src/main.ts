// Browser wiring: connect the session state machine to the DOM. All
// geometry shown on screen comes from service responses via the scene
// renderer; this file only routes events and re-renders.

import { ApiClient } from "./api.js";
import { ALL_KINDS, canAuthor, describeConstraint, type Selection } from "./constraints.js";
import { renderScene, renderThumbnail } from "./scene.js";
import { Session } from "./session.js";
import type { CanvasRegion, ConstraintKind } from "./types.js";

const api = new ApiClient("");
let session: Session;
const selection: Selection = { elements: [] };

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function render(): void {
  el("canvas-host").innerHTML = session.currentLayout
    ? renderScene(session.currentLayout, {
        selected: selection.elements,
        highlightRegion: selection.region,
        showRegionBands: true,
      })
    : `<p class="placeholder">generate a layout to begin</p>`;

  const list = el("constraint-list");
  list.innerHTML = "";
  session.constraints.forEach((c, index) => {
    const row = document.createElement("li");
    const badge = c.badge
      ? `<span class="badge ${c.badge.satisfied ? "ok" : "bad"}${c.badge.stale ? " stale" : ""}"` +
        ` title="cost ${c.badge.cost.toExponential(2)}">` +
        `${c.badge.stale ? "…" : c.badge.satisfied ? "satisfied" : "violated"}</span>`
      : `<span class="badge none">unchecked</span>`;
    row.innerHTML = `${badge} <code>${describeConstraint(c.doc)}</code> `;
    const remove = document.createElement("button");
    remove.textContent = "remove";
    remove.onclick = () => {
      session.removeConstraint(index);
    };
    row.appendChild(remove);
    list.appendChild(row);
  });

  const kinds = el("kind-buttons");
  kinds.innerHTML = "";
  for (const kind of ALL_KINDS) {
    const button = document.createElement("button");
    button.textContent = kind;
    button.disabled = !canAuthor(selection, kind);
    button.onclick = () => {
      session.addConstraint({ ...selection, elements: [...selection.elements] }, kind as ConstraintKind);
      selection.elements = [];
      selection.region = undefined;
      render();
    };
    kinds.appendChild(button);
  }

  const strip = el("snapshot-strip");
  strip.innerHTML = "";
  for (const snapshot of session.snapshots) {
    const cell = document.createElement("figure");
    cell.className = "snapshot";
    cell.innerHTML =
      renderThumbnail(snapshot.layout) +
      `<figcaption>k=${snapshot.k}, worst ${Math.max(0, ...snapshot.h).toExponential(1)}</figcaption>`;
    const accept = document.createElement("button");
    accept.textContent = "accept";
    accept.onclick = () => {
      session.acceptSnapshot(snapshot.k);
    };
    cell.appendChild(accept);
    strip.appendChild(cell);
  }

  const status = el("status");
  if (session.status === "error") {
    status.textContent = `error: ${session.lastError}`;
    status.className = "error";
  } else if (session.status === "running") {
    status.textContent = `solving… ${session.snapshots.length} snapshot(s)`;
    status.className = "busy";
  } else if (session.finalReport) {
    const final = session.finalReport.final;
    status.textContent = final.satisfied
      ? `satisfied in ${session.finalReport.history.length} outer iteration(s)`
      : `unsatisfied (max violation ${final.max_violation.toExponential(2)}); pick a snapshot trade-off`;
    status.className = final.satisfied ? "ok" : "warn";
  } else {
    status.textContent = "ready";
    status.className = "";
  }
  (el("run-button") as HTMLButtonElement).disabled = session.status === "running";
}

function toggleElement(index: number): void {
  const at = selection.elements.indexOf(index);
  if (at >= 0) {
    selection.elements.splice(at, 1);
  } else {
    selection.elements.push(index);
    if (selection.elements.length > 2) selection.elements.shift();
  }
  render();
}

function wire(): void {
  el("canvas-host").addEventListener("click", (event) => {
    const group = (event.target as Element).closest("g.element");
    if (group) {
      toggleElement(Number(group.getAttribute("data-index")));
    }
  });

  for (const region of ["top", "middle", "bottom"] as CanvasRegion[]) {
    el(`region-${region}`).addEventListener("click", () => {
      selection.region = selection.region === region ? undefined : region;
      render();
    });
  }

  el("run-button").addEventListener("click", () => {
    void session.runAndStream();
  });

  el("reseed-button").addEventListener("click", () => {
    const seed = Number((el("seed-input") as HTMLInputElement).value) || 0;
    session.reseed(seed);
    void session.generateInitial();
  });
}

async function boot(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const model = params.get("model") ?? "analytic:2024:5";
  const labels = (params.get("labels") ?? "0,1,2,3")
    .split(",")
    .map((v) => Number(v.trim()));
  session = new Session(api, { model, labels, seed: 0 }, render);
  wire();
  await session.generateInitial();
}

void boot();
