/**
 * Browser bootstrap: wires pointer/keyboard input, the WebSocket bridge
 * connection, the render loop and the review table together. All trial
 * logic lives in trialView.ts; all drawing geometry in scene.ts.
 */

import { WebSocketConnection } from "./connection.js";
import { Condition } from "./protocol.js";
import { paint } from "./render.js";
import { groupByCondition, parseResultsCsv } from "./review.js";
import { buildScene, defaultLayout, screenToWorld } from "./scene.js";
import { TrialView } from "./trialView.js";

const RECONNECT_DELAY_MS = 1500;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function bridgeUrl(): string {
  const params = new URLSearchParams(location.search);
  return params.get("ws") ?? `ws://${location.hostname || "127.0.0.1"}:8788`;
}

function currentCondition(): Condition {
  return (el<HTMLSelectElement>("condition").value as Condition) ?? "haptics_only";
}

let view: TrialView | null = null;

function connect(): void {
  const participant = el<HTMLInputElement>("participant").value || "anon";
  const condition = currentCondition();
  const socket = new WebSocket(bridgeUrl());
  socket.addEventListener("open", () => {
    const connection = new WebSocketConnection(socket);
    view = new TrialView(connection, participant, condition);
    view.start();
  });
  socket.addEventListener("close", () => {
    setTimeout(connect, RECONNECT_DELAY_MS); // banner shows meanwhile
  });
}

function renderReviewTable(): void {
  const table = el<HTMLTableElement>("review");
  const completed = view?.view().completed ?? [];
  const rows = completed
    .map((c) => `<tr><td>${c.trial}</td><td>${c.zone}</td>` +
      `<td>${c.direction_deg}</td><td>${c.deviation_mm}</td>` +
      `<td>${c.time_s}</td></tr>`)
    .join("");
  table.innerHTML =
    "<tr><th>trial</th><th>zone</th><th>dir</th><th>deviation mm</th><th>time s</th></tr>" +
    (rows || "<tr><td colspan=5>no completed trials yet</td></tr>");
}

function renderReviewFile(text: string): void {
  const table = el<HTMLTableElement>("review");
  const groups = groupByCondition(parseResultsCsv(text));
  let html = "<tr><th>condition</th><th>participant</th><th>zone</th>" +
    "<th>dir</th><th>deviation mm</th><th>time s</th></tr>";
  for (const [condition, rows] of groups) {
    for (const r of rows) {
      html += `<tr><td>${condition}</td><td>${r.participant}</td>` +
        `<td>${r.zone}</td><td>${r.direction_deg}</td>` +
        `<td>${r.deviation_mm}</td><td>${r.time_s}</td></tr>`;
    }
  }
  table.innerHTML = html;
}

window.addEventListener("load", () => {
  const canvas = el<HTMLCanvasElement>("view");
  const ctx = canvas.getContext("2d");
  if (!ctx) throw new Error("no 2d context");
  const layout = defaultLayout(canvas.width, canvas.height);

  canvas.addEventListener("pointermove", (ev) => {
    const rect = canvas.getBoundingClientRect();
    const { x_mm, y_mm } = screenToWorld(
      layout, ev.clientX - rect.left, ev.clientY - rect.top);
    view?.moveTool(x_mm, y_mm);
  });
  canvas.addEventListener("wheel", (ev) => {
    ev.preventDefault();
    view?.adjustHeight(ev.deltaY > 0 ? -0.5 : 0.5);
  }, { passive: false });
  window.addEventListener("keydown", (ev) => {
    if (ev.code === "Space") {
      ev.preventDefault();
      view?.confirm();
    } else if (ev.key === "q") {
      view?.adjustHeight(0.5);
    } else if (ev.key === "a") {
      view?.adjustHeight(-0.5);
    }
  });

  el<HTMLButtonElement>("connect").addEventListener("click", () => connect());
  el<HTMLInputElement>("results-file").addEventListener("change", async (ev) => {
    const input = ev.target as HTMLInputElement;
    const file = input.files?.[0];
    if (file) renderReviewFile(await file.text());
  });

  const frame = () => {
    if (view) {
      paint(ctx, buildScene(view.view(), layout), canvas.width, canvas.height);
      renderReviewTable();
    }
    requestAnimationFrame(frame);
  };
  requestAnimationFrame(frame);
});
