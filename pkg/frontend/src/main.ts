// Workbench bootstrap: wires the case controls, uploads, config toggles,
// evaluation, and the history panel together. All evidence values come
// from service responses; the client only renders.

import { ApiError, ServiceClient } from "./api";
import { ReportHistory } from "./history";
import { displayedValues, fmt, renderEvidence } from "./render";
import { CaseView } from "./state";
import type { UbmDescriptor } from "./types";

const client = new ServiceClient("");
const view = new CaseView();
const history = new ReportHistory(20);

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

const CHANNELS = ["g", "qt", "rl", "t1", "t2", "t3", "t4"];
let selectedChannel: string | undefined;

function setStatus(text: string, isError = false): void {
  const el = $("status");
  el.textContent = text;
  el.className = isError ? "status error" : "status";
}

function describeError(err: unknown): string {
  if (err instanceof ApiError) return `[${err.code}] ${err.message}`;
  return String(err);
}

function renderStaleBanner(): void {
  $("stale-banner").style.display = view.needsReevaluate ? "block" : "none";
}

function renderReferences(): void {
  const list = $("reference-list");
  list.innerHTML = view.references
    .map(
      (r) =>
        `<li>${r.name} <button class="remove" data-sid="${r.specimenId}">remove</button></li>`,
    )
    .join("");
  $("questioned-name").textContent = view.questioned?.name ?? "none";
  for (const btn of Array.from(list.querySelectorAll("button.remove"))) {
    btn.addEventListener("click", async () => {
      const sid = btn.getAttribute("data-sid")!;
      try {
        await client.removeSpecimen(view.caseId!, sid);
        view.removeSpecimen(sid);
        renderReferences();
        renderEvaluateGate();
        renderStaleBanner();
      } catch (err) {
        setStatus(describeError(err), true);
      }
    });
  }
}

function renderEvaluateGate(): void {
  const button = $<HTMLButtonElement>("evaluate");
  const hint = view.evaluateHint();
  button.disabled = hint !== null || view.busy;
  $("evaluate-hint").textContent = hint ?? "";
}

function renderHistory(): void {
  $("history").innerHTML = history
    .list()
    .map(
      (h) =>
        `<li><code>${h.version}</code> ${h.metric}, ${h.n_references} ref(s): ` +
        `<b>${fmt(h.fused_score)}</b></li>`,
    )
    .join("");
}

function currentConfig() {
  const metric = $<HTMLSelectElement>("metric").value;
  const channels = CHANNELS.filter(
    (ch) => $<HTMLInputElement>(`ch-${ch}`).checked,
  );
  const ubmId = $<HTMLSelectElement>("ubm").value;
  return { metric, channels, ubm_id: ubmId };
}

async function pushConfig(): Promise<void> {
  if (!view.caseId) return;
  try {
    await client.setConfig(view.caseId, currentConfig());
    view.markMutated();
    renderStaleBanner();
    setStatus("config updated; re-evaluate to refresh the evidence");
  } catch (err) {
    setStatus(describeError(err), true);
  }
}

async function evaluate(): Promise<void> {
  if (!view.canEvaluate) return;
  const signal = view.beginEvaluation();
  renderEvaluateGate();
  setStatus("evaluating...");
  try {
    const report = await client.evaluate(view.caseId!, signal);
    view.finishEvaluation(report);
    history.push(report);
    renderEvidence($("evidence"), report, { selectedChannel });
    wireChannelTabs();
    renderHistory();
    renderStaleBanner();
    setStatus(`report ${report.version} rendered`);
  } catch (err) {
    view.failEvaluation();
    if (!(err instanceof DOMException && err.name === "AbortError")) {
      setStatus(describeError(err), true);
    }
  } finally {
    renderEvaluateGate();
  }
}

function wireChannelTabs(): void {
  for (const tab of Array.from($("evidence").querySelectorAll("button.tab"))) {
    tab.addEventListener("click", () => {
      selectedChannel = tab.getAttribute("data-tab") ?? undefined;
      if (view.lastReport) {
        renderEvidence($("evidence"), view.lastReport, { selectedChannel });
        wireChannelTabs();
      }
    });
  }
}

async function upload(role: "questioned" | "reference", input: HTMLInputElement) {
  const file = input.files?.[0];
  if (!file || !view.caseId) return;
  try {
    const sid = await client.uploadSpecimen(
      view.caseId,
      role,
      file,
      file.type || "image/png",
    );
    view.addSpecimen({ specimenId: sid, role, name: file.name });
    renderReferences();
    renderEvaluateGate();
    renderStaleBanner();
    setStatus(`${role} ${file.name} uploaded as ${sid}`);
  } catch (err) {
    setStatus(describeError(err), true);
  } finally {
    input.value = "";
  }
}

async function boot(): Promise<void> {
  let ubms: UbmDescriptor[] = [];
  try {
    ubms = await client.listUbms();
  } catch (err) {
    setStatus(describeError(err), true);
  }
  $("ubm").innerHTML = ubms
    .map(
      (u) =>
        `<option value="${u.ubm_id}">${u.ubm_id} (${u.origin}, ${u.size})</option>`,
    )
    .join("");

  $("new-case").addEventListener("click", async () => {
    try {
      const caseId = await client.createCase();
      view.openCase(caseId);
      history.clear();
      $("case-id").textContent = caseId;
      $("evidence").innerHTML = "";
      renderReferences();
      renderHistory();
      renderEvaluateGate();
      renderStaleBanner();
      await pushConfig();
      setStatus(`case ${caseId} opened`);
    } catch (err) {
      setStatus(describeError(err), true);
    }
  });

  $("evaluate").addEventListener("click", evaluate);
  $("metric").addEventListener("change", pushConfig);
  $("ubm").addEventListener("change", pushConfig);
  for (const ch of CHANNELS) {
    $(`ch-${ch}`).addEventListener("change", pushConfig);
  }
  $<HTMLInputElement>("upload-questioned").addEventListener("change", (e) =>
    upload("questioned", e.target as HTMLInputElement),
  );
  $<HTMLInputElement>("upload-reference").addEventListener("change", (e) =>
    upload("reference", e.target as HTMLInputElement),
  );
  renderEvaluateGate();
}

// expose for the scripted end-to-end flow
declare global {
  interface Window {
    sigproof: {
      client: ServiceClient;
      view: CaseView;
      history: ReportHistory;
      displayedValues: typeof displayedValues;
    };
  }
}

if (typeof document !== "undefined" && document.getElementById("new-case")) {
  void boot();
  window.sigproof = { client, view, history, displayedValues };
}
