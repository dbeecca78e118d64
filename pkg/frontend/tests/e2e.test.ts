// Scripted workbench flow against a live verification service.
//
// Gated on SERVICE_URL (and E2E_ASSETS pointing at a directory with
// questioned.png / reference1.png / reference2.png); scripts/run_e2e.sh
// boots a service with a toy universe model and runs this file.

import { readFileSync } from "node:fs";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { ServiceClient } from "../src/api";
import { displayedValues, renderEvidence } from "../src/render";
import { CaseView } from "../src/state";
import { ReportHistory } from "../src/history";
import type { EvidenceReport } from "../src/types";

const SERVICE_URL = process.env.SERVICE_URL ?? "";
const ASSETS = process.env.E2E_ASSETS ?? "";

const maybe = SERVICE_URL && ASSETS ? describe : describe.skip;

function png(name: string): Blob {
  const buf = readFileSync(join(ASSETS, name));
  const copy = new ArrayBuffer(buf.byteLength);
  new Uint8Array(copy).set(buf);
  return new Blob([copy], { type: "image/png" });
}

function assertRenderedMatchesJson(el: HTMLElement, report: EvidenceReport): void {
  const shown = displayedValues(el);
  const expectExact = (field: string, value: number) => {
    expect(shown[field]).toBe(String(value));
    expect(Object.is(Number(shown[field]), value)).toBe(true);
  };
  expectExact("fused_score", report.fused_score);
  expectExact("n_references", report.n_references);
  for (const ch of report.channels) {
    const ev = report.per_channel[ch]!;
    expectExact(`per_channel.${ch}.lr_q`, ev.lr_q);
    expectExact(`per_channel.${ch}.p_u`, ev.p_u);
    expectExact(`weights.${ch}`, report.weights[ch]!);
    if (ev.p_r === null) {
      expect(shown[`per_channel.${ch}.p_r`]).toBe("");
    } else {
      expectExact(`per_channel.${ch}.p_r`, ev.p_r);
    }
  }
}

maybe("workbench against a live service", () => {
  it("runs the scripted what-if flow and renders three exact reports", async () => {
    const client = new ServiceClient(SERVICE_URL);
    const view = new CaseView();
    const history = new ReportHistory(20);
    const el = document.createElement("div");
    document.body.appendChild(el);

    const ubms = await client.listUbms();
    expect(ubms.length).toBeGreaterThan(0);

    const caseId = await client.createCase();
    view.openCase(caseId);

    const qid = await client.uploadSpecimen(
      caseId, "questioned", png("questioned.png"));
    view.addSpecimen({ specimenId: qid, role: "questioned", name: "questioned.png" });
    const r1 = await client.uploadSpecimen(
      caseId, "reference", png("reference1.png"));
    view.addSpecimen({ specimenId: r1, role: "reference", name: "reference1.png" });
    expect(view.canEvaluate).toBe(true);

    // evaluation 1: single reference, P(U) only
    const report1 = await client.evaluate(caseId, view.beginEvaluation());
    view.finishEvaluation(report1);
    history.push(report1);
    expect(renderEvidence(el, report1)).not.toBeNull();
    assertRenderedMatchesJson(el, report1);
    expect(report1.n_references).toBe(1);
    for (const ch of report1.channels) {
      expect(report1.per_channel[ch]!.p_r).toBeNull();
    }
    expect(el.innerHTML).toContain("needs");

    // mutation: the stored report is cleared server-side, stale client-side
    const r2 = await client.uploadSpecimen(
      caseId, "reference", png("reference2.png"));
    view.addSpecimen({ specimenId: r2, role: "reference", name: "reference2.png" });
    expect(view.needsReevaluate).toBe(true);
    await expect(client.getReport(caseId)).rejects.toMatchObject({
      code: "report_not_found",
    });

    // evaluation 2: P(R) appears
    const report2 = await client.evaluate(caseId, view.beginEvaluation());
    view.finishEvaluation(report2);
    history.push(report2);
    expect(view.needsReevaluate).toBe(false);
    renderEvidence(el, report2);
    assertRenderedMatchesJson(el, report2);
    expect(report2.n_references).toBe(2);
    for (const ch of report2.channels) {
      const pr = report2.per_channel[ch]!.p_r;
      expect(pr).not.toBeNull();
      expect(pr!).toBeGreaterThanOrEqual(0);
      expect(pr!).toBeLessThanOrEqual(1);
    }
    expect(report2.version).not.toBe(report1.version);

    // switch metric, evaluation 3
    await client.setConfig(caseId, { metric: "cosine" });
    view.markMutated();
    expect(view.needsReevaluate).toBe(true);
    const report3 = await client.evaluate(caseId, view.beginEvaluation());
    view.finishEvaluation(report3);
    history.push(report3);
    renderEvidence(el, report3);
    assertRenderedMatchesJson(el, report3);
    expect(report3.metric).toBe("cosine");
    expect(
      el.querySelector(".evidence")!.getAttribute("data-metric"),
    ).toBe("cosine");

    // the history panel saw all three fused scores, newest first
    const fused = history.list().map((h) => h.fused_score);
    expect(fused).toEqual([report3.fused_score, report2.fused_score,
                           report1.fused_score]);

    // the served report equals the rendered one
    const stored = await client.getReport(caseId);
    expect(stored).toEqual(report3);
  }, 120_000);
});
