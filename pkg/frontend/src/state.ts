// Case view-state: which report is current, whether it is stale relative
// to the case (any mutation marks it stale until the next successful
// evaluation), and the single in-flight evaluation slot.

import type { EvidenceReport } from "./types";

export interface SpecimenRef {
  specimenId: string;
  role: "questioned" | "reference";
  name: string;
}

export class CaseView {
  caseId: string | null = null;
  questioned: SpecimenRef | null = null;
  references: SpecimenRef[] = [];
  lastReport: EvidenceReport | null = null;
  reportVersion: string | null = null;
  stale = false;
  busy = false;
  private inflight: AbortController | null = null;

  openCase(caseId: string): void {
    this.caseId = caseId;
    this.questioned = null;
    this.references = [];
    this.lastReport = null;
    this.reportVersion = null;
    this.stale = false;
    this.cancelInflight();
  }

  // any mutation invalidates the rendered report
  markMutated(): void {
    if (this.lastReport !== null) {
      this.stale = true;
    }
  }

  addSpecimen(ref: SpecimenRef): void {
    if (ref.role === "questioned") {
      this.questioned = ref;
    } else {
      this.references.push(ref);
    }
    this.markMutated();
  }

  removeSpecimen(specimenId: string): void {
    if (this.questioned?.specimenId === specimenId) {
      this.questioned = null;
    }
    this.references = this.references.filter((r) => r.specimenId !== specimenId);
    this.markMutated();
  }

  get canEvaluate(): boolean {
    return this.caseId !== null && this.questioned !== null && this.references.length > 0;
  }

  evaluateHint(): string | null {
    if (this.caseId === null) return "create a case first";
    if (this.questioned === null) return "upload a questioned signature";
    if (this.references.length === 0) return "add at least one reference";
    return null;
  }

  // newer evaluations cancel older in-flight ones
  beginEvaluation(): AbortSignal {
    this.cancelInflight();
    this.inflight = new AbortController();
    this.busy = true;
    return this.inflight.signal;
  }

  finishEvaluation(report: EvidenceReport): void {
    this.lastReport = report;
    this.reportVersion = report.version;
    this.stale = false;
    this.busy = false;
    this.inflight = null;
  }

  failEvaluation(): void {
    this.busy = false;
    this.inflight = null;
  }

  cancelInflight(): void {
    if (this.inflight !== null) {
      this.inflight.abort();
      this.inflight = null;
    }
    this.busy = false;
  }

  // true when the rendered report no longer corresponds to the case state
  get needsReevaluate(): boolean {
    return this.stale && this.lastReport !== null;
  }
}
