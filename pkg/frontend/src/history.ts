// Client-side what-if history: the last N evaluations of a case, newest
// first, so the examiner can compare fused scores across config changes.

import type { EvidenceReport } from "./types";

export interface HistoryEntry {
  version: string;
  metric: string;
  n_references: number;
  fused_score: number;
  computed_at: string;
}

export class ReportHistory {
  private entries: HistoryEntry[] = [];

  constructor(private limit = 20) {}

  push(report: EvidenceReport): void {
    this.entries.unshift({
      version: report.version,
      metric: report.metric,
      n_references: report.n_references,
      fused_score: report.fused_score,
      computed_at: report.computed_at,
    });
    if (this.entries.length > this.limit) {
      this.entries.length = this.limit;
    }
  }

  list(): readonly HistoryEntry[] {
    return this.entries;
  }

  clear(): void {
    this.entries = [];
  }
}
