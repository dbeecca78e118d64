import type { ChannelEvidence, CurveSet, EvidenceReport } from "../src/types";

export function fakeCurve(lrQ = 0.5): CurveSet {
  const n = 256;
  const lr = Array.from({ length: n }, (_, i) => -4 + (8 * i) / (n - 1));
  const bump = (mu: number) => lr.map((x) => Math.exp(-0.5 * (x - mu) ** 2));
  const norm = (ys: number[]) => {
    const top = Math.max(...ys);
    return ys.map((y) => y / top);
  };
  return { lr, ubm_pdf: norm(bump(-1)), ref_pdf: norm(bump(2)), lr_q: lrQ };
}

export function fakeEvidence(lrQ: number, pU: number, pR: number | null): ChannelEvidence {
  return {
    delta1: 3.25,
    delta2: 1.5,
    lr_q: lrQ,
    p_u: pU,
    p_r: pR,
    ubm_fit: { mu: -1, sigma: 1, n_samples: 6 },
    ref_fit: pR === null ? null : { mu: 2, sigma: 0.5, n_samples: 2 },
  };
}

export function fakeReport(overrides: Partial<EvidenceReport> = {}): EvidenceReport {
  const curves: Record<string, CurveSet> = { g: fakeCurve(), qt: fakeCurve(1.25) };
  if (overrides.channels) {
    for (const ch of overrides.channels) curves[ch] = curves[ch] ?? fakeCurve();
  }
  return {
    schema_version: 1,
    metric: "l1",
    prob_mode: "oriented",
    n_references: 2,
    channels: ["g", "qt"],
    weights: { g: 0.11764705882352941, qt: 0.8823529411764706 },
    fused_score: 2.3456789012345,
    decision_threshold: null,
    decision: null,
    per_channel: {
      g: fakeEvidence(4.394449154672439, 0.0123456789, 0.876543219),
      qt: fakeEvidence(-0.75, 0.654321, 0.23456),
    },
    curves,
    case_id: "deadbeef",
    version: "v1",
    computed_at: "2026-01-01T00:00:00+00:00",
    ...overrides,
  };
}
