// Shapes of the service JSON payloads, plus ingest validation. The
// workbench never computes evidence itself: everything rendered comes out
// of these objects untouched.

export interface GaussianFit {
  mu: number;
  sigma: number;
  n_samples: number;
}

export interface ChannelEvidence {
  delta1: number;
  delta2: number;
  lr_q: number;
  p_u: number;
  p_r: number | null;
  ubm_fit: GaussianFit;
  ref_fit: GaussianFit | null;
}

export interface CurveSet {
  lr: number[];
  ubm_pdf: number[];
  ref_pdf: number[] | null;
  lr_q: number;
}

export interface EvidenceReport {
  schema_version: number;
  metric: string;
  prob_mode: string;
  n_references: number;
  channels: string[];
  weights: Record<string, number>;
  fused_score: number;
  decision_threshold: number | null;
  decision: string | null;
  per_channel: Record<string, ChannelEvidence>;
  curves: Record<string, CurveSet>;
  case_id: string;
  version: string;
  computed_at: string;
}

export interface UbmDescriptor {
  ubm_id: string;
  origin: string;
  size: number;
  channels: string[];
}

export interface CaseConfig {
  metric: string;
  channels: string[];
  weights: "default" | Record<string, number>;
  ubm_id: string | null;
  prob_mode: string;
  decision_threshold: number | null;
}

export class ReportValidationError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "ReportValidationError";
  }
}

function isFiniteNumber(v: unknown): v is number {
  return typeof v === "number" && Number.isFinite(v);
}

function validProbability(v: unknown): v is number {
  return isFiniteNumber(v) && v >= 0 && v <= 1;
}

// Throws when the payload is not a well-formed report: probabilities must
// live in [0,1], LR values must be finite, and curves must be aligned.
export function validateReport(payload: unknown): EvidenceReport {
  const r = payload as EvidenceReport;
  if (!r || typeof r !== "object" || !r.per_channel || !r.curves) {
    throw new ReportValidationError("payload is not an evidence report");
  }
  if (!isFiniteNumber(r.fused_score)) {
    throw new ReportValidationError("fused_score is not finite");
  }
  if (!Array.isArray(r.channels) || r.channels.length === 0) {
    throw new ReportValidationError("report has no channels");
  }
  for (const channel of r.channels) {
    const ev = r.per_channel[channel];
    if (!ev) throw new ReportValidationError(`missing evidence for ${channel}`);
    if (!isFiniteNumber(ev.lr_q) || !isFiniteNumber(ev.delta1) || !isFiniteNumber(ev.delta2)) {
      throw new ReportValidationError(`non-finite values on channel ${channel}`);
    }
    if (!validProbability(ev.p_u)) {
      throw new ReportValidationError(`P(U) out of [0,1] on channel ${channel}`);
    }
    if (ev.p_r !== null && !validProbability(ev.p_r)) {
      throw new ReportValidationError(`P(R) out of [0,1] on channel ${channel}`);
    }
    const curve = r.curves[channel];
    if (!curve || curve.lr.length !== curve.ubm_pdf.length) {
      throw new ReportValidationError(`malformed curve on channel ${channel}`);
    }
    if (curve.ref_pdf !== null && curve.ref_pdf.length !== curve.lr.length) {
      throw new ReportValidationError(`misaligned reference curve on ${channel}`);
    }
    const weight = r.weights[channel];
    if (!isFiniteNumber(weight) || weight < 0) {
      throw new ReportValidationError(`bad weight on channel ${channel}`);
    }
  }
  return r;
}
