// Evidence-screen rendering. Every numeric readout carries the exact
// service value in data-value (stringified verbatim) and a human-readable
// rounding as its text, so displayed numbers are provably the server's.

import type { CurveSet, EvidenceReport } from "./types";
import { ReportValidationError, validateReport } from "./types";

const CURVE_W = 640;
const CURVE_H = 180;
const PAD = 8;

export function fmt(v: number): string {
  return v.toFixed(4);
}

function readout(field: string, value: number | null, placeholder = ""): string {
  if (value === null) {
    return `<span class="readout" data-field="${field}" data-value="">${placeholder}</span>`;
  }
  return (
    `<span class="readout" data-field="${field}" data-value="${String(value)}">` +
    `${fmt(value)}</span>`
  );
}

function polyline(xs: number[], ys: number[], color: string, dash = ""): string {
  const lo = Math.min(...xs);
  const hi = Math.max(...xs);
  const span = hi - lo || 1;
  const points = xs
    .map((x, i) => {
      const px = PAD + ((x - lo) / span) * (CURVE_W - 2 * PAD);
      const py = CURVE_H - PAD - (ys[i] ?? 0) * (CURVE_H - 2 * PAD);
      return `${px.toFixed(1)},${py.toFixed(1)}`;
    })
    .join(" ");
  const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
  return `<polyline fill="none" stroke="${color}" stroke-width="1.5"${dashAttr} points="${points}"/>`;
}

// Red = universe population, blue = reference population, dashed marker at
// the questioned LR.
export function curveSvg(curve: CurveSet): string {
  const parts: string[] = [];
  parts.push(polyline(curve.lr, curve.ubm_pdf, "#cc2222"));
  if (curve.ref_pdf !== null) {
    parts.push(polyline(curve.lr, curve.ref_pdf, "#2244cc"));
  }
  const lo = Math.min(...curve.lr);
  const hi = Math.max(...curve.lr);
  const span = hi - lo || 1;
  const clamped = Math.min(Math.max(curve.lr_q, lo), hi);
  const mx = PAD + ((clamped - lo) / span) * (CURVE_W - 2 * PAD);
  parts.push(
    `<line x1="${mx.toFixed(1)}" y1="${PAD}" x2="${mx.toFixed(1)}" ` +
      `y2="${CURVE_H - PAD}" stroke="#111" stroke-dasharray="4 3"/>`,
  );
  return (
    `<svg class="curves" viewBox="0 0 ${CURVE_W} ${CURVE_H}" ` +
    `xmlns="http://www.w3.org/2000/svg">${parts.join("")}</svg>`
  );
}

function channelRow(report: EvidenceReport, channel: string): string {
  const ev = report.per_channel[channel]!;
  const weight = report.weights[channel]!;
  return (
    `<tr data-channel="${channel}">` +
    `<td class="ch">${channel}</td>` +
    `<td>${readout(`weights.${channel}`, weight)}</td>` +
    `<td>${readout(`per_channel.${channel}.lr_q`, ev.lr_q)}</td>` +
    `<td>${readout(`per_channel.${channel}.p_u`, ev.p_u)}</td>` +
    `<td>${readout(`per_channel.${channel}.p_r`, ev.p_r, "needs &ge; 2 references")}</td>` +
    `</tr>`
  );
}

export interface RenderOptions {
  selectedChannel?: string;
}

// Renders the full evidence screen; on a malformed payload an error panel
// with the validation message is rendered instead.
export function renderEvidence(
  container: HTMLElement,
  payload: unknown,
  options: RenderOptions = {},
): EvidenceReport | null {
  let report: EvidenceReport;
  try {
    report = validateReport(payload);
  } catch (err) {
    const message =
      err instanceof ReportValidationError ? err.message : String(err);
    container.innerHTML = `<div class="error-panel" data-code="malformed_report">${message}</div>`;
    return null;
  }

  // channels sorted by descending weight, channel id as tiebreak
  const channels = [...report.channels].sort((a, b) => {
    const dw = (report.weights[b] ?? 0) - (report.weights[a] ?? 0);
    return dw !== 0 ? dw : a.localeCompare(b);
  });
  const selected =
    options.selectedChannel && channels.includes(options.selectedChannel)
      ? options.selectedChannel
      : channels[0]!;
  const curve = report.curves[selected]!;
  const selectedEv = report.per_channel[selected]!;

  const pr =
    selectedEv.p_r === null
      ? `<span class="readout" data-field="per_channel.${selected}.p_r" data-value="">needs &ge; 2 references</span>`
      : readout(`per_channel.${selected}.p_r`, selectedEv.p_r);

  container.innerHTML = `
    <div class="evidence" data-version="${report.version}" data-metric="${report.metric}">
      <div class="headline">
        <div>fused score ${readout("fused_score", report.fused_score)}</div>
        <div>metric <span data-field="metric">${report.metric}</span>,
             ${readout("n_references", report.n_references)} reference(s)</div>
        ${report.decision ? `<div class="decision">decision: ${report.decision}</div>` : ""}
      </div>
      <div class="channel-tabs">
        ${channels
          .map(
            (ch) =>
              `<button class="tab${ch === selected ? " active" : ""}" data-tab="${ch}">${ch}</button>`,
          )
          .join("")}
      </div>
      <div class="selected-channel" data-selected="${selected}">
        <div>LR_q ${readout(`per_channel.${selected}.lr_q`, selectedEv.lr_q)}
             P(U) ${readout(`per_channel.${selected}.p_u`, selectedEv.p_u)}
             P(R) ${pr}</div>
        ${curveSvg(curve)}
        <div class="legend">universe population (red), reference population (blue),
             questioned LR (dashed)</div>
      </div>
      <table class="channels">
        <thead><tr><th>channel</th><th>weight</th><th>LR_q</th><th>P(U)</th><th>P(R)</th></tr></thead>
        <tbody>${channels.map((ch) => channelRow(report, ch)).join("")}</tbody>
      </table>
    </div>`;
  return report;
}

// Pull the exact numbers back out of a rendered screen, field path ->
// stringified value. Empty string means "rendered as unavailable".
export function displayedValues(container: HTMLElement): Record<string, string> {
  const out: Record<string, string> = {};
  for (const node of Array.from(container.querySelectorAll("[data-field]"))) {
    const field = node.getAttribute("data-field");
    if (field && node.hasAttribute("data-value")) {
      out[field] = node.getAttribute("data-value") ?? "";
    }
  }
  return out;
}
