// Thin typed client for the verification service. Every error surfaces
// the service's {code, message, detail} envelope.

import type { CaseConfig, EvidenceReport, UbmDescriptor } from "./types";
import { validateReport } from "./types";

export class ApiError extends Error {
  code: string;
  detail: unknown;

  constructor(code: string, message: string, detail: unknown = null) {
    super(message);
    this.name = "ApiError";
    this.code = code;
    this.detail = detail;
  }
}

async function parseError(resp: Response): Promise<never> {
  let code = `http_${resp.status}`;
  let message = resp.statusText;
  let detail: unknown = null;
  try {
    const body = await resp.json();
    if (body && typeof body.code === "string") {
      code = body.code;
      message = body.message ?? message;
      detail = body.detail ?? null;
    }
  } catch {
    // non-JSON error body; keep the HTTP status
  }
  throw new ApiError(code, message, detail);
}

export class ServiceClient {
  constructor(private base: string = "") {}

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await fetch(this.base + path, init);
    if (!resp.ok) await parseError(resp);
    return (await resp.json()) as T;
  }

  listUbms(): Promise<UbmDescriptor[]> {
    return this.json("/api/ubms");
  }

  async createCase(): Promise<string> {
    const body = await this.json<{ case_id: string }>("/api/cases", { method: "POST" });
    return body.case_id;
  }

  async uploadSpecimen(
    caseId: string,
    role: "questioned" | "reference",
    blob: Blob,
    contentType = "image/png",
  ): Promise<string> {
    const body = await this.json<{ specimen_id: string }>(
      `/api/cases/${caseId}/specimens?role=${role}`,
      { method: "POST", body: blob, headers: { "content-type": contentType } },
    );
    return body.specimen_id;
  }

  async removeSpecimen(caseId: string, specimenId: string): Promise<void> {
    await this.json(`/api/cases/${caseId}/specimens/${specimenId}`, {
      method: "DELETE",
    });
  }

  async setConfig(caseId: string, config: Partial<CaseConfig>): Promise<CaseConfig> {
    const body = await this.json<{ config: CaseConfig }>(
      `/api/cases/${caseId}/config`,
      {
        method: "PUT",
        body: JSON.stringify(config),
        headers: { "content-type": "application/json" },
      },
    );
    return body.config;
  }

  async evaluate(caseId: string, signal?: AbortSignal): Promise<EvidenceReport> {
    const payload = await this.json<unknown>(`/api/cases/${caseId}/evaluate`, {
      method: "POST",
      signal: signal ?? null,
    });
    return validateReport(payload);
  }

  async getReport(caseId: string): Promise<EvidenceReport> {
    return validateReport(await this.json<unknown>(`/api/cases/${caseId}/report`));
  }
}
