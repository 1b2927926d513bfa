import { GraphJson, MapperRequest, SelectionDetails, validateGraph } from "./types";

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

async function parseError(resp: Response): Promise<ApiError> {
  let message = `${resp.status}`;
  try {
    const body = await resp.json();
    if (body && typeof body.error === "string") message = body.error;
  } catch {
    /* non-JSON error body; keep the status text */
  }
  return new ApiError(resp.status, message);
}

export interface DatasetInfo {
  dataset_id: number;
  n_rows: number;
  columns: Array<{ name: string; kind: string }>;
  wrangle_report: Record<string, unknown>;
}

export type SelectArgs =
  | { ids: number[] }
  | { seed: number }
  | { start: number; end: number }
  | { path: number[]; extend: number };

export class ApiClient {
  constructor(private base: string = "") {}

  private async post(path: string, body: BodyInit, contentType: string): Promise<Response> {
    const resp = await fetch(this.base + path, {
      method: "POST",
      headers: { "Content-Type": contentType },
      body,
    });
    if (!resp.ok) throw await parseError(resp);
    return resp;
  }

  private postJson(path: string, body: unknown): Promise<Response> {
    return this.post(path, JSON.stringify(body), "application/json");
  }

  async uploadDataset(csv: string | Blob): Promise<DatasetInfo> {
    const resp = await this.post("/api/dataset", csv, "text/csv");
    return resp.json();
  }

  async computeMapper(req: MapperRequest): Promise<GraphJson> {
    const resp = await this.postJson("/api/mapper", req);
    return validateGraph(await resp.json());
  }

  async select(datasetId: number, mode: string, args: SelectArgs): Promise<SelectionDetails> {
    const resp = await this.postJson("/api/select", {
      dataset_id: datasetId,
      mode,
      args,
    });
    return resp.json();
  }

  async analysis(datasetId: number, kind: string, params: Record<string, unknown>,
                 rows: number[] | null): Promise<Record<string, unknown>> {
    const body: Record<string, unknown> = { dataset_id: datasetId, kind, params };
    if (rows !== null) body.rows = rows;
    const resp = await this.postJson("/api/analysis", body);
    return resp.json();
  }

  async listGraphs(): Promise<string[]> {
    const resp = await fetch(this.base + "/api/graphs");
    if (!resp.ok) throw await parseError(resp);
    return (await resp.json()).graphs;
  }

  async loadGraph(path: string): Promise<{ graph: GraphJson; datasetId: number | null }> {
    const resp = await this.postJson("/api/graphs/load", { path });
    const idHeader = resp.headers.get("X-Dataset-Id");
    return {
      graph: validateGraph(await resp.json()),
      datasetId: idHeader === null ? null : Number(idHeader),
    };
  }
}
