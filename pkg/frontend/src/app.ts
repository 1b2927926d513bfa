import { ApiClient, ApiError } from "./api";
import { debounce, LatestWins } from "./debounce";
import { renderDetails, renderRegressionTable } from "./details";
import { ColorSpec, GraphView, SizeSpec } from "./graphview";
import { GraphJson, MapperRequest, SelectionDetails } from "./types";

export type SelectionMode = "nodes" | "cluster" | "path";

export interface AppElements {
  graphPanel: HTMLElement;
  detailsPanel: HTMLElement;
  analysisPanel: HTMLElement;
  banner: HTMLElement;
  notice: HTMLElement;
  paramError: HTMLElement;
}

export const DEBOUNCE_MS = 300;

/** Wires the three panels together; owns the view state (active graph,
 * selection, pending path endpoint, parameter form values). All numbers
 * shown anywhere come from API responses, never local recomputation. */
export class App {
  view: GraphView;
  datasetId: number | null = null;
  mode: SelectionMode = "nodes";
  selection: SelectionDetails | null = null;
  pathSoFar: number[] = [];
  pendingPathStart: number | null = null;
  params: Omit<MapperRequest, "dataset_id"> = {
    filters: [{ kind: "l2-norm" }],
    n: 10,
    p: 0.3,
    eps: 0.5,
    min_pts: 5,
    norm: "none",
  };
  private requests = new LatestWins();
  private requestMapper: () => void;

  constructor(public api: ApiClient, public el: AppElements) {
    this.view = new GraphView(el.graphPanel);
    this.view.onNodeClick = (id) => void this.handleNodeClick(id);
    this.requestMapper = debounce(() => void this.computeNow(), DEBOUNCE_MS);
  }

  async uploadCsv(text: string | Blob): Promise<void> {
    const info = await this.api.uploadDataset(text);
    this.datasetId = info.dataset_id;
    this.clearSelection();
  }

  /** Debounced entry point for every parameter edit. */
  paramsChanged(update: Partial<Omit<MapperRequest, "dataset_id">>): void {
    Object.assign(this.params, update);
    this.requestMapper();
  }

  /** POST /api/mapper; a newer edit supersedes this response. */
  async computeNow(): Promise<void> {
    if (this.datasetId === null) return;
    const token = this.requests.next();
    this.el.paramError.textContent = "";
    try {
      const graph = await this.api.computeMapper({
        dataset_id: this.datasetId,
        ...this.params,
      });
      if (!this.requests.isCurrent(token)) return; // stale response
      this.setGraph(graph);
    } catch (err) {
      if (!this.requests.isCurrent(token)) return;
      if (err instanceof ApiError && err.status === 409) return; // superseded
      if (err instanceof ApiError && err.status === 422) {
        this.el.paramError.textContent = err.message;
        return;
      }
      this.showBanner(err);
    }
  }

  /** Install a new graph; on schema problems keep the previous view. */
  setGraph(graph: GraphJson): void {
    try {
      this.view.render(graph);
      this.el.banner.textContent = "";
      this.el.banner.hidden = true;
      this.clearSelection();
    } catch (err) {
      this.showBanner(err);
    }
  }

  showBanner(err: unknown): void {
    this.el.banner.textContent = err instanceof Error ? err.message : String(err);
    this.el.banner.hidden = false;
  }

  showNotice(text: string): void {
    this.el.notice.textContent = text;
    this.el.notice.hidden = false;
  }

  setMode(mode: SelectionMode): void {
    this.mode = mode;
    this.pendingPathStart = null;
    this.pathSoFar = [];
  }

  clearSelection(): void {
    this.selection = null;
    this.pathSoFar = [];
    this.pendingPathStart = null;
    this.view.setSelection([]);
    this.el.detailsPanel.replaceChildren();
  }

  private applySelection(details: SelectionDetails, path: number[] = []): void {
    this.selection = details;
    this.view.setSelection(details.node_ids, path);
    renderDetails(this.el.detailsPanel, details);
  }

  async handleNodeClick(id: number): Promise<void> {
    if (this.datasetId === null) return;
    this.el.notice.hidden = true;
    if (this.mode === "nodes") {
      const ids = new Set(this.selection?.node_ids ?? []);
      if (ids.has(id)) ids.delete(id);  // second click deselects
      else ids.add(id);
      if (ids.size === 0) {
        this.clearSelection();
        return;
      }
      const details = await this.api.select(
        this.datasetId, "nodes", { ids: [...ids].sort((a, b) => a - b) });
      this.applySelection(details);
    } else if (this.mode === "cluster") {
      const details = await this.api.select(this.datasetId, "cluster", { seed: id });
      this.applySelection(details);
    } else {
      await this.handlePathClick(id);
    }
  }

  private async handlePathClick(id: number): Promise<void> {
    if (this.datasetId === null) return;
    if (this.pathSoFar.length === 0) {
      if (this.pendingPathStart === null) {
        this.pendingPathStart = id;
        this.view.setSelection([id]);
        return;
      }
      const details = await this.api.select(
        this.datasetId, "path", { start: this.pendingPathStart, end: id });
      if (!details.path) {
        this.showNotice("no path exists between the selected nodes");
        this.view.setSelection([this.pendingPathStart]);
        return;
      }
      this.pendingPathStart = null;
      this.pathSoFar = details.path;
      this.applySelection(details, details.path);
    } else {
      const details = await this.api.select(
        this.datasetId, "path", { path: this.pathSoFar, extend: id });
      if (!details.path) {
        this.showNotice("no path exists to the selected node");
        return; // selection unchanged
      }
      this.pathSoFar = details.path;
      this.applySelection(details, details.path);
    }
  }

  setEncodings(color: ColorSpec, size: SizeSpec): void {
    this.view.setEncodings(color, size);
  }

  /** Analysis buttons act on the current selection's union rows, or the
   * whole dataset when nothing is selected. */
  async runRegression(dependent: string, independents: string[]): Promise<void> {
    if (this.datasetId === null) return;
    const rows = this.selection ? this.selection.union_rows : null;
    try {
      const out = await this.api.analysis(
        this.datasetId, "regression", { dependent, independents }, rows);
      renderRegressionTable(this.el.analysisPanel,
        (out as { result: Parameters<typeof renderRegressionTable>[1] }).result);
    } catch (err) {
      if (err instanceof ApiError && err.status === 422) {
        this.el.analysisPanel.textContent = err.message;
        return;
      }
      throw err;
    }
  }

  async runPca(k: number): Promise<Record<string, unknown>> {
    if (this.datasetId === null) throw new Error("no dataset");
    const rows = this.selection ? this.selection.union_rows : null;
    return this.api.analysis(this.datasetId, "pca", { k }, rows);
  }
}
