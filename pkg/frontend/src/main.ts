import { ApiClient } from "./api";
import { App, SelectionMode } from "./app";
import { ColorSpec, SizeSpec } from "./graphview";
import { FilterSpecJson } from "./types";
import "./style.css";

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function readFilters(): FilterSpecJson[] {
  const kind = byId<HTMLSelectElement>("filter-kind").value;
  const column = byId<HTMLInputElement>("filter-column").value;
  const first: FilterSpecJson = kind === "column" ? { kind, column } : { kind };
  const second = byId<HTMLSelectElement>("filter-kind-2").value;
  if (second === "none") return [first];
  const column2 = byId<HTMLInputElement>("filter-column-2").value;
  return [first, second === "column" ? { kind: second, column: column2 } : { kind: second }];
}

function main(): void {
  const app = new App(new ApiClient(), {
    graphPanel: byId("graph-panel"),
    detailsPanel: byId("details-panel"),
    analysisPanel: byId("analysis-panel"),
    banner: byId("banner"),
    notice: byId("notice"),
    paramError: byId("param-error"),
  });

  byId<HTMLInputElement>("csv-file").addEventListener("change", async (ev) => {
    const input = ev.target as HTMLInputElement;
    const file = input.files?.[0];
    if (!file) return;
    try {
      await app.uploadCsv(file);
      byId("dataset-status").textContent = `loaded ${file.name}`;
      app.paramsChanged({});
    } catch (err) {
      app.showBanner(err);
    }
  });

  const numeric = (id: string) => Number(byId<HTMLInputElement>(id).value);
  const onParamEdit = () => {
    app.paramsChanged({
      filters: readFilters(),
      n: numeric("param-n"),
      p: numeric("param-p"),
      eps: numeric("param-eps"),
      min_pts: numeric("param-minpts"),
      norm: byId<HTMLSelectElement>("param-norm").value,
    });
  };
  for (const id of ["param-n", "param-p", "param-eps", "param-minpts",
                    "param-norm", "filter-kind", "filter-column",
                    "filter-kind-2", "filter-column-2"]) {
    byId(id).addEventListener("input", onParamEdit);
  }

  for (const mode of ["nodes", "cluster", "path"] as SelectionMode[]) {
    byId<HTMLInputElement>(`mode-${mode}`).addEventListener(
      "change", () => app.setMode(mode));
  }
  byId("clear-selection").addEventListener("click", () => app.clearSelection());

  const encodingChanged = () => {
    const colorBy = byId<HTMLSelectElement>("color-by").value;
    const sizeBy = byId<HTMLSelectElement>("size-by").value;
    let color: ColorSpec = { kind: "uniform" };
    if (colorBy === "size") color = { kind: "size" };
    else if (colorBy.startsWith("stat:")) color = { kind: "stat", column: colorBy.slice(5) };
    else if (colorBy.startsWith("comp:")) color = { kind: "composition", column: colorBy.slice(5) };
    const lo = byId<HTMLInputElement>("color-lo").value;
    const hi = byId<HTMLInputElement>("color-hi").value;
    if (lo !== "") color.lo = Number(lo);
    if (hi !== "") color.hi = Number(hi);
    const size: SizeSpec = sizeBy.startsWith("stat:")
      ? { kind: "stat", column: sizeBy.slice(5) }
      : { kind: "count" };
    app.setEncodings(color, size);
  };
  for (const id of ["color-by", "size-by", "color-lo", "color-hi"]) {
    byId(id).addEventListener("change", encodingChanged);
  }

  // keep the encoding dropdowns in sync with the active graph's columns
  const refreshEncodingOptions = () => {
    const graph = app.view.current;
    if (!graph || graph.nodes.length === 0) return;
    const colorSel = byId<HTMLSelectElement>("color-by");
    const sizeSel = byId<HTMLSelectElement>("size-by");
    const statCols = Object.keys(graph.nodes[0].stats);
    const compCols = Object.keys(graph.nodes[0].composition);
    colorSel.replaceChildren(new Option("uniform", "uniform"),
                             new Option("point count", "size"));
    for (const c of statCols) colorSel.add(new Option(`mean ${c}`, `stat:${c}`));
    for (const c of compCols) colorSel.add(new Option(`labels ${c}`, `comp:${c}`));
    sizeSel.replaceChildren(new Option("point count", "count"));
    for (const c of statCols) sizeSel.add(new Option(`mean ${c}`, `stat:${c}`));
  };
  const origSetGraph = app.setGraph.bind(app);
  app.setGraph = (graph) => {
    origSetGraph(graph);
    refreshEncodingOptions();
  };

  byId("run-regression").addEventListener("click", () => {
    const dependent = byId<HTMLInputElement>("regression-dependent").value;
    const independents = byId<HTMLInputElement>("regression-independents")
      .value.split(",").map((s) => s.trim()).filter(Boolean);
    void app.runRegression(dependent, independents);
  });

  byId("load-graphs").addEventListener("click", async () => {
    try {
      const names = await app.api.listGraphs();
      const select = byId<HTMLSelectElement>("graph-files");
      select.replaceChildren(...names.map((n) => new Option(n, n)));
    } catch (err) {
      app.showBanner(err);
    }
  });
  byId("open-graph").addEventListener("click", async () => {
    const path = byId<HTMLSelectElement>("graph-files").value;
    if (!path) return;
    try {
      const { graph, datasetId } = await app.api.loadGraph(path);
      if (datasetId !== null) app.datasetId = datasetId;
      app.setGraph(graph);
    } catch (err) {
      app.showBanner(err);
    }
  });
}

main();
