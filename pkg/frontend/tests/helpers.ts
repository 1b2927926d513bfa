import { ApiClient } from "../src/api";
import { App, AppElements } from "../src/app";
import { GraphJson, SelectionDetails } from "../src/types";

export function fixtureGraph(): GraphJson {
  const node = (id: number, rows: number[], comp: Record<string, number>) => ({
    id,
    element: id,
    rows,
    size: rows.length,
    stats: { x: id * 1.0, y: id * 2.0 },
    composition: { lab: comp },
    filter_mean: [id * 0.5],
  });
  return {
    manifest: { eps: 0.2 },
    nodes: [
      node(0, [0, 1, 2], { a: 2, b: 1 }),
      node(1, [2, 3], { a: 1, b: 1 }),
      node(2, [4, 5, 6, 7], { b: 4 }),
      node(3, [8], { a: 1 }),
    ],
    edges: [
      { s: 0, t: 1, w: 1 },
      { s: 1, t: 2, w: 1 },
    ],
  };
}

export function detailsFor(ids: number[], graph: GraphJson,
                           path?: number[]): SelectionDetails {
  const union = new Set<number>();
  const perNode = ids.map((id) => {
    const n = graph.nodes[id];
    n.rows.forEach((r) => union.add(r));
    return { id: n.id, size: n.size, stats: n.stats,
             composition: n.composition, filter_mean: n.filter_mean };
  });
  const details: SelectionDetails = {
    mode: "nodes",
    node_ids: [...ids].sort((a, b) => a - b),
    per_node: perNode,
    union_rows: [...union].sort((a, b) => a - b),
    union_labels: { lab: { a: 1 } },
  };
  if (path) details.path = path;
  return details;
}

export interface RecordedCall {
  path: string;
  body: unknown;
}

export interface StubServer {
  calls: RecordedCall[];
  respond: (path: string, body: unknown) => unknown;
}

/** Stub the documented HTTP API at the fetch level; handlers run per
 * request and responses resolve on the microtask queue. */
export function installStubFetch(
    handler: (path: string, body: unknown) => { status?: number; body: unknown }
             | Promise<{ status?: number; body: unknown }>): RecordedCall[] {
  const calls: RecordedCall[] = [];
  globalThis.fetch = (async (input: RequestInfo | URL, init?: RequestInit) => {
    const path = String(input);
    const body = init?.body && typeof init.body === "string"
      ? JSON.parse(init.body) : init?.body ?? null;
    calls.push({ path, body });
    const out = await handler(path, body);
    const status = out.status ?? 200;
    return new Response(JSON.stringify(out.body), {
      status,
      headers: { "Content-Type": "application/json" },
    });
  }) as typeof fetch;
  return calls;
}

export function makeElements(): AppElements {
  const make = () => document.createElement("div");
  const el = {
    graphPanel: make(),
    detailsPanel: make(),
    analysisPanel: make(),
    banner: make(),
    notice: make(),
    paramError: make(),
  };
  el.banner.hidden = true;  // index.html ships both with the hidden attribute
  el.notice.hidden = true;
  document.body.append(el.graphPanel, el.detailsPanel, el.analysisPanel,
                       el.banner, el.notice, el.paramError);
  return el;
}

export function makeApp(): App {
  const app = new App(new ApiClient(), makeElements());
  app.datasetId = 1;
  return app;
}

export function renderedNodeIds(app: App): number[] {
  return [...app.el.graphPanel.querySelectorAll(".node")]
    .map((g) => Number((g as SVGGElement).dataset.nodeId))
    .sort((a, b) => a - b);
}

export function highlightedIds(app: App): number[] {
  return [...app.el.graphPanel.querySelectorAll(".node.selected")]
    .map((g) => Number((g as SVGGElement).dataset.nodeId))
    .sort((a, b) => a - b);
}

export function clickNode(app: App, id: number): Promise<void> {
  return app.handleNodeClick(id);
}
