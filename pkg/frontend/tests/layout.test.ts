// @vitest-environment jsdom
import { describe, expect, it } from "vitest";

import { ForceLayout, graphSeed } from "../src/layout";
import { SchemaError, validateGraph } from "../src/types";
import { fixtureGraph, makeApp, renderedNodeIds } from "./helpers";

describe("layout determinism", () => {
  it("identical graphs produce identical positions", () => {
    const graph = fixtureGraph();
    const a = new ForceLayout(graph, 800, 600);
    const b = new ForceLayout(graph, 800, 600);
    a.runAll();
    b.runAll();
    for (const node of a.nodes) {
      const other = b.nodes[node.id];
      expect(node.x).toBe(other.x);
      expect(node.y).toBe(other.y);
    }
  });

  it("seed depends on the node/edge structure", () => {
    const graph = fixtureGraph();
    const other = fixtureGraph();
    other.edges = other.edges.slice(0, 1);
    expect(graphSeed(graph)).not.toBe(graphSeed(other));
  });

  it("the iteration budget is finite and runs out", () => {
    const layout = new ForceLayout(fixtureGraph(), 800, 600, 50);
    let spins = 0;
    while (layout.tick(10)) {
      spins += 1;
      expect(spins).toBeLessThan(100);
    }
  });
});

describe("schema handling", () => {
  it("rejects graphs with missing or extra keys", () => {
    expect(() => validateGraph({ nodes: [], edges: [] })).toThrow(SchemaError);
    const graph = fixtureGraph() as unknown as Record<string, unknown>;
    graph.extra = 1;
    expect(() => validateGraph(graph)).toThrow(SchemaError);
    const badNode = fixtureGraph();
    delete (badNode.nodes[0] as unknown as Record<string, unknown>).size;
    expect(() => validateGraph(badNode)).toThrow(SchemaError);
  });

  it("keeps the previous view and shows a banner on schema mismatch", () => {
    document.body.replaceChildren();
    const app = makeApp();
    app.setGraph(fixtureGraph());
    expect(renderedNodeIds(app)).toEqual([0, 1, 2, 3]);

    const broken = fixtureGraph();
    (broken.nodes[1] as unknown as Record<string, unknown>).rows = [1, 2, 3, 4];
    try {
      app.setGraph(validateGraph(broken));
    } catch {
      app.showBanner(new SchemaError("node 1 size/rows mismatch"));
    }
    expect(app.el.banner.hidden).toBe(false);
    expect(app.el.banner.textContent).toContain("mismatch");
    expect(renderedNodeIds(app)).toEqual([0, 1, 2, 3]); // old view retained
  });
});
