import {
  forceCenter,
  forceLink,
  forceManyBody,
  forceSimulation,
  SimulationNodeDatum,
} from "d3";
import { GraphJson } from "./types";

export interface LayoutNode extends SimulationNodeDatum {
  id: number;
  x: number;
  y: number;
}

export interface LayoutLink {
  source: LayoutNode;
  target: LayoutNode;
  w: number;
}

function fnv1a(text: string): number {
  let h = 0x811c9dc5;
  for (let i = 0; i < text.length; i++) {
    h ^= text.charCodeAt(i);
    h = Math.imul(h, 0x01000193) >>> 0;
  }
  return h >>> 0;
}

function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function graphSeed(graph: GraphJson): number {
  return fnv1a(graph.nodes.map((n) => n.id).join(",") + "|" +
    graph.edges.map((e) => `${e.s}-${e.t}`).join(","));
}

/** Force-directed layout with seeded initial positions and a fixed
 * iteration budget, so the same graph always lands in the same place.
 * The simulation never self-starts; the caller spends the budget either
 * all at once (tests) or a few ticks per frame (browser). */
export class ForceLayout {
  readonly nodes: LayoutNode[];
  readonly links: LayoutLink[];
  private sim;
  private budget: number;

  constructor(graph: GraphJson, width: number, height: number, budget = 300) {
    const rand = mulberry32(graphSeed(graph));
    this.budget = budget;
    this.nodes = graph.nodes.map((n) => ({
      id: n.id,
      x: width * (0.1 + 0.8 * rand()),
      y: height * (0.1 + 0.8 * rand()),
    }));
    this.links = graph.edges.map((e) => ({
      source: this.nodes[e.s],
      target: this.nodes[e.t],
      w: e.w,
    }));
    this.sim = forceSimulation(this.nodes)
      .force("charge", forceManyBody().strength(-60))
      .force("link", forceLink(this.links).distance(40).strength(0.7))
      .force("center", forceCenter(width / 2, height / 2))
      .stop();
  }

  /** Spend up to n ticks of the budget; returns true while budget remains. */
  tick(n = 1): boolean {
    const steps = Math.min(n, this.budget);
    for (let i = 0; i < steps; i++) this.sim.tick();
    this.budget -= steps;
    return this.budget > 0;
  }

  runAll(): void {
    this.tick(this.budget);
  }

  positions(): Map<number, { x: number; y: number }> {
    return new Map(this.nodes.map((n) => [n.id, { x: n.x, y: n.y }]));
  }

  pin(id: number, x: number, y: number): void {
    const node = this.nodes[id];
    node.fx = x;
    node.fy = y;
  }

  release(id: number): void {
    const node = this.nodes[id];
    node.fx = null;
    node.fy = null;
  }

  /** A little energy for drag interactions, still budget-free. */
  reheat(ticks = 30): void {
    for (let i = 0; i < ticks; i++) this.sim.tick();
  }
}
