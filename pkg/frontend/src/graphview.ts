import { arc, drag, pie, select, zoom, Selection } from "d3";
import { continuousColor, labelColorIndex, pieSlices } from "./colors";
import { ForceLayout } from "./layout";
import { GraphJson, GraphNode } from "./types";

export interface ColorSpec {
  kind: "uniform" | "stat" | "composition" | "size";
  column?: string;
  lo?: number; // user-set range for continuous maps
  hi?: number;
}

export interface SizeSpec {
  kind: "count" | "stat";
  column?: string;
}

const R_MIN = 6;
const R_MAX = 22;
const UNIFORM_FILL = "#4e79a7";

function radiusScale(values: number[]): (v: number) => number {
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  if (!(hi > lo)) return () => (R_MIN + R_MAX) / 2;
  return (v) => R_MIN + ((v - lo) / (hi - lo)) * (R_MAX - R_MIN);
}

/** SVG rendering of one mapper graph: force layout, zoom/pan, draggable
 * nodes, numeric labels, pie or colormap node encodings, selection
 * highlighting. Never mutates the graph payload. */
export class GraphView {
  private svg: Selection<SVGSVGElement, unknown, null, undefined>;
  private root: Selection<SVGGElement, unknown, null, undefined>;
  private layout: ForceLayout | null = null;
  private graph: GraphJson | null = null;
  private colorSpec: ColorSpec = { kind: "uniform" };
  private sizeSpec: SizeSpec = { kind: "count" };
  private selected = new Set<number>();
  private pathIds: number[] = [];
  onNodeClick: ((id: number) => void) | null = null;

  constructor(container: HTMLElement, private width = 800, private height = 600) {
    this.svg = select(container).append("svg")
      .attr("class", "graph-view")
      .attr("viewBox", `0 0 ${width} ${height}`);
    this.root = this.svg.append("g").attr("class", "graph-root");
    this.svg.call(
      zoom<SVGSVGElement, unknown>()
        .scaleExtent([0.2, 8])
        .on("zoom", (event) => this.root.attr("transform", event.transform)) as never);
  }

  get current(): GraphJson | null {
    return this.graph;
  }

  render(graph: GraphJson): void {
    this.graph = graph;
    this.selected = new Set();
    this.pathIds = [];
    this.layout = new ForceLayout(graph, this.width, this.height);
    this.layout.runAll();
    this.redraw();
  }

  setEncodings(color: ColorSpec, size: SizeSpec): void {
    this.colorSpec = color;
    this.sizeSpec = size;
    if (this.graph) this.redraw();
  }

  setSelection(ids: number[], path: number[] = []): void {
    this.selected = new Set(ids);
    this.pathIds = path;
    if (this.graph) this.redraw();
  }

  selectedIds(): number[] {
    return [...this.selected].sort((a, b) => a - b);
  }

  private nodeRadius(): (n: GraphNode) => number {
    const graph = this.graph!;
    if (this.sizeSpec.kind === "stat" && this.sizeSpec.column) {
      const column = this.sizeSpec.column;
      if (graph.nodes.every((n) => column in n.stats)) {
        const scale = radiusScale(graph.nodes.map((n) => n.stats[column]));
        return (n) => scale(n.stats[column]);
      }
    }
    const scale = radiusScale(graph.nodes.map((n) => n.size));
    return (n) => scale(n.size);
  }

  private nodeFill(): (n: GraphNode) => string {
    const graph = this.graph!;
    const spec = this.colorSpec;
    if (spec.kind === "stat" && spec.column) {
      const column = spec.column;
      if (graph.nodes.every((n) => column in n.stats)) {
        const values = graph.nodes.map((n) => n.stats[column]);
        const lo = spec.lo ?? Math.min(...values);
        const hi = spec.hi ?? Math.max(...values);
        const span = hi > lo ? hi - lo : 1;
        return (n) => continuousColor((n.stats[column] - lo) / span);
      }
    }
    if (spec.kind === "size") {
      const values = graph.nodes.map((n) => n.size);
      const lo = spec.lo ?? Math.min(...values);
      const hi = spec.hi ?? Math.max(...values);
      const span = hi > lo ? hi - lo : 1;
      return (n) => continuousColor((n.size - lo) / span);
    }
    return () => UNIFORM_FILL;
  }

  private redraw(): void {
    const graph = this.graph!;
    const layout = this.layout!;
    const positions = layout.positions();
    const radius = this.nodeRadius();
    const fill = this.nodeFill();
    this.root.selectAll("*").remove();

    const pathEdges = new Set<string>();
    for (let i = 0; i + 1 < this.pathIds.length; i++) {
      const [a, b] = [this.pathIds[i], this.pathIds[i + 1]];
      pathEdges.add(`${Math.min(a, b)}-${Math.max(a, b)}`);
    }

    this.root.append("g").attr("class", "edges")
      .selectAll("line")
      .data(graph.edges)
      .join("line")
      .attr("class", (e) => pathEdges.has(`${e.s}-${e.t}`) ? "edge on-path" : "edge")
      .attr("x1", (e) => positions.get(e.s)!.x)
      .attr("y1", (e) => positions.get(e.s)!.y)
      .attr("x2", (e) => positions.get(e.t)!.x)
      .attr("y2", (e) => positions.get(e.t)!.y)
      .attr("stroke", (e) => pathEdges.has(`${e.s}-${e.t}`) ? "#e15759" : "#bbb")
      .attr("stroke-width", (e) => pathEdges.has(`${e.s}-${e.t}`) ? 3 : 1.2);

    const pieColumn = this.colorSpec.kind === "composition" ? this.colorSpec.column : undefined;
    const colorOf = pieColumn
      ? labelColorIndex(graph.nodes.map((n) => n.composition[pieColumn] ?? {}))
      : undefined;

    const view = this;
    const groups = this.root.append("g").attr("class", "nodes")
      .selectAll("g")
      .data(graph.nodes)
      .join("g")
      .attr("class", (n) => this.selected.has(n.id) ? "node selected" : "node")
      .attr("data-node-id", (n) => n.id)
      .attr("transform", (n) => {
        const p = positions.get(n.id)!;
        return `translate(${p.x},${p.y})`;
      })
      .on("click", (_event, n) => {
        if (this.onNodeClick) this.onNodeClick(n.id);
      });

    groups.each(function (n) {
      const group = select(this);
      const r = radius(n);
      const comp = pieColumn ? n.composition[pieColumn] : undefined;
      if (comp && Object.keys(comp).length > 0) {
        const slices = pieSlices(comp, colorOf);
        const wedges = pie<ReturnType<typeof pieSlices>[number]>()
          .value((s) => s.count)
          .sort(null)(slices);
        const shape = arc<(typeof wedges)[number]>().innerRadius(0).outerRadius(r);
        group.selectAll("path")
          .data(wedges)
          .join("path")
          .attr("class", "pie-slice")
          .attr("data-label", (w) => w.data.label)
          .attr("d", shape)
          .attr("fill", (w) => w.data.color);
      } else {
        group.append("circle").attr("r", r).attr("fill", fill(n));
      }
      if (view.selected.has(n.id)) {
        group.append("circle").attr("class", "halo")
          .attr("r", r + 3).attr("fill", "none")
          .attr("stroke", "#e15759").attr("stroke-width", 2.5);
      }
      group.append("text")
        .attr("class", "node-label")
        .attr("text-anchor", "middle")
        .attr("dy", -r - 4)
        .text(n.id);
    });

    groups.call(
      drag<SVGGElement, GraphNode>()
        .on("drag", function (event, n) {
          layout.pin(n.id, event.x, event.y);
          layout.reheat(5);
          view.redraw();
        })
        .on("end", (_event, n) => layout.release(n.id)) as never);
  }
}
