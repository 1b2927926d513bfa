export interface GraphNode {
  id: number;
  element: number | [number, number];
  rows: number[];
  size: number;
  stats: Record<string, number>;
  composition: Record<string, Record<string, number>>;
  filter_mean: number[];
}

export interface GraphEdge {
  s: number;
  t: number;
  w: number;
}

export interface GraphJson {
  manifest: Record<string, unknown>;
  nodes: GraphNode[];
  edges: GraphEdge[];
}

export interface SelectionDetails {
  mode: string;
  node_ids: number[];
  per_node: Array<{
    id: number;
    size: number;
    stats: Record<string, number>;
    composition: Record<string, Record<string, number>>;
    filter_mean: number[];
  }>;
  union_rows: number[];
  union_labels: Record<string, Record<string, number>> | null;
  path?: number[];
}

export interface FilterSpecJson {
  kind: string;
  column?: string;
  bandwidth?: number;
  p?: number | string;
}

export interface MapperRequest {
  dataset_id: number;
  filters: FilterSpecJson[];
  n: number | number[];
  p: number | number[];
  eps: number;
  min_pts: number;
  norm: string;
}

const NODE_KEYS = ["id", "element", "rows", "size", "stats", "composition", "filter_mean"];
const EDGE_KEYS = ["s", "t", "w"];

export class SchemaError extends Error {}

function sameKeys(obj: object, keys: string[]): boolean {
  const got = Object.keys(obj).sort();
  return got.length === keys.length && [...keys].sort().every((k, i) => got[i] === k);
}

/** Validate a graph payload against the engine's schema; the view renders
 * anything that passes and nothing that doesn't. */
export function validateGraph(obj: unknown): GraphJson {
  if (typeof obj !== "object" || obj === null) throw new SchemaError("graph is not an object");
  const g = obj as Record<string, unknown>;
  if (!sameKeys(g, ["manifest", "nodes", "edges"])) {
    throw new SchemaError("graph must have exactly manifest/nodes/edges");
  }
  if (!Array.isArray(g.nodes) || !Array.isArray(g.edges)) {
    throw new SchemaError("nodes/edges must be arrays");
  }
  g.nodes.forEach((n, i) => {
    if (typeof n !== "object" || n === null || !sameKeys(n, NODE_KEYS)) {
      throw new SchemaError(`node ${i} has the wrong key set`);
    }
    const node = n as unknown as GraphNode;
    if (node.id !== i) throw new SchemaError("node ids must be dense and ordered");
    if (!Array.isArray(node.rows) || node.rows.length !== node.size) {
      throw new SchemaError(`node ${i} size/rows mismatch`);
    }
  });
  const count = g.nodes.length;
  g.edges.forEach((e, i) => {
    if (typeof e !== "object" || e === null || !sameKeys(e, EDGE_KEYS)) {
      throw new SchemaError(`edge ${i} has the wrong key set`);
    }
    const edge = e as unknown as GraphEdge;
    if (!(edge.s >= 0 && edge.s < edge.t && edge.t < count && edge.w >= 1)) {
      throw new SchemaError(`edge ${i} endpoints out of range`);
    }
  });
  return g as unknown as GraphJson;
}
