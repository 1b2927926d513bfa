import { SelectionDetails } from "./types";

function barChart(container: HTMLElement, stats: Record<string, number>): void {
  const entries = Object.entries(stats);
  if (entries.length === 0) return;
  const maxAbs = Math.max(...entries.map(([, v]) => Math.abs(v)), 1e-12);
  const chart = document.createElement("div");
  chart.className = "bar-chart";
  for (const [name, value] of entries) {
    const row = document.createElement("div");
    row.className = "bar-row";
    const label = document.createElement("span");
    label.className = "bar-label";
    label.textContent = name;
    const track = document.createElement("span");
    track.className = "bar-track";
    const bar = document.createElement("span");
    bar.className = "bar-fill";
    bar.style.width = `${(Math.abs(value) / maxAbs) * 100}%`;
    bar.title = value.toPrecision(6);
    track.appendChild(bar);
    const num = document.createElement("span");
    num.className = "bar-value";
    num.textContent = value.toPrecision(4);
    row.append(label, track, num);
    chart.appendChild(row);
  }
  container.appendChild(chart);
}

const ROW_DISPLAY_LIMIT = 400;

/** Details panel: per-node mean bar charts, the union of row indices, and
 * label counts over the union. Values come from the API verbatim. */
export function renderDetails(container: HTMLElement, details: SelectionDetails): void {
  container.replaceChildren();

  for (const node of details.per_node) {
    const section = document.createElement("div");
    section.className = "node-detail";
    const head = document.createElement("h4");
    head.textContent = `node ${node.id} (${node.size} points)`;
    section.appendChild(head);
    barChart(section, node.stats);
    container.appendChild(section);
  }

  const rows = document.createElement("div");
  rows.className = "union-rows";
  const head = document.createElement("h4");
  head.textContent = `union rows (${details.union_rows.length})`;
  rows.appendChild(head);
  const list = document.createElement("code");
  const shown = details.union_rows.slice(0, ROW_DISPLAY_LIMIT);
  list.textContent = shown.join(", ") +
    (details.union_rows.length > ROW_DISPLAY_LIMIT ? ", …" : "");
  rows.appendChild(list);
  container.appendChild(rows);

  if (details.union_labels) {
    for (const [column, counts] of Object.entries(details.union_labels)) {
      const block = document.createElement("div");
      block.className = "union-labels";
      const h = document.createElement("h4");
      h.textContent = `labels: ${column}`;
      block.appendChild(h);
      const ul = document.createElement("ul");
      for (const [label, count] of Object.entries(counts)
          .sort((a, b) => b[1] - a[1])) {
        const li = document.createElement("li");
        li.textContent = `${label}: ${count}`;
        ul.appendChild(li);
      }
      block.appendChild(ul);
      container.appendChild(block);
    }
  }
}

/** Regression table in coef / std err / t / p shape. */
export function renderRegressionTable(
    container: HTMLElement,
    result: { names: string[]; coef: (number | null)[]; std_err: (number | null)[];
              t: (number | null)[]; p: (number | null)[]; r_squared: number }): void {
  container.replaceChildren();
  const table = document.createElement("table");
  table.className = "regression-table";
  const header = document.createElement("tr");
  for (const text of ["", "coef", "std err", "t", "p"]) {
    const th = document.createElement("th");
    th.textContent = text;
    header.appendChild(th);
  }
  table.appendChild(header);
  const fmt = (v: number | null) => (v === null ? "—" : v.toPrecision(4));
  result.names.forEach((name, i) => {
    const tr = document.createElement("tr");
    const cells = [name, fmt(result.coef[i]), fmt(result.std_err[i]),
                   fmt(result.t[i]), fmt(result.p[i])];
    for (const text of cells) {
      const td = document.createElement("td");
      td.textContent = text;
      tr.appendChild(td);
    }
    table.appendChild(tr);
  });
  container.appendChild(table);
  const r2 = document.createElement("div");
  r2.textContent = `r² = ${result.r_squared.toPrecision(6)}`;
  container.appendChild(r2);
}
