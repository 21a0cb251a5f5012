/** Stats dashboard: tables and bars rendered verbatim from /stats JSON.
 *
 * Display only — no client-side recomputation. Every number on this page
 * is copied straight out of the report; bar widths are presentation.
 */

import type { StatsReport } from "./types.js";

export function renderStats(container: HTMLElement, report: StatsReport): void {
  container.innerHTML = "";
  const heading = document.createElement("h2");
  heading.textContent = "Graph statistics";
  container.appendChild(heading);

  const summary = document.createElement("p");
  summary.className = "graph-summary";
  summary.textContent =
    `${report.graph.node_count} nodes · ${report.graph.edge_count} edges`;
  container.appendChild(summary);

  container.appendChild(
    table(
      "Records per class",
      "per-class",
      ["class", "count"],
      Object.entries(report.graph.per_class).map(([name, count]) => [name, String(count)]),
    ),
  );

  const distributions = report.distributions;
  container.appendChild(
    barChart(
      "Effect types",
      "effect-types",
      distributions.effect_types.map((row) => [row.effect_type, row.count]),
    ),
  );
  container.appendChild(
    barChart(
      "Effect categories",
      "categories",
      distributions.categories.map((row) => [row.category, row.count]),
    ),
  );
  container.appendChild(
    table(
      "Validation mediums",
      "mediums",
      ["medium", "count"],
      distributions.validation_mediums.map((row) => [row.medium, String(row.count)]),
    ),
  );
  container.appendChild(
    table(
      "Top terms",
      "top-terms",
      ["term", "count"],
      distributions.top_terms.map((row) => [row.term, String(row.count)]),
    ),
  );
}

function table(
  caption: string,
  className: string,
  headers: string[],
  rows: string[][],
): HTMLElement {
  const section = document.createElement("section");
  section.className = `stats-table ${className}`;
  const heading = document.createElement("h3");
  heading.textContent = caption;
  section.appendChild(heading);
  const element = document.createElement("table");
  const head = document.createElement("tr");
  for (const header of headers) {
    const cell = document.createElement("th");
    cell.textContent = header;
    head.appendChild(cell);
  }
  element.appendChild(head);
  for (const row of rows) {
    const tr = document.createElement("tr");
    for (const value of row) {
      const cell = document.createElement("td");
      cell.textContent = value;
      tr.appendChild(cell);
    }
    element.appendChild(tr);
  }
  section.appendChild(element);
  return section;
}

function barChart(
  caption: string,
  className: string,
  rows: [string, number][],
): HTMLElement {
  const section = document.createElement("section");
  section.className = `stats-bars ${className}`;
  const heading = document.createElement("h3");
  heading.textContent = caption;
  section.appendChild(heading);
  const widest = rows.reduce((max, [, count]) => Math.max(max, count), 0);
  for (const [label, count] of rows) {
    const row = document.createElement("div");
    row.className = "bar-row";
    const name = document.createElement("span");
    name.className = "bar-label";
    name.textContent = label;
    row.appendChild(name);
    const bar = document.createElement("span");
    bar.className = "bar";
    const percent = widest > 0 ? Math.max((count / widest) * 100, 2) : 0;
    bar.style.width = `${percent}%`;
    row.appendChild(bar);
    const value = document.createElement("span");
    value.className = "bar-value";
    value.textContent = String(count);
    row.appendChild(value);
    section.appendChild(row);
  }
  return section;
}
