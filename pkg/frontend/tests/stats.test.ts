import { describe, expect, it } from "vitest";

import { renderStats } from "../src/stats.js";
import type { StatsReport } from "../src/types.js";
import { container, recorded } from "./helpers.js";

const statsFixture = recorded<StatsReport>("stats.json");

describe("stats dashboard (S2)", () => {
  it("renders the per-class counts exactly as reported", () => {
    const root = container();
    renderStats(root, statsFixture);
    const rows = Array.from(root.querySelectorAll(".per-class tr")).slice(1);
    const rendered = Object.fromEntries(
      rows.map((row) => {
        const cells = row.querySelectorAll("td");
        return [cells[0].textContent, Number(cells[1].textContent)];
      }),
    );
    expect(rendered).toEqual(statsFixture.graph.per_class);
  });

  it("renders node and edge counts verbatim", () => {
    const root = container();
    renderStats(root, statsFixture);
    const summary = root.querySelector(".graph-summary")?.textContent ?? "";
    expect(summary).toContain(`${statsFixture.graph.node_count} nodes`);
    expect(summary).toContain(`${statsFixture.graph.edge_count} edges`);
  });

  it("renders every distribution number from the report and nothing else", () => {
    const root = container();
    renderStats(root, statsFixture);
    const d = statsFixture.distributions;

    const barSections: [string, { count: number }[]][] = [
      (["effect-types", d.effect_types] as [string, { count: number }[]]),
      (["categories", d.categories] as [string, { count: number }[]]),
    ];
    for (const [className, rows] of barSections) {
      const values = Array.from(
        root.querySelectorAll(`.${className} .bar-value`),
      ).map((el) => Number(el.textContent));
      expect(values).toEqual(rows.map((row) => row.count));
    }

    const mediumCells = Array.from(root.querySelectorAll(".mediums tr"))
      .slice(1)
      .map((row) => {
        const cells = row.querySelectorAll("td");
        return [cells[0].textContent, Number(cells[1].textContent)] as const;
      });
    expect(mediumCells).toEqual(d.validation_mediums.map((row) => [row.medium, row.count]));

    const termCells = Array.from(root.querySelectorAll(".top-terms tr"))
      .slice(1)
      .map((row) => {
        const cells = row.querySelectorAll("td");
        return [cells[0].textContent, Number(cells[1].textContent)] as const;
      });
    expect(termCells).toEqual(d.top_terms.map((row) => [row.term, row.count]));
  });

  it("labels match the report order (no client-side re-sorting)", () => {
    const root = container();
    renderStats(root, statsFixture);
    const labels = Array.from(
      root.querySelectorAll(".effect-types .bar-label"),
    ).map((el) => el.textContent);
    expect(labels).toEqual(statsFixture.distributions.effect_types.map((r) => r.effect_type));
  });
});
