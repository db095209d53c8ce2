// Layered DAG rendering: vertices grouped into columns by topo level,
// sorted by id inside a column. Deterministic by construction; no force
// layout, so the same graph always draws the same picture.

import type { GraphJson, GraphVertex } from "./api.js";

export interface Point {
  x: number;
  y: number;
}

export interface Layout {
  columns: GraphVertex[][];
  positions: Map<number, Point>;
  width: number;
  height: number;
}

const COL_WIDTH = 110;
const ROW_HEIGHT = 64;
const MARGIN = 40;

export function layoutByLevel(graph: GraphJson): Layout {
  const byLevel = new Map<number, GraphVertex[]>();
  for (const v of graph.vertices) {
    const column = byLevel.get(v.level) ?? [];
    column.push(v);
    byLevel.set(v.level, column);
  }
  const levels = [...byLevel.keys()].sort((a, b) => a - b);
  const columns = levels.map((lvl) =>
    (byLevel.get(lvl) ?? []).sort((a, b) => a.id - b.id),
  );
  const positions = new Map<number, Point>();
  columns.forEach((column, col) => {
    column.forEach((v, row) => {
      positions.set(v.id, {
        x: MARGIN + col * COL_WIDTH,
        y: MARGIN + row * ROW_HEIGHT,
      });
    });
  });
  const tallest = Math.max(1, ...columns.map((c) => c.length));
  return {
    columns,
    positions,
    width: MARGIN * 2 + Math.max(0, columns.length - 1) * COL_WIDTH,
    height: MARGIN * 2 + (tallest - 1) * ROW_HEIGHT,
  };
}

export interface Highlights {
  clean?: Set<number>; // root side of the clean bound
  pending?: Set<number>; // root side of the cut being examined
  culprits?: Set<number>;
}

function vertexClass(id: number, hl: Highlights): string {
  if (hl.culprits?.has(id)) return "vertex culprit";
  if (hl.pending?.has(id)) return "vertex pending";
  if (hl.clean?.has(id)) return "vertex clean";
  return "vertex";
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderSvg(graph: GraphJson, hl: Highlights = {}): string {
  const layout = layoutByLevel(graph);
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${layout.width} ${layout.height}" ` +
      `width="${layout.width}" height="${layout.height}" class="dag">`,
  );
  parts.push(
    '<defs><marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" ' +
      'markerWidth="6" markerHeight="6" orient="auto-start-reverse">' +
      '<path d="M 0 0 L 10 5 L 0 10 z"/></marker></defs>',
  );
  for (const e of graph.edges) {
    const a = layout.positions.get(e.src);
    const b = layout.positions.get(e.dst);
    if (!a || !b) continue;
    const cls = e.kind === "control" ? "edge control" : "edge data";
    const label = e.kind === "data" ? `${e.var}=${JSON.stringify(e.value)}` : "";
    parts.push(
      `<line class="${cls}" x1="${a.x + 14}" y1="${a.y}" x2="${b.x - 14}" y2="${b.y}" marker-end="url(#arrow)"/>`,
    );
    if (label) {
      const mx = (a.x + b.x) / 2;
      const my = (a.y + b.y) / 2 - 5;
      parts.push(
        `<text class="edge-label" x="${mx}" y="${my}" text-anchor="middle">${escapeXml(label)}</text>`,
      );
    }
  }
  for (const v of graph.vertices) {
    const p = layout.positions.get(v.id);
    if (!p) continue;
    parts.push(
      `<g class="${vertexClass(v.id, hl)}">` +
        `<circle cx="${p.x}" cy="${p.y}" r="14"/>` +
        `<text x="${p.x}" y="${p.y + 4}" text-anchor="middle">${v.id}</text>` +
        `<title>${escapeXml(`v${v.id}: ${v.desc}`)}</title>` +
        "</g>",
    );
  }
  parts.push("</svg>");
  return parts.join("");
}
