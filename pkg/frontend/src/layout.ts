/** Generation-layered pedigree layout.
 *
 * Rows come from longest-path generation depth, with partners pulled onto
 * a shared row; each union gets a junction point below its parents from
 * which child connectors fan out. Loops (cousin marriages) simply produce
 * connectors that travel between non-adjacent columns; they are drawn as
 * routed polylines rather than being forbidden.
 */

import type { PedigreeDoc } from "./types.js";

export interface PlacedNode {
  id: string;
  x: number;
  y: number;
  row: number;
}

export interface PlacedJunction {
  union: string;
  x: number;
  y: number;
}

export interface Connector {
  union: string;
  kind: "parent" | "child";
  from: [number, number];
  to: [number, number];
}

export interface Layout {
  nodes: Record<string, PlacedNode>;
  junctions: PlacedJunction[];
  connectors: Connector[];
  width: number;
  height: number;
}

export const COL_WIDTH = 96;
export const ROW_HEIGHT = 116;
export const NODE_RADIUS = 22;

export function generationRows(doc: PedigreeDoc): Record<string, number> {
  const row: Record<string, number> = {};
  for (const p of doc.persons) row[p.id] = 0;
  const n = doc.persons.length;
  // longest-path depth plus partner equalization, iterated to a fixpoint
  for (let pass = 0; pass <= n; pass += 1) {
    let changed = false;
    for (const u of doc.unions) {
      const parentRow = Math.max(row[u.mother] ?? 0, row[u.father] ?? 0);
      for (const pid of [u.mother, u.father]) {
        if (row[pid] !== undefined && row[pid] < parentRow) {
          row[pid] = parentRow;
          changed = true;
        }
      }
      for (const c of u.children) {
        if (row[c] !== undefined && row[c] < parentRow + 1) {
          row[c] = parentRow + 1;
          changed = true;
        }
      }
    }
    if (!changed) break;
  }
  return row;
}

export function computeLayout(doc: PedigreeDoc): Layout {
  if (!doc.persons.length) {
    return { nodes: {}, junctions: [], connectors: [], width: 0, height: 0 };
  }
  const rows = generationRows(doc);
  const maxRow = Math.max(...Object.values(rows));

  const byRow: string[][] = Array.from({ length: maxRow + 1 }, () => []);
  for (const p of doc.persons) byRow[rows[p.id]].push(p.id);

  const parentsOf: Record<string, [string, string] | undefined> = {};
  for (const u of doc.unions) {
    for (const c of u.children) parentsOf[c] = [u.mother, u.father];
  }

  const x: Record<string, number> = {};
  byRow.forEach((ids, rowIndex) => {
    // order children under their parents; then keep partners adjacent
    const key = (pid: string): number => {
      const parents = parentsOf[pid];
      if (rowIndex > 0 && parents) {
        const known = parents
          .map((q) => x[q])
          .filter((v): v is number => v !== undefined);
        if (known.length) {
          return known.reduce((a, b) => a + b, 0) / known.length;
        }
      }
      return Number.MAX_SAFE_INTEGER;
    };
    ids.sort((a, b) => key(a) - key(b) || (a < b ? -1 : 1));
    ids.forEach((pid, i) => {
      x[pid] = (i + 1) * COL_WIDTH;
    });
  });

  const nodes: Record<string, PlacedNode> = {};
  for (const p of doc.persons) {
    nodes[p.id] = {
      id: p.id,
      x: x[p.id],
      y: (rows[p.id] + 0.5) * ROW_HEIGHT,
      row: rows[p.id],
    };
  }

  const junctions: PlacedJunction[] = [];
  const connectors: Connector[] = [];
  for (const u of doc.unions) {
    const mother = nodes[u.mother];
    const father = nodes[u.father];
    if (!mother || !father) continue;
    const jx = (mother.x + father.x) / 2;
    const jy = Math.max(mother.y, father.y) + ROW_HEIGHT * 0.42;
    junctions.push({ union: u.id, x: jx, y: jy });
    for (const parent of [mother, father]) {
      connectors.push({
        union: u.id,
        kind: "parent",
        from: [parent.x, parent.y + NODE_RADIUS],
        to: [jx, jy],
      });
    }
    for (const c of u.children) {
      const child = nodes[c];
      if (!child) continue;
      connectors.push({
        union: u.id,
        kind: "child",
        from: [jx, jy],
        to: [child.x, child.y - NODE_RADIUS],
      });
    }
  }

  const width = Math.max(...Object.values(x)) + COL_WIDTH;
  const height = (maxRow + 1.2) * ROW_HEIGHT;
  return { nodes, junctions, connectors, width, height };
}
