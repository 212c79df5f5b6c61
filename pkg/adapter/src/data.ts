/**
 * Attribute tables and multigraph construction.
 *
 * A subject is described by one averaged measurement per (region, attribute).
 * Each attribute becomes one view of the subject's multigraph: the edge
 * between two regions is the absolute difference of their attribute values,
 * which makes every view slice symmetric with a zero diagonal by
 * construction.
 */

import { readFileSync, writeFileSync } from "node:fs";

import { Rng } from "./rng.js";

export interface Subject {
  id: string;
  label: 0 | 1;
  /** values[region][attribute] */
  values: number[][];
}

export interface AttributeTable {
  nRegions: number;
  attrNames: string[];
  subjects: Subject[];
}

export interface MultigraphSample {
  /** views[v][i][j] = |values[i][v] - values[j][v]| */
  views: number[][][];
  label: 0 | 1;
}

export function buildMultigraph(subject: Subject): MultigraphSample {
  const nR = subject.values.length;
  const nV = subject.values[0].length;
  const views: number[][][] = [];
  for (let v = 0; v < nV; v++) {
    const view: number[][] = [];
    for (let i = 0; i < nR; i++) {
      const row: number[] = [];
      for (let j = 0; j < nR; j++) {
        const w = Math.abs(subject.values[i][v] - subject.values[j][v]);
        if (!Number.isFinite(w)) {
          throw new Error(`non-finite edge weight for subject ${subject.id}`);
        }
        row.push(i === j ? 0 : w);
      }
      view.push(row);
    }
    views.push(view);
  }
  return { views, label: subject.label };
}

/**
 * Synthetic cohort: class 1 shifts a few regions per attribute, the rest is
 * shared structure plus noise. Enough signal for toy models to learn from.
 */
export function genSyntheticAttributes(
  seed: number,
  nSubjects: number,
  nRegions: number,
  nAttrs: number,
): AttributeTable {
  const rng = new Rng(seed);
  const attrNames = Array.from({ length: nAttrs }, (_, v) => `attr${v + 1}`);
  const base = attrNames.map(() => rng.normalArray(nRegions, 1.0));
  const shift = attrNames.map(() => {
    const s = new Array(nRegions).fill(0);
    for (let hit = 0; hit < Math.max(2, Math.floor(nRegions / 8)); hit++) {
      s[rng.int(nRegions)] = rng.uniform(1.0, 2.0);
    }
    return s;
  });
  const subjects: Subject[] = [];
  for (let s = 0; s < nSubjects; s++) {
    const label = (s % 2) as 0 | 1; // balanced cohort
    const values: number[][] = [];
    for (let i = 0; i < nRegions; i++) {
      const row: number[] = [];
      for (let v = 0; v < nAttrs; v++) {
        row.push(base[v][i] + label * shift[v][i] + rng.normal() * 0.3);
      }
      values.push(row);
    }
    subjects.push({ id: `s${String(s + 1).padStart(3, "0")}`, label, values });
  }
  return { nRegions, attrNames, subjects };
}

/** CSV layout: one row per (subject, region): subject,label,region,<attrs...> */
export function tableToCsv(table: AttributeTable): string {
  const lines = [["subject", "label", "region", ...table.attrNames].join(",")];
  for (const subject of table.subjects) {
    subject.values.forEach((row, region) => {
      lines.push([subject.id, subject.label, region, ...row.map((x) => String(x))].join(","));
    });
  }
  return lines.join("\n") + "\n";
}

export function tableFromCsv(text: string): AttributeTable {
  const rows = text.trim().split("\n").map((line) => line.split(","));
  const header = rows[0];
  if (header.slice(0, 3).join(",") !== "subject,label,region") {
    throw new Error("attribute CSV must start with columns subject,label,region");
  }
  const attrNames = header.slice(3);
  const bySubject = new Map<string, Subject>();
  let nRegions = 0;
  for (const row of rows.slice(1)) {
    if (row.length !== header.length) {
      throw new Error(`row with ${row.length} cells, expected ${header.length}`);
    }
    const [id, labelText, regionText, ...values] = row;
    const label = Number(labelText);
    if (label !== 0 && label !== 1) throw new Error(`label for ${id} must be 0 or 1`);
    const region = Number(regionText);
    let subject = bySubject.get(id);
    if (!subject) {
      subject = { id, label: label as 0 | 1, values: [] };
      bySubject.set(id, subject);
    }
    subject.values[region] = values.map((v) => {
      const x = Number(v);
      if (!Number.isFinite(x)) throw new Error(`non-finite attribute for ${id}`);
      return x;
    });
    nRegions = Math.max(nRegions, region + 1);
  }
  const subjects = [...bySubject.values()];
  for (const subject of subjects) {
    if (subject.values.length !== nRegions || subject.values.some((r) => r === undefined)) {
      throw new Error(`subject ${subject.id} is missing regions`);
    }
  }
  return { nRegions, attrNames, subjects };
}

export function writeTable(path: string, table: AttributeTable): void {
  writeFileSync(path, tableToCsv(table), "utf-8");
}

export function readTable(path: string): AttributeTable {
  return tableFromCsv(readFileSync(path, "utf-8"));
}

/**
 * Symmetrically normalized adjacency with self-loops, used both as the
 * propagation operator and as node features.
 */
export function normalizedAdjacency(view: number[][]): number[][] {
  const n = view.length;
  const degrees = view.map((row, i) => row.reduce((acc, w, j) => acc + (i === j ? 0 : w), 1));
  const inv = degrees.map((d) => 1 / Math.sqrt(d));
  const out: number[][] = [];
  for (let i = 0; i < n; i++) {
    const row: number[] = [];
    for (let j = 0; j < n; j++) {
      const a = i === j ? 1 : view[i][j];
      row.push(a * inv[i] * inv[j]);
    }
    out.push(row);
  }
  return out;
}
