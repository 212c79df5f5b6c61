import { describe, expect, it } from "vitest";

import {
  buildMultigraph,
  genSyntheticAttributes,
  normalizedAdjacency,
  tableFromCsv,
  tableToCsv,
} from "../src/data.js";

describe("buildMultigraph", () => {
  it("edge weights are absolute attribute differences (brute force)", () => {
    const subject = {
      id: "s1",
      label: 0 as const,
      values: [
        [1.0, 0.2],
        [3.0, 0.9],
        [-2.0, 0.4],
      ],
    };
    const { views } = buildMultigraph(subject);
    for (let v = 0; v < 2; v++) {
      for (let i = 0; i < 3; i++) {
        for (let j = 0; j < 3; j++) {
          const expected = i === j ? 0 : Math.abs(subject.values[i][v] - subject.values[j][v]);
          expect(views[v][i][j]).toBe(expected);
        }
      }
    }
  });

  it("constant attribute yields the all-zero view", () => {
    const subject = { id: "s1", label: 1 as const, values: [[5], [5], [5]] };
    const { views } = buildMultigraph(subject);
    expect(views[0].flat().every((w) => w === 0)).toBe(true);
  });

  it("two regions produce the single distance edge", () => {
    const subject = { id: "s1", label: 0 as const, values: [[1], [3]] };
    const { views } = buildMultigraph(subject);
    expect(views[0][0][1]).toBe(2);
    expect(views[0][1][0]).toBe(2);
  });

  it("views are symmetric with zero diagonal", () => {
    const table = genSyntheticAttributes(11, 4, 8, 3);
    for (const subject of table.subjects) {
      const { views } = buildMultigraph(subject);
      for (const view of views) {
        for (let i = 0; i < view.length; i++) {
          expect(view[i][i]).toBe(0);
          for (let j = 0; j < view.length; j++) {
            expect(view[i][j]).toBe(view[j][i]);
            expect(Number.isFinite(view[i][j])).toBe(true);
          }
        }
      }
    }
  });
});

describe("attribute table CSV", () => {
  it("round-trips", () => {
    const table = genSyntheticAttributes(5, 6, 4, 2);
    const parsed = tableFromCsv(tableToCsv(table));
    expect(parsed.nRegions).toBe(4);
    expect(parsed.attrNames).toEqual(table.attrNames);
    expect(parsed.subjects).toEqual(table.subjects);
  });

  it("rejects a bad header", () => {
    expect(() => tableFromCsv("a,b,c\n1,2,3\n")).toThrow(/subject,label,region/);
  });

  it("rejects non-binary labels", () => {
    expect(() => tableFromCsv("subject,label,region,attr1\ns1,2,0,1.0\n")).toThrow(/0 or 1/);
  });
});

describe("genSyntheticAttributes", () => {
  it("is deterministic per seed", () => {
    expect(tableToCsv(genSyntheticAttributes(9, 8, 6, 2))).toBe(
      tableToCsv(genSyntheticAttributes(9, 8, 6, 2)),
    );
    expect(tableToCsv(genSyntheticAttributes(9, 8, 6, 2))).not.toBe(
      tableToCsv(genSyntheticAttributes(10, 8, 6, 2)),
    );
  });

  it("balances the cohort", () => {
    const table = genSyntheticAttributes(1, 20, 5, 2);
    const ones = table.subjects.filter((s) => s.label === 1).length;
    expect(ones).toBe(10);
  });
});

describe("normalizedAdjacency", () => {
  it("stays symmetric and finite", () => {
    const table = genSyntheticAttributes(2, 2, 6, 1);
    const { views } = buildMultigraph(table.subjects[0]);
    const norm = normalizedAdjacency(views[0]);
    for (let i = 0; i < 6; i++) {
      for (let j = 0; j < 6; j++) {
        expect(Number.isFinite(norm[i][j])).toBe(true);
        expect(norm[i][j]).toBeCloseTo(norm[j][i], 12);
      }
    }
  });
});
