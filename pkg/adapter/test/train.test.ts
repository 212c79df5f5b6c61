import { describe, expect, it } from "vitest";

import { genSyntheticAttributes } from "../src/data.js";
import { DEFAULT_PLAN, ExportPlan, exportStudy, toJsonl } from "../src/train.js";

const tinyPlan: ExportPlan = {
  ...DEFAULT_PLAN,
  seed: 13,
  epochs: 2,
  hidden: 4,
  archs: ["gcn", "sagpool"],
  modes: [
    { id: "cv3", kind: "cv", folds: 3 },
    { id: "fs", kind: "fewshot", perClass: 2, runs: 2 },
  ],
};

describe("exportStudy", () => {
  it("emits one record per (arch, view, mode, run) with n_r weights", () => {
    const table = genSyntheticAttributes(13, 12, 8, 2);
    const study = exportStudy(table, tinyPlan);
    // 2 archs x 2 views x (3 cv folds + 2 fs runs)
    expect(study.records).toHaveLength(2 * 2 * 5);
    for (const record of study.records) {
      expect(record.weights).toHaveLength(8);
      expect(record.weights.every(Number.isFinite)).toBe(true);
    }
    const keys = new Set(study.records.map((r) => `${r.model}|${r.view}|${r.mode}|${r.run}`));
    expect(keys.size).toBe(study.records.length);
  });

  it("builds a config the analyzer understands", () => {
    const table = genSyntheticAttributes(13, 12, 8, 2);
    const study = exportStudy(table, tinyPlan);
    expect(study.config).toEqual({
      n_r: 8,
      models: ["gcn", "sagpool"],
      views: ["attr1", "attr2"],
      modes: ["cv3", "fs"],
      thresholds: [5],
    });
  });

  it("is byte-deterministic per seed", () => {
    const table = genSyntheticAttributes(13, 12, 8, 2);
    const a = toJsonl(exportStudy(table, tinyPlan).records);
    const b = toJsonl(exportStudy(table, tinyPlan).records);
    expect(a).toBe(b);
  });

  it("JSONL lines carry the canonical schema", () => {
    const table = genSyntheticAttributes(13, 12, 8, 2);
    const line = toJsonl(exportStudy(table, tinyPlan).records).split("\n")[0];
    const parsed = JSON.parse(line);
    expect(Object.keys(parsed)).toEqual(["model", "view", "mode", "run", "weights"]);
    expect(typeof parsed.run).toBe("number");
  });
});
