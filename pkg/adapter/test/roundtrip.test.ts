/**
 * Round-trip acceptance: toy training over the full pool (5 architectures x
 * 2 views x {3-fold CV, few-shot 2/class with 10 runs}) must export JSONL
 * that passes the analyzer's `validate` and drives a full `run` to a winner,
 * with every split stratified to within one subject.
 */

import { spawnSync } from "node:child_process";
import { existsSync, mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { afterAll, describe, expect, it } from "vitest";

import { genSyntheticAttributes } from "../src/data.js";
import { stratificationError } from "../src/splits.js";
import { DEFAULT_PLAN, exportStudy, toJsonl } from "../src/train.js";

const PYTHON = process.env.REPROGRAPH_PYTHON ?? "python3";
const workdir = mkdtempSync(join(tmpdir(), "adapter-roundtrip-"));

afterAll(() => rmSync(workdir, { recursive: true, force: true }));

function python(args: string[]) {
  return spawnSync(PYTHON, ["-m", "reprograph", ...args], { encoding: "utf-8" });
}

describe("adapter round-trip", () => {
  it("exports a full study that the analyzer accepts and analyzes", { timeout: 300_000 }, () => {
    const table = genSyntheticAttributes(7, 40, 35, 2);
    const labels = table.subjects.map((s) => s.label);
    const study = exportStudy(table, { ...DEFAULT_PLAN, seed: 7, epochs: 8 });

    // 5 archs x 2 views x (3 + 10) runs
    expect(study.records).toHaveLength(5 * 2 * 13);

    // stratification invariant on every split actually used
    for (const splits of Object.values(study.splits)) {
      for (const { train, test } of splits) {
        expect(stratificationError(train, labels)).toBeLessThanOrEqual(1);
        expect(stratificationError(test, labels)).toBeLessThanOrEqual(1);
      }
    }

    const jsonlPath = join(workdir, "study.jsonl");
    const configPath = join(workdir, "study.config.json");
    writeFileSync(jsonlPath, toJsonl(study.records), "utf-8");
    writeFileSync(configPath, JSON.stringify(study.config, null, 2) + "\n", "utf-8");

    const validate = python(["validate", "--config", configPath, "--input", jsonlPath]);
    expect(validate.status, validate.stderr).toBe(0);
    expect(validate.stderr).toContain("OK");
    expect(validate.stderr).toContain("records=130");

    const outDir = join(workdir, "analysis");
    const run = python(["run", "--config", configPath, "--input", jsonlPath, "--out", outDir]);
    expect(run.status, run.stderr).toBe(0);

    const report = JSON.parse(readFileSync(join(outDir, "report.json"), "utf-8"));
    expect(study.config.models).toContain(report.grand.winner);
    for (const mode of ["cv3", "fs"]) {
      expect(study.config.models).toContain(report.mode_results[mode].winner);
    }
    expect(existsSync(join(outDir, "winner_weights.csv"))).toBe(true);
    expect(existsSync(join(outDir, "scores", "score_table.csv"))).toBe(true);
  });
});
