/**
 * Adapter CLI.
 *
 *   gen-data  - synthesize an attribute table CSV
 *   export    - train the model pool on a table and emit JSONL + config
 *   roundtrip - gen-data + export + drive the analyzer's validate/run
 */

import { spawnSync } from "node:child_process";
import { mkdirSync, readFileSync, writeFileSync } from "node:fs";
import { join } from "node:path";
import { parseArgs } from "node:util";

import { genSyntheticAttributes, readTable, writeTable } from "./data.js";
import { ARCHITECTURES, ArchName } from "./models.js";
import { DEFAULT_PLAN, ExportPlan, exportStudy, toJsonl } from "./train.js";

function fail(message: string): never {
  console.error(`error: ${message}`);
  process.exit(1);
}

function cmdGenData(argv: string[]): void {
  const { values } = parseArgs({
    args: argv,
    options: {
      seed: { type: "string", default: "7" },
      subjects: { type: "string", default: "40" },
      regions: { type: "string", default: "35" },
      attrs: { type: "string", default: "2" },
      out: { type: "string" },
    },
  });
  if (!values.out) fail("gen-data requires --out");
  const table = genSyntheticAttributes(
    Number(values.seed), Number(values.subjects), Number(values.regions), Number(values.attrs),
  );
  writeTable(values.out, table);
  console.error(`wrote ${table.subjects.length} subjects x ${table.nRegions} regions to ${values.out}`);
}

function planFromArgs(values: Record<string, string | undefined>): ExportPlan {
  const archs = (values.archs ? values.archs.split(",") : [...ARCHITECTURES]) as ArchName[];
  const modes = DEFAULT_PLAN.modes
    .filter((m) => (values.modes ? values.modes.split(",").includes(m.id) : true))
    .map((m) => (m.kind === "fewshot" ? { ...m, runs: Number(values["fs-runs"] ?? m.runs) } : m));
  if (modes.length === 0) fail("no known modes selected (available: cv3, fs)");
  return {
    ...DEFAULT_PLAN,
    seed: Number(values.seed ?? DEFAULT_PLAN.seed),
    epochs: Number(values.epochs ?? DEFAULT_PLAN.epochs),
    hidden: Number(values.hidden ?? DEFAULT_PLAN.hidden),
    archs,
    modes,
  };
}

function cmdExport(argv: string[]): void {
  const { values } = parseArgs({
    args: argv,
    options: {
      data: { type: "string" },
      seed: { type: "string" },
      epochs: { type: "string" },
      hidden: { type: "string" },
      archs: { type: "string" },
      modes: { type: "string" },
      "fs-runs": { type: "string" },
      out: { type: "string" },
      "config-out": { type: "string" },
    },
  });
  if (!values.data || !values.out) fail("export requires --data and --out");
  const table = readTable(values.data);
  const plan = planFromArgs(values as Record<string, string | undefined>);
  const started = Date.now();
  const study = exportStudy(table, plan);
  writeFileSync(values.out, toJsonl(study.records), "utf-8");
  const configOut = values["config-out"] ?? values.out.replace(/\.jsonl$/, "") + ".config.json";
  writeFileSync(configOut, JSON.stringify(study.config, null, 2) + "\n", "utf-8");
  console.error(
    `trained ${study.records.length} cells in ${((Date.now() - started) / 1000).toFixed(1)}s; ` +
      `wrote ${values.out} and ${configOut}`,
  );
}

function runPython(pythonBin: string, args: string[]): void {
  const shown = `${pythonBin} -m reprograph ${args.join(" ")}`;
  console.error(`+ ${shown}`);
  const proc = spawnSync(pythonBin, ["-m", "reprograph", ...args], { stdio: "inherit" });
  if (proc.status !== 0) fail(`analyzer step failed: ${shown}`);
}

function cmdRoundtrip(argv: string[]): void {
  const { values } = parseArgs({
    args: argv,
    options: {
      workdir: { type: "string", default: ".roundtrip" },
      python: { type: "string", default: "python3" },
      seed: { type: "string", default: "7" },
      epochs: { type: "string", default: "10" },
      "fs-runs": { type: "string", default: "10" },
    },
  });
  const workdir = values.workdir!;
  mkdirSync(workdir, { recursive: true });
  const dataCsv = join(workdir, "attributes.csv");
  const jsonl = join(workdir, "study.jsonl");
  const config = join(workdir, "study.config.json");
  const outDir = join(workdir, "analysis");

  cmdGenData(["--seed", values.seed!, "--subjects", "40", "--regions", "35", "--attrs", "2", "--out", dataCsv]);
  cmdExport([
    "--data", dataCsv, "--seed", values.seed!, "--epochs", values.epochs!,
    "--fs-runs", values["fs-runs"]!, "--out", jsonl, "--config-out", config,
  ]);
  runPython(values.python!, ["validate", "--config", config, "--input", jsonl]);
  runPython(values.python!, ["run", "--config", config, "--input", jsonl, "--out", outDir]);
  const report = JSON.parse(readFileSync(join(outDir, "report.json"), "utf-8"));
  console.error(`roundtrip complete: grand winner ${report.grand.winner} (tie: ${report.grand.tie})`);
}

function main(): void {
  const [command, ...rest] = process.argv.slice(2);
  switch (command) {
    case "gen-data":
      return cmdGenData(rest);
    case "export":
      return cmdExport(rest);
    case "roundtrip":
      return cmdRoundtrip(rest);
    default:
      fail(`unknown command ${command ?? "(none)"}; expected gen-data | export | roundtrip`);
  }
}

main();
