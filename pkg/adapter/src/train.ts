/**
 * Training harness: for each (architecture, view, mode, run) it trains a
 * classifier on the mode's training subjects and extracts the node-scoring
 * readout as that cell's biomarker weight vector.
 *
 * Model selection follows the inner-holdout protocol: the learning rate is
 * picked once per (architecture, view, mode) by training candidates on an
 * inner split of the first run's training set and scoring them on the
 * held-out part; the winning rate is then used for every run of the cell,
 * trained on the run's full training set.
 */

import * as tf from "@tensorflow/tfjs";

import { AttributeTable, buildMultigraph, normalizedAdjacency } from "./data.js";
import { ARCHITECTURES, ArchName, buildModel } from "./models.js";
import { Rng, subSeed } from "./rng.js";
import { Split, fewShotSplits, innerHoldout, kFoldStratified } from "./splits.js";

export interface ModeSpec {
  id: string;
  kind: "cv" | "fewshot";
  folds?: number; // cv
  perClass?: number; // fewshot
  runs?: number; // fewshot
}

export interface ExportPlan {
  seed: number;
  epochs: number;
  hidden: number;
  learningRates: number[];
  archs: ArchName[];
  modes: ModeSpec[];
}

export const DEFAULT_PLAN: ExportPlan = {
  seed: 7,
  epochs: 10,
  hidden: 8,
  learningRates: [0.001, 0.0001],
  archs: [...ARCHITECTURES],
  modes: [
    { id: "cv3", kind: "cv", folds: 3 },
    { id: "fs", kind: "fewshot", perClass: 2, runs: 10 },
  ],
};

export interface WeightRecordOut {
  model: string;
  view: string;
  mode: string;
  run: number;
  weights: number[];
}

export interface StudyExport {
  records: WeightRecordOut[];
  config: {
    n_r: number;
    models: string[];
    views: string[];
    modes: string[];
    thresholds: number[];
  };
  /** splits actually used, per mode (same for every architecture/view) */
  splits: Record<string, Split[]>;
}

interface ViewTensors {
  x: tf.Tensor3D; // [subjects, n, n] normalized adjacency
  labels: number[];
}

function viewTensors(table: AttributeTable, view: number): ViewTensors {
  const graphs = table.subjects.map((s) => buildMultigraph(s));
  const mats = graphs.map((g) => normalizedAdjacency(g.views[view]));
  return {
    x: tf.tensor3d(mats, [table.subjects.length, table.nRegions, table.nRegions]),
    labels: table.subjects.map((s) => s.label),
  };
}

function trainOnce(
  arch: ArchName,
  data: ViewTensors,
  trainIdx: number[],
  lr: number,
  epochs: number,
  hidden: number,
  seed: number,
): { weights: number[]; accuracyOn: (idx: number[]) => number; dispose: () => void } {
  const nR = data.x.shape[1];
  const model = buildModel(arch, nR, hidden, new Rng(seed));
  const xTrain = tf.gather(data.x, trainIdx) as tf.Tensor3D;
  const yTrain = tf.tensor1d(trainIdx.map((i) => data.labels[i]), "float32");
  const optimizer = tf.train.adam(lr);
  for (let epoch = 0; epoch < epochs; epoch++) {
    optimizer.minimize(
      () => tf.losses.sigmoidCrossEntropy(yTrain, model.forward(xTrain)) as tf.Scalar,
      false,
      model.vars,
    );
  }
  const accuracyOn = (idx: number[]): number => {
    if (idx.length === 0) return 0;
    return tf.tidy(() => {
      const xs = tf.gather(data.x, idx) as tf.Tensor3D;
      const preds = Array.from(model.forward(xs).dataSync()).map((v) => (v > 0 ? 1 : 0));
      const hits = preds.filter((p, j) => p === data.labels[idx[j]]).length;
      return hits / idx.length;
    });
  };
  return {
    weights: model.readoutWeights(),
    accuracyOn,
    dispose: () => {
      model.dispose();
      optimizer.dispose();
      xTrain.dispose();
      yTrain.dispose();
    },
  };
}

function selectLearningRate(
  arch: ArchName,
  data: ViewTensors,
  firstSplit: Split,
  plan: ExportPlan,
  seed: number,
): number {
  if (plan.learningRates.length === 1) return plan.learningRates[0];
  const { inner, holdout } = innerHoldout(firstSplit.train, data.labels, new Rng(subSeed(seed, "holdout")));
  let best = plan.learningRates[0];
  let bestAcc = -1;
  for (const lr of plan.learningRates) {
    const run = trainOnce(arch, data, inner, lr, plan.epochs, plan.hidden, subSeed(seed, `lr:${lr}`));
    const acc = run.accuracyOn(holdout);
    run.dispose();
    if (acc > bestAcc) {
      bestAcc = acc;
      best = lr;
    }
  }
  return best;
}

function splitsForMode(mode: ModeSpec, labels: number[], seed: number): Split[] {
  const rng = new Rng(subSeed(seed, `mode:${mode.id}`));
  if (mode.kind === "cv") {
    return kFoldStratified(labels, mode.folds ?? 3, rng);
  }
  return fewShotSplits(labels, mode.perClass ?? 2, mode.runs ?? 10, rng);
}

export function exportStudy(table: AttributeTable, plan: ExportPlan = DEFAULT_PLAN): StudyExport {
  const views = table.attrNames;
  const labels = table.subjects.map((s) => s.label);
  const splits: Record<string, Split[]> = {};
  for (const mode of plan.modes) {
    splits[mode.id] = splitsForMode(mode, labels, plan.seed);
  }

  const records: WeightRecordOut[] = [];
  for (const arch of plan.archs) {
    for (let v = 0; v < views.length; v++) {
      const data = viewTensors(table, v);
      for (const mode of plan.modes) {
        const modeSplits = splits[mode.id];
        const cellSeed = subSeed(plan.seed, `${arch}/${views[v]}/${mode.id}`);
        const lr = selectLearningRate(arch, data, modeSplits[0], plan, cellSeed);
        modeSplits.forEach((split, run) => {
          const job = trainOnce(
            arch, data, split.train, lr, plan.epochs, plan.hidden,
            subSeed(cellSeed, `run:${run}`),
          );
          records.push({
            model: arch,
            view: views[v],
            mode: mode.id,
            run,
            weights: job.weights,
          });
          job.dispose();
        });
      }
      data.x.dispose();
    }
  }

  const maxThreshold = table.nRegions;
  const thresholds = [5, 10, 15, 20].filter((k) => k <= maxThreshold);
  return {
    records,
    config: {
      n_r: table.nRegions,
      models: [...plan.archs],
      views: [...views],
      modes: plan.modes.map((m) => m.id),
      thresholds: thresholds.length ? thresholds : [Math.max(1, Math.floor(maxThreshold / 2))],
    },
    splits,
  };
}

export function toJsonl(records: WeightRecordOut[]): string {
  return (
    records
      .map((r) =>
        JSON.stringify({ model: r.model, view: r.view, mode: r.mode, run: r.run, weights: r.weights }),
      )
      .join("\n") + "\n"
  );
}
