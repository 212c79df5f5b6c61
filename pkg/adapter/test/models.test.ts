import * as tf from "@tensorflow/tfjs";
import { describe, expect, it } from "vitest";

import { buildMultigraph, genSyntheticAttributes, normalizedAdjacency } from "../src/data.js";
import { ARCHITECTURES, UnsupportedArchitectureError, buildModel } from "../src/models.js";
import { Rng } from "../src/rng.js";

const N = 10;

function batch(): tf.Tensor3D {
  const table = genSyntheticAttributes(21, 6, N, 1);
  const mats = table.subjects.map((s) => normalizedAdjacency(buildMultigraph(s).views[0]));
  return tf.tensor3d(mats, [6, N, N]);
}

describe.each(ARCHITECTURES)("architecture %s", (arch) => {
  it("produces one logit per graph", () => {
    const model = buildModel(arch, N, 4, new Rng(1));
    const x = batch();
    const logits = model.forward(x);
    expect(logits.shape).toEqual([6]);
    expect(Array.from(logits.dataSync()).every(Number.isFinite)).toBe(true);
    logits.dispose();
    x.dispose();
    model.dispose();
  });

  it("exposes a readout weight per region", () => {
    const model = buildModel(arch, N, 4, new Rng(2));
    const w = model.readoutWeights();
    expect(w).toHaveLength(N);
    expect(w.every(Number.isFinite)).toBe(true);
    model.dispose();
  });

  it("is deterministic given the seed", () => {
    const x = batch();
    const a = buildModel(arch, N, 4, new Rng(3));
    const b = buildModel(arch, N, 4, new Rng(3));
    expect(Array.from(a.forward(x).dataSync())).toEqual(Array.from(b.forward(x).dataSync()));
    expect(a.readoutWeights()).toEqual(b.readoutWeights());
    a.dispose();
    b.dispose();
    x.dispose();
  });

  it("training reduces the loss", () => {
    const x = batch();
    const y = tf.tensor1d([0, 1, 0, 1, 0, 1], "float32");
    const model = buildModel(arch, N, 4, new Rng(4));
    const lossNow = () =>
      tf.tidy(() => (tf.losses.sigmoidCrossEntropy(y, model.forward(x)) as tf.Scalar).dataSync()[0]);
    const before = lossNow();
    const optimizer = tf.train.adam(0.01);
    for (let i = 0; i < 30; i++) {
      optimizer.minimize(
        () => tf.losses.sigmoidCrossEntropy(y, model.forward(x)) as tf.Scalar,
        false,
        model.vars,
      );
    }
    const after = lossNow();
    expect(after).toBeLessThan(before);
    optimizer.dispose();
    model.dispose();
    x.dispose();
    y.dispose();
  });

  it("readout changes with training (weights are learned)", () => {
    const x = batch();
    const y = tf.tensor1d([0, 1, 0, 1, 0, 1], "float32");
    const model = buildModel(arch, N, 4, new Rng(5));
    const before = model.readoutWeights();
    const optimizer = tf.train.adam(0.01);
    for (let i = 0; i < 5; i++) {
      optimizer.minimize(
        () => tf.losses.sigmoidCrossEntropy(y, model.forward(x)) as tf.Scalar,
        false,
        model.vars,
      );
    }
    expect(model.readoutWeights()).not.toEqual(before);
    optimizer.dispose();
    model.dispose();
    x.dispose();
    y.dispose();
  });
});

it("unsupported architectures raise instead of reshaping silently", () => {
  expect(() => buildModel("transformer", N, 4, new Rng(0))).toThrow(UnsupportedArchitectureError);
  expect(() => buildModel("transformer", N, 4, new Rng(0))).toThrow(/node-scoring/);
});
