/**
 * Toy-scale graph classifiers. Each architecture keeps its defining
 * mechanism (differentiable cluster pooling, attention, spectral-style
 * propagation, self-attention pooling, pool/unpool with skip connections)
 * but runs on dense tensors at a few dozen nodes.
 *
 * Every model ends with a linear readout over the node dimension:
 * logit = sum_i readout[i] * node_score[i] (+ pooled-path terms where the
 * architecture has one). That readout vector has exactly one weight per
 * input region, and it is what gets exported as the model's biomarker
 * weight vector.
 */

import * as tf from "@tensorflow/tfjs";

import { Rng } from "./rng.js";

export type ArchName = "diffpool" | "gat" | "gcn" | "sagpool" | "gunets";

export const ARCHITECTURES: readonly ArchName[] = ["diffpool", "gat", "gcn", "sagpool", "gunets"];

export class UnsupportedArchitectureError extends Error {}

export interface GraphModel {
  arch: ArchName;
  vars: tf.Variable[];
  /** x: [batch, nodes, nodes] normalized adjacency (doubles as features). */
  forward(x: tf.Tensor3D): tf.Tensor1D;
  /** The per-region weights of the final node-scoring readout. */
  readoutWeights(): number[];
  dispose(): void;
}

function glorot(rng: Rng, rows: number, cols: number): tf.Variable {
  const scale = Math.sqrt(2 / (rows + cols));
  return tf.variable(tf.tensor2d(rng.normalArray(rows * cols, scale), [rows, cols]));
}

function vecVar(rng: Rng, n: number, scale = 0.1): tf.Variable {
  return tf.variable(tf.tensor1d(rng.normalArray(n, scale)));
}

/** [B,n,m] @ [m,h] -> [B,n,h] */
function mm3(a: tf.Tensor3D, w: tf.Variable | tf.Tensor2D): tf.Tensor3D {
  const [b, n, m] = a.shape;
  const h = w.shape[1] as number;
  return tf.matMul(a.reshape([b * n, m]), w).reshape([b, n, h]);
}

/** sum_i scores[b,i] * weights[i] -> [B] */
function nodeReadout(scores: tf.Tensor2D, weights: tf.Variable, bias: tf.Variable): tf.Tensor1D {
  return tf.add(tf.sum(tf.mul(scores, weights), 1), bias) as tf.Tensor1D;
}

/**
 * Detach top-k indices from the autodiff tape. Index selection is not
 * differentiable anyway, and tfjs errors out when the tape asks gather for
 * an indices gradient; gradients still flow through the gathered values.
 */
function detachIndices(t: tf.Tensor): tf.Tensor {
  return tf.tensor(Array.from(t.dataSync()), t.shape, "int32");
}

interface Common {
  nR: number;
  hidden: number;
  rng: Rng;
}

function buildGcn({ nR, hidden, rng }: Common): GraphModel {
  const w1 = glorot(rng, nR, hidden);
  const w2 = vecVar(rng, hidden);
  const readout = vecVar(rng, nR);
  const bias = tf.variable(tf.scalar(0));
  const vars = [w1, w2, readout, bias];
  return {
    arch: "gcn",
    vars,
    forward(x) {
      const h1 = tf.relu(tf.matMul(x, mm3(x, w1)));
      const scores = tf.sum(tf.mul(h1, w2), 2) as tf.Tensor2D;
      return nodeReadout(scores, readout, bias);
    },
    readoutWeights: () => Array.from(readout.dataSync()),
    dispose: () => vars.forEach((v) => v.dispose()),
  };
}

function buildGat({ nR, hidden, rng }: Common): GraphModel {
  const w = glorot(rng, nR, hidden);
  const attLeft = vecVar(rng, hidden);
  const attRight = vecVar(rng, hidden);
  const w2 = vecVar(rng, hidden);
  const readout = vecVar(rng, nR);
  const bias = tf.variable(tf.scalar(0));
  const vars = [w, attLeft, attRight, w2, readout, bias];
  return {
    arch: "gat",
    vars,
    forward(x) {
      const z = mm3(x, w); // [B,n,h]
      const left = tf.sum(tf.mul(z, attLeft), 2).expandDims(2); // [B,n,1]
      const right = tf.sum(tf.mul(z, attRight), 2).expandDims(1); // [B,1,n]
      const logitsRaw = tf.leakyRelu(tf.add(left, right), 0.2); // [B,n,n]
      // mask attention to the graph structure (self-loops included)
      const mask = tf.greater(x, 0);
      const masked = tf.where(mask, logitsRaw, tf.fill(logitsRaw.shape, -1e9));
      const alpha = tf.softmax(masked, 2);
      const h = tf.relu(tf.matMul(alpha, z));
      const scores = tf.sum(tf.mul(h, w2), 2) as tf.Tensor2D;
      return nodeReadout(scores, readout, bias);
    },
    readoutWeights: () => Array.from(readout.dataSync()),
    dispose: () => vars.forEach((v) => v.dispose()),
  };
}

function buildDiffpool({ nR, hidden, rng }: Common): GraphModel {
  const clusters = Math.max(2, Math.round(nR * 0.1)); // assignment ratio 0.1
  const wEmbed = glorot(rng, nR, hidden);
  const wAssign = glorot(rng, nR, clusters);
  const wPooled = glorot(rng, hidden, hidden);
  const pooledHead = vecVar(rng, hidden);
  const w2 = vecVar(rng, hidden);
  const readout = vecVar(rng, nR);
  const bias = tf.variable(tf.scalar(0));
  const vars = [wEmbed, wAssign, wPooled, pooledHead, w2, readout, bias];
  return {
    arch: "diffpool",
    vars,
    forward(x) {
      const z = tf.relu(tf.matMul(x, mm3(x, wEmbed))); // [B,n,h]
      const assign = tf.softmax(tf.matMul(x, mm3(x, wAssign)), 2); // [B,n,c]
      const assignT = tf.transpose(assign, [0, 2, 1]); // [B,c,n]
      const xPooled = tf.matMul(assignT, z); // [B,c,h]
      const aPooled = tf.matMul(tf.matMul(assignT, x), assign); // [B,c,c]
      const hPooled = tf.relu(tf.matMul(aPooled, (() => {
        const [b, c, h] = xPooled.shape;
        return tf.matMul(xPooled.reshape([b * c, h]), wPooled).reshape([b, c, h]);
      })()));
      const pooledPart = tf.sum(tf.mul(tf.mean(hPooled, 1), pooledHead), 1);
      const scores = tf.sum(tf.mul(z, w2), 2) as tf.Tensor2D; // node scores at full n
      const nodePart = tf.sum(tf.mul(scores, readout), 1);
      return tf.add(tf.add(nodePart, pooledPart), bias) as tf.Tensor1D;
    },
    readoutWeights: () => Array.from(readout.dataSync()),
    dispose: () => vars.forEach((v) => v.dispose()),
  };
}

function buildSagpool({ nR, hidden, rng }: Common): GraphModel {
  const keep = Math.max(2, Math.ceil(nR * 0.5)); // pooling ratio 0.5
  const w1 = glorot(rng, nR, hidden);
  const wAtt = vecVar(rng, hidden);
  const pooledHead = vecVar(rng, hidden);
  const w2 = vecVar(rng, hidden);
  const readout = vecVar(rng, nR);
  const bias = tf.variable(tf.scalar(0));
  const vars = [w1, wAtt, pooledHead, w2, readout, bias];
  return {
    arch: "sagpool",
    vars,
    forward(x) {
      const h = tf.relu(tf.matMul(x, mm3(x, w1))); // [B,n,h]
      // self-attention scores from a graph convolution over the features
      const att = tf.sum(tf.mul(tf.matMul(x, h), wAtt), 2) as tf.Tensor2D; // [B,n]
      const gate = tf.tanh(att);
      const gated = tf.mul(h, gate.expandDims(2)) as tf.Tensor3D;
      const indices = detachIndices(tf.topk(att, keep).indices);
      const kept = tf.gather(gated, indices, 1, 1); // [B,keep,h]
      const pooledPart = tf.sum(tf.mul(tf.mean(kept, 1), pooledHead), 1);
      const scores = tf.sum(tf.mul(gated, w2), 2) as tf.Tensor2D; // node scores at full n
      const nodePart = tf.sum(tf.mul(scores, readout), 1);
      return tf.add(tf.add(nodePart, pooledPart), bias) as tf.Tensor1D;
    },
    readoutWeights: () => Array.from(readout.dataSync()),
    dispose: () => vars.forEach((v) => v.dispose()),
  };
}

function buildGUnets({ nR, hidden, rng }: Common): GraphModel {
  const keep = Math.max(2, Math.ceil(nR * 0.5));
  const w1 = glorot(rng, nR, hidden);
  const wPool = vecVar(rng, hidden);
  const w2 = glorot(rng, hidden, hidden);
  const w3 = glorot(rng, hidden, hidden);
  const wScore = vecVar(rng, hidden);
  const readout = vecVar(rng, nR);
  const bias = tf.variable(tf.scalar(0));
  const vars = [w1, wPool, w2, w3, wScore, readout, bias];
  return {
    arch: "gunets",
    vars,
    forward(x) {
      const h1 = tf.relu(tf.matMul(x, mm3(x, w1))); // encoder conv [B,n,h]
      const poolScores = tf.sum(tf.mul(h1, wPool), 2) as tf.Tensor2D; // [B,n]
      const gate = tf.sigmoid(poolScores);
      const gatedH = tf.mul(h1, gate.expandDims(2)) as tf.Tensor3D;
      const indices = detachIndices(tf.topk(poolScores, keep).indices); // [B,keep]
      const hPooled = tf.gather(gatedH, indices, 1, 1); // [B,keep,h]
      const aRows = tf.gather(x, indices, 1, 1); // [B,keep,n]
      const aPooled = tf.gather(aRows, indices, 2, 1); // [B,keep,keep]
      const hBottleneck = tf.relu(tf.matMul(aPooled, (() => {
        const [b, k, h] = hPooled.shape;
        return tf.matMul(hPooled.reshape([b * k, h]), w2).reshape([b, k, h]);
      })()));
      // unpool: scatter pooled nodes back to their original slots
      const scatter = tf.oneHot(indices, nR) as tf.Tensor3D; // [B,keep,n]
      const hUnpooled = tf.matMul(tf.transpose(scatter, [0, 2, 1]), hBottleneck); // [B,n,h]
      const skip = tf.add(hUnpooled, h1) as tf.Tensor3D;
      const [b, n, h] = skip.shape;
      const decoded = tf.relu(
        tf.matMul(x, tf.matMul(skip.reshape([b * n, h]), w3).reshape([b, n, h])),
      );
      const scores = tf.sum(tf.mul(decoded, wScore), 2) as tf.Tensor2D;
      return nodeReadout(scores, readout, bias);
    },
    readoutWeights: () => Array.from(readout.dataSync()),
    dispose: () => vars.forEach((v) => v.dispose()),
  };
}

const BUILDERS: Record<ArchName, (c: Common) => GraphModel> = {
  diffpool: buildDiffpool,
  gat: buildGat,
  gcn: buildGcn,
  sagpool: buildSagpool,
  gunets: buildGUnets,
};

export function buildModel(arch: string, nR: number, hidden: number, rng: Rng): GraphModel {
  const builder = BUILDERS[arch as ArchName];
  if (!builder) {
    throw new UnsupportedArchitectureError(
      `architecture ${arch} has no node-scoring layer mapping; supported: ${ARCHITECTURES.join(", ")}`,
    );
  }
  return builder({ nR, hidden, rng });
}
