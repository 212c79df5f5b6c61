/**
 * Stratified data splits: k-fold cross-validation, few-shot sampling and the
 * inner train/holdout split used for hyperparameter selection. Every split
 * preserves the class ratio to within one subject.
 */

import { Rng } from "./rng.js";

export interface Split {
  train: number[];
  test: number[];
}

function byClass(labels: number[]): [number[], number[]] {
  const zero: number[] = [];
  const one: number[] = [];
  labels.forEach((label, i) => (label === 0 ? zero : one).push(i));
  return [zero, one];
}

export function kFoldStratified(labels: number[], k: number, rng: Rng): Split[] {
  if (k < 2) throw new Error("k-fold needs k >= 2");
  const [zero, one] = byClass(labels).map((idx) => rng.shuffle(idx)) as [number[], number[]];
  if (zero.length < k || one.length < k) {
    throw new Error(`cannot make ${k} stratified folds with class counts ${zero.length}/${one.length}`);
  }
  const folds: number[][] = Array.from({ length: k }, () => []);
  zero.forEach((idx, i) => folds[i % k].push(idx));
  one.forEach((idx, i) => folds[i % k].push(idx));
  return folds.map((test) => {
    const inTest = new Set(test);
    const train = labels.map((_, i) => i).filter((i) => !inTest.has(i));
    return { train, test: [...test].sort((a, b) => a - b) };
  });
}

export function fewShotSplits(labels: number[], perClass: number, runs: number, rng: Rng): Split[] {
  const [zero, one] = byClass(labels);
  if (zero.length <= perClass || one.length <= perClass) {
    throw new Error(`need more than ${perClass} subjects per class for few-shot`);
  }
  const splits: Split[] = [];
  for (let run = 0; run < runs; run++) {
    const train = [...rng.shuffle(zero).slice(0, perClass), ...rng.shuffle(one).slice(0, perClass)];
    const inTrain = new Set(train);
    splits.push({
      train: [...train].sort((a, b) => a - b),
      test: labels.map((_, i) => i).filter((i) => !inTrain.has(i)),
    });
  }
  return splits;
}

/** Stratified inner/holdout partition of a training set (model selection). */
export function innerHoldout(train: number[], labels: number[], rng: Rng): { inner: number[]; holdout: number[] } {
  const [zero, one] = byClass(train.map((i) => labels[i]));
  const inner: number[] = [];
  const holdout: number[] = [];
  for (const cls of [zero, one]) {
    const shuffled = rng.shuffle(cls.map((pos) => train[pos]));
    const nHold = Math.max(1, Math.floor(shuffled.length / 4));
    holdout.push(...shuffled.slice(0, nHold));
    inner.push(...shuffled.slice(nHold));
  }
  return { inner: inner.sort((a, b) => a - b), holdout: holdout.sort((a, b) => a - b) };
}

/** Max class-count deviation from the global ratio, in subjects. */
export function stratificationError(subset: number[], labels: number[]): number {
  const globalOnes = labels.reduce((a, b) => a + b, 0) / labels.length;
  const ones = subset.reduce((acc, i) => acc + labels[i], 0);
  return Math.abs(ones - globalOnes * subset.length);
}
