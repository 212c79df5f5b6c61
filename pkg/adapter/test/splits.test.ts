import { describe, expect, it } from "vitest";

import { Rng } from "../src/rng.js";
import {
  fewShotSplits,
  innerHoldout,
  kFoldStratified,
  stratificationError,
} from "../src/splits.js";

const balancedLabels = (n: number) => Array.from({ length: n }, (_, i) => i % 2);

describe("kFoldStratified", () => {
  it.each([3, 5, 10])("%d-fold: stratified within one subject, disjoint, covering", (k) => {
    const labels = balancedLabels(40);
    const folds = kFoldStratified(labels, k, new Rng(1));
    expect(folds).toHaveLength(k);
    const seen = new Set<number>();
    for (const { train, test } of folds) {
      expect(stratificationError(train, labels)).toBeLessThanOrEqual(1);
      expect(stratificationError(test, labels)).toBeLessThanOrEqual(1);
      expect(new Set([...train, ...test]).size).toBe(40);
      expect(train.filter((i) => test.includes(i))).toHaveLength(0);
      test.forEach((i) => seen.add(i));
    }
    expect(seen.size).toBe(40); // every subject tested exactly once
  });

  it("handles an unbalanced cohort within one subject", () => {
    const labels = [...Array(25).fill(0), ...Array(15).fill(1)];
    for (const { train, test } of kFoldStratified(labels, 5, new Rng(3))) {
      expect(stratificationError(train, labels)).toBeLessThanOrEqual(1);
      expect(stratificationError(test, labels)).toBeLessThanOrEqual(1);
    }
  });

  it("is deterministic per rng seed", () => {
    const labels = balancedLabels(20);
    expect(kFoldStratified(labels, 3, new Rng(4))).toEqual(kFoldStratified(labels, 3, new Rng(4)));
  });

  it("rejects impossible fold counts", () => {
    expect(() => kFoldStratified([0, 1, 0, 1], 3, new Rng(0))).toThrow(/stratified/);
  });
});

describe("fewShotSplits", () => {
  it("takes exactly perClass training samples per class", () => {
    const labels = balancedLabels(30);
    const splits = fewShotSplits(labels, 2, 10, new Rng(2));
    expect(splits).toHaveLength(10);
    for (const { train, test } of splits) {
      expect(train).toHaveLength(4);
      expect(train.filter((i) => labels[i] === 0)).toHaveLength(2);
      expect(train.filter((i) => labels[i] === 1)).toHaveLength(2);
      expect(test).toHaveLength(26);
      expect(train.filter((i) => test.includes(i))).toHaveLength(0);
    }
  });

  it("randomizes the selection across runs", () => {
    const labels = balancedLabels(30);
    const splits = fewShotSplits(labels, 2, 10, new Rng(5));
    const unique = new Set(splits.map((s) => s.train.join(",")));
    expect(unique.size).toBeGreaterThan(1);
  });
});

describe("innerHoldout", () => {
  it("keeps both classes on both sides", () => {
    const labels = balancedLabels(24);
    const train = Array.from({ length: 18 }, (_, i) => i);
    const { inner, holdout } = innerHoldout(train, labels, new Rng(6));
    expect(inner.length + holdout.length).toBe(18);
    expect(inner.filter((i) => holdout.includes(i))).toHaveLength(0);
    for (const side of [inner, holdout]) {
      expect(side.some((i) => labels[i] === 0)).toBe(true);
      expect(side.some((i) => labels[i] === 1)).toBe(true);
    }
    expect(stratificationError(holdout, labels)).toBeLessThanOrEqual(1);
  });
});
