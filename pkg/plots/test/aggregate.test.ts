import { describe, expect, it } from "vitest";

import {
  aggregate,
  mean,
  standardError,
  xValue,
  yValue,
} from "../src/aggregate.js";
import type { ResultRow } from "../src/schema.js";

function row(overrides: Partial<ResultRow>): ResultRow {
  return {
    family: "hub",
    function_kind: "parity",
    fidelity: 1.0,
    ci_fraction: null,
    train_size: 500,
    dataset_index: 0,
    run_index: 0,
    learner: "sc",
    mb_precision: 0,
    mb_recall: 0,
    mb_f1: 0,
    child_mb_recall: 0,
    test_loglik: -100,
    wall_seconds: 1,
    seed: "1",
    ...overrides,
  };
}

describe("mean and standardError", () => {
  it("match hand-computed values", () => {
    expect(mean([0, 1])).toBe(0.5);
    expect(mean([2, 4, 9])).toBe(5);
    // sample sd of [0, 1] is sqrt(1/2); se = sd / sqrt(2) = 0.5
    expect(standardError([0, 1])).toBeCloseTo(0.5, 12);
    // values 1..5: sample variance 2.5, se = sqrt(2.5 / 5)
    expect(standardError([1, 2, 3, 4, 5])).toBeCloseTo(Math.sqrt(0.5), 12);
  });

  it("gives zero error for a single observation", () => {
    expect(standardError([0.7])).toBe(0);
  });
});

describe("axis accessors", () => {
  it("pick the right columns", () => {
    const r = row({ train_size: 2000, ci_fraction: 0.25, mb_f1: 0.9 });
    expect(xValue(r, "train_size")).toBe(2000);
    expect(xValue(r, "ci_fraction")).toBe(0.25);
    expect(yValue(r, "mb_f1")).toBe(0.9);
    expect(yValue(r, "loglik")).toBe(-100);
  });

  it("report a missing x value as null", () => {
    expect(xValue(row({ ci_fraction: null }), "ci_fraction")).toBeNull();
  });
});

describe("aggregate", () => {
  it("groups by learner and x, sorted on both", () => {
    const rows = [
      row({ learner: "skewed-sc", train_size: 1000, mb_f1: 0.8 }),
      row({ learner: "sc", train_size: 1000, mb_f1: 0.1 }),
      row({ learner: "sc", train_size: 500, mb_f1: 0.0 }),
      row({ learner: "skewed-sc", train_size: 500, mb_f1: 0.4 }),
      row({ learner: "skewed-sc", train_size: 500, mb_f1: 0.6 }),
    ];
    const series = aggregate(rows, "train_size", "mb_f1");
    expect(series.map((s) => s.learner)).toEqual(["sc", "skewed-sc"]);
    expect(series[0].points.map((p) => p.x)).toEqual([500, 1000]);
    expect(series[1].points.map((p) => p.x)).toEqual([500, 1000]);
    const skewedAt500 = series[1].points[0];
    expect(skewedAt500.mean).toBeCloseTo(0.5, 12);
    expect(skewedAt500.count).toBe(2);
    expect(skewedAt500.se).toBeCloseTo(0.1, 12);
    expect(series[0].points[0].se).toBe(0);
  });

  it("skips rows without a value on the chosen x axis", () => {
    const rows = [
      row({ family: "qmr", ci_fraction: 0.5, mb_f1: 0.5 }),
      row({ family: "hub", ci_fraction: null, mb_f1: 0.9 }),
    ];
    const series = aggregate(rows, "ci_fraction", "mb_f1");
    expect(series).toHaveLength(1);
    expect(series[0].points).toEqual([
      { x: 0.5, mean: 0.5, se: 0, count: 1 },
    ]);
  });

  it("rejects input where no row carries the x axis", () => {
    expect(() => aggregate([row({})], "ci_fraction", "mb_f1")).toThrowError(
      /no rows carry a value for x axis ci_fraction/,
    );
  });
});
