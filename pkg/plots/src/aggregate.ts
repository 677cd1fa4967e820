/**
 * Grouping of per-run rows into per-learner series of means with
 * standard errors. Aggregation lives here, on the plotting side, so the
 * results CSV can stay per-run granular.
 */

import type { ResultRow } from "./schema.js";

export const X_AXES = ["train_size", "ci_fraction"] as const;
export const Y_AXES = ["mb_f1", "loglik"] as const;

export type XAxis = (typeof X_AXES)[number];
export type YAxis = (typeof Y_AXES)[number];

export interface SeriesPoint {
  x: number;
  mean: number;
  /** standard error of the mean; zero for a single observation */
  se: number;
  count: number;
}

export interface Series {
  learner: string;
  points: SeriesPoint[];
}

export function xValue(row: ResultRow, axis: XAxis): number | null {
  return axis === "train_size" ? row.train_size : row.ci_fraction;
}

export function yValue(row: ResultRow, axis: YAxis): number {
  return axis === "mb_f1" ? row.mb_f1 : row.test_loglik;
}

export function mean(values: number[]): number {
  return values.reduce((a, b) => a + b, 0) / values.length;
}

export function standardError(values: number[]): number {
  if (values.length < 2) {
    return 0;
  }
  const m = mean(values);
  const variance =
    values.reduce((acc, v) => acc + (v - m) * (v - m), 0) /
    (values.length - 1);
  return Math.sqrt(variance / values.length);
}

/**
 * One series per learner, one point per distinct x value, sorted.
 * Rows without a value on the x axis (a hub row has no ci_fraction) are
 * ignored; if nothing remains the input cannot support the plot.
 */
export function aggregate(
  rows: ResultRow[],
  xAxis: XAxis,
  yAxis: YAxis,
): Series[] {
  const groups = new Map<string, Map<number, number[]>>();
  for (const row of rows) {
    const x = xValue(row, xAxis);
    if (x === null) {
      continue;
    }
    let byX = groups.get(row.learner);
    if (byX === undefined) {
      byX = new Map();
      groups.set(row.learner, byX);
    }
    let bucket = byX.get(x);
    if (bucket === undefined) {
      bucket = [];
      byX.set(x, bucket);
    }
    bucket.push(yValue(row, yAxis));
  }
  if (groups.size === 0) {
    throw new Error(`no rows carry a value for x axis ${xAxis}`);
  }
  return [...groups.keys()].sort().map((learner) => {
    const byX = groups.get(learner)!;
    const points = [...byX.keys()]
      .sort((a, b) => a - b)
      .map((x) => {
        const values = byX.get(x)!;
        return {
          x,
          mean: mean(values),
          se: standardError(values),
          count: values.length,
        };
      });
    return { learner, points };
  });
}
