/**
 * Figure rendering: a PlotSpec names a results CSV, the axes, and an
 * output path; render() parses, aggregates, and writes the image. All
 * validation and aggregation happen before anything touches the output
 * path, so a failed render never leaves a file behind.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { extname } from "node:path";

import { aggregate, X_AXES, Y_AXES } from "./aggregate.js";
import type { Series, XAxis, YAxis } from "./aggregate.js";
import { parseResultsCsv } from "./schema.js";
import { renderSvg } from "./svg.js";

export interface PlotSpec {
  /** results CSV produced by the benchmark harness */
  input: string;
  x: XAxis;
  y: YAxis;
  /** only learner grouping is supported; present for forward clarity */
  groupBy?: "learner";
  output: string;
  width?: number;
  height?: number;
  title?: string;
}

export const AXIS_LABELS: Record<XAxis | YAxis, string> = {
  train_size: "training set size (rows)",
  ci_fraction: "share of effects with hidden parents (fraction)",
  mb_f1: "Markov blanket F1 (score)",
  loglik: "held-out log likelihood (nats)",
};

export interface RenderResult {
  series: Series[];
  output: string;
  format: "svg" | "png";
}

export function validateSpec(spec: PlotSpec): "svg" | "png" {
  if (!X_AXES.includes(spec.x)) {
    throw new Error(
      `unknown x axis ${JSON.stringify(spec.x)}; expected one of ${X_AXES.join(", ")}`,
    );
  }
  if (!Y_AXES.includes(spec.y)) {
    throw new Error(
      `unknown y axis ${JSON.stringify(spec.y)}; expected one of ${Y_AXES.join(", ")}`,
    );
  }
  if (spec.groupBy !== undefined && spec.groupBy !== "learner") {
    throw new Error(`unsupported group-by ${JSON.stringify(spec.groupBy)}`);
  }
  const ext = extname(spec.output).toLowerCase();
  if (ext !== ".svg" && ext !== ".png") {
    throw new Error(
      `output must end in .svg or .png, got ${JSON.stringify(spec.output)}`,
    );
  }
  return ext === ".svg" ? "svg" : "png";
}

export async function render(spec: PlotSpec): Promise<RenderResult> {
  const format = validateSpec(spec);
  const text = readFileSync(spec.input, "utf8");
  const rows = parseResultsCsv(text);
  const series = aggregate(rows, spec.x, spec.y);
  const svg = renderSvg(series, AXIS_LABELS[spec.x], AXIS_LABELS[spec.y], {
    width: spec.width,
    height: spec.height,
    title: spec.title,
  });
  if (format === "svg") {
    writeFileSync(spec.output, svg + "\n");
  } else {
    const sharp = (await import("sharp")).default;
    await sharp(Buffer.from(svg), { density: 144 })
      .png()
      .toFile(spec.output);
  }
  return { series, output: spec.output, format };
}
