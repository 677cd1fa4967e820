#!/usr/bin/env node
/**
 * Command line front end: skewsc-plot --input rows.csv --x train_size
 * --y mb_f1 --output figure.svg
 *
 * Exit codes mirror the main toolkit: 0 success, 1 usage error, 2 IO or
 * parse error.
 */

import { parseArgs } from "node:util";

import type { XAxis, YAxis } from "./aggregate.js";
import { render } from "./render.js";
import { SchemaError } from "./schema.js";

const USAGE =
  "usage: skewsc-plot --input <results.csv> --x <train_size|ci_fraction> " +
  "--y <mb_f1|loglik> --output <figure.svg|figure.png> " +
  "[--title <text>] [--width <px>] [--height <px>]";

export async function main(argv: string[]): Promise<number> {
  let values;
  try {
    values = parseArgs({
      args: argv,
      options: {
        input: { type: "string" },
        x: { type: "string" },
        y: { type: "string" },
        output: { type: "string" },
        title: { type: "string" },
        width: { type: "string" },
        height: { type: "string" },
        help: { type: "boolean", short: "h" },
      },
    }).values;
  } catch (error) {
    console.error(`error: ${(error as Error).message}`);
    console.error(USAGE);
    return 1;
  }
  if (values.help) {
    console.log(USAGE);
    return 0;
  }
  for (const flag of ["input", "x", "y", "output"] as const) {
    if (values[flag] === undefined) {
      console.error(`error: --${flag} is required`);
      console.error(USAGE);
      return 1;
    }
  }
  const dimensions: { width?: number; height?: number } = {};
  for (const flag of ["width", "height"] as const) {
    const raw = values[flag];
    if (raw !== undefined) {
      const parsed = Number(raw);
      if (!Number.isInteger(parsed) || parsed < 120) {
        console.error(`error: --${flag} must be an integer of at least 120`);
        return 1;
      }
      dimensions[flag] = parsed;
    }
  }
  try {
    const result = await render({
      input: values.input!,
      x: values.x as XAxis,
      y: values.y as YAxis,
      output: values.output!,
      title: values.title,
      ...dimensions,
    });
    const points = result.series
      .map((s) => `${s.learner}: ${s.points.length} points`)
      .join(", ");
    console.log(`wrote ${result.output} (${result.format}; ${points})`);
    return 0;
  } catch (error) {
    const err = error as NodeJS.ErrnoException;
    if (err instanceof SchemaError || err.code !== undefined) {
      console.error(`error: ${err.message}`);
      return 2;
    }
    console.error(`error: ${err.message}`);
    return 1;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
