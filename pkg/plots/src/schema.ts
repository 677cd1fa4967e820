/**
 * Results CSV schema shared with the benchmark harness.
 *
 * The harness writes one row per learner run; this module is the only
 * place the plotting side states what it expects of that file.
 */

import Papa from "papaparse";

export const RESULT_COLUMNS = [
  "family",
  "function_kind",
  "fidelity",
  "ci_fraction",
  "train_size",
  "dataset_index",
  "run_index",
  "learner",
  "mb_precision",
  "mb_recall",
  "mb_f1",
  "child_mb_recall",
  "test_loglik",
  "wall_seconds",
  "seed",
] as const;

export type ResultColumn = (typeof RESULT_COLUMNS)[number];

export interface ResultRow {
  family: string;
  function_kind: string;
  fidelity: number | null;
  ci_fraction: number | null;
  train_size: number;
  dataset_index: number;
  run_index: number;
  learner: string;
  mb_precision: number;
  mb_recall: number;
  mb_f1: number;
  child_mb_recall: number;
  test_loglik: number;
  wall_seconds: number;
  /** kept textual: row seeds are 64-bit and overflow doubles */
  seed: string;
}

export class SchemaError extends Error {
  constructor(message: string) {
    super(`${message}; expected columns: ${RESULT_COLUMNS.join(", ")}`);
    this.name = "SchemaError";
  }
}

function requireNumber(
  raw: string | undefined,
  column: string,
  line: number,
): number {
  const value = Number(raw);
  if (raw === undefined || raw === "" || !Number.isFinite(value)) {
    throw new SchemaError(
      `line ${line}: column ${column} has non-numeric value ${JSON.stringify(raw)}`,
    );
  }
  return value;
}

function optionalNumber(
  raw: string | undefined,
  column: string,
  line: number,
): number | null {
  if (raw === undefined || raw === "") {
    return null;
  }
  return requireNumber(raw, column, line);
}

/** Parse a results CSV; malformed or empty input raises SchemaError. */
export function parseResultsCsv(text: string): ResultRow[] {
  const parsed = Papa.parse<Record<string, string>>(text, {
    header: true,
    skipEmptyLines: true,
  });
  const fields = parsed.meta.fields ?? [];
  const missing = RESULT_COLUMNS.filter((c) => !fields.includes(c));
  if (fields.length === 0 || missing.length > 0) {
    throw new SchemaError(
      missing.length > 0 && fields.length > 0
        ? `missing columns: ${missing.join(", ")}`
        : "no header row found",
    );
  }
  if (parsed.data.length === 0) {
    throw new SchemaError("no data rows");
  }
  return parsed.data.map((raw, i) => {
    const line = i + 2; // header is line 1
    return {
      family: raw.family ?? "",
      function_kind: raw.function_kind ?? "",
      fidelity: optionalNumber(raw.fidelity, "fidelity", line),
      ci_fraction: optionalNumber(raw.ci_fraction, "ci_fraction", line),
      train_size: requireNumber(raw.train_size, "train_size", line),
      dataset_index: requireNumber(raw.dataset_index, "dataset_index", line),
      run_index: requireNumber(raw.run_index, "run_index", line),
      learner: raw.learner ?? "",
      mb_precision: requireNumber(raw.mb_precision, "mb_precision", line),
      mb_recall: requireNumber(raw.mb_recall, "mb_recall", line),
      mb_f1: requireNumber(raw.mb_f1, "mb_f1", line),
      child_mb_recall: requireNumber(
        raw.child_mb_recall,
        "child_mb_recall",
        line,
      ),
      test_loglik: requireNumber(raw.test_loglik, "test_loglik", line),
      wall_seconds: requireNumber(raw.wall_seconds, "wall_seconds", line),
      seed: raw.seed ?? "",
    };
  });
}
