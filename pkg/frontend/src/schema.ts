/**
 * Parsing and validation of the harness results CSV.
 *
 * The schema is fixed: all eleven documented columns must be present.
 * Unknown extra columns are ignored with a warning; anything malformed
 * fails with the offending (1-based) line number.
 */

import Papa from "papaparse";

export const REQUIRED_COLUMNS = [
  "experiment",
  "env_family",
  "dim",
  "epsilon",
  "iteration",
  "mean_fidelity",
  "std_fidelity",
  "mean_delta",
  "mean_log_delta",
  "n_trials",
  "master_seed",
] as const;

export interface ResultRow {
  experiment: string;
  envFamily: string;
  dim: number;
  epsilon: number;
  iteration: number;
  meanFidelity: number;
  stdFidelity: number;
  meanDelta: number;
  meanLogDelta: number;
  nTrials: number;
  masterSeed: string;
}

export class CsvFormatError extends Error {
  constructor(message: string, readonly line?: number) {
    super(line === undefined ? message : `line ${line}: ${message}`);
    this.name = "CsvFormatError";
  }
}

function toNumber(raw: string | undefined, column: string, line: number): number {
  if (raw === undefined || raw.trim() === "") {
    throw new CsvFormatError(`missing value for ${column}`, line);
  }
  const value = Number(raw);
  if (!Number.isFinite(value)) {
    throw new CsvFormatError(`${column} is not a finite number: ${JSON.stringify(raw)}`, line);
  }
  return value;
}

function toInt(raw: string | undefined, column: string, line: number): number {
  const value = toNumber(raw, column, line);
  if (!Number.isInteger(value) || value < 0) {
    throw new CsvFormatError(`${column} must be a non-negative integer, got ${raw}`, line);
  }
  return value;
}

export function parseResultsCsv(text: string, warn: (message: string) => void): ResultRow[] {
  const parsed = Papa.parse<Record<string, string>>(text, {
    header: true,
    skipEmptyLines: true,
  });
  for (const err of parsed.errors) {
    // papaparse row indices are 0-based data rows; line 1 is the header
    const line = err.row === undefined ? undefined : err.row + 2;
    throw new CsvFormatError(err.message, line);
  }

  const header = parsed.meta.fields ?? [];
  const missing = REQUIRED_COLUMNS.filter((column) => !header.includes(column));
  if (missing.length > 0) {
    throw new CsvFormatError(`missing required columns: ${missing.join(", ")}`, 1);
  }
  const extras = header.filter((column) => !(REQUIRED_COLUMNS as readonly string[]).includes(column));
  if (extras.length > 0) {
    warn(`ignoring unknown columns: ${extras.join(", ")}`);
  }

  if (parsed.data.length === 0) {
    throw new CsvFormatError("no data rows");
  }

  return parsed.data.map((raw, index) => {
    const line = index + 2;
    const epsilon = toNumber(raw.epsilon, "epsilon", line);
    if (epsilon <= 0 || epsilon >= 1) {
      throw new CsvFormatError(`epsilon must be in (0, 1), got ${raw.epsilon}`, line);
    }
    const meanFidelity = toNumber(raw.mean_fidelity, "mean_fidelity", line);
    if (meanFidelity < 0 || meanFidelity > 1) {
      throw new CsvFormatError(`mean_fidelity must be in [0, 1], got ${raw.mean_fidelity}`, line);
    }
    return {
      experiment: raw.experiment ?? "",
      envFamily: raw.env_family ?? "",
      dim: toInt(raw.dim, "dim", line),
      epsilon,
      iteration: toInt(raw.iteration, "iteration", line),
      meanFidelity,
      stdFidelity: toNumber(raw.std_fidelity, "std_fidelity", line),
      meanDelta: toNumber(raw.mean_delta, "mean_delta", line),
      meanLogDelta: toNumber(raw.mean_log_delta, "mean_log_delta", line),
      nTrials: toInt(raw.n_trials, "n_trials", line),
      masterSeed: raw.master_seed ?? "",
    };
  });
}
