/**
 * Grouping of result rows into per-epsilon line series.
 *
 * Series are keyed by epsilon and sorted: epsilons ascending (so the
 * smallest epsilon always takes the first slot of the fixed style cycle)
 * and points by iteration, which makes rendering independent of the row
 * order in the file.
 */

import { ResultRow } from "./schema";

export interface Series {
  epsilon: number;
  iterations: number[];
  values: number[];
}

export type ValueField = "meanFidelity" | "meanDelta";

export function buildSeries(rows: ResultRow[], field: ValueField): Series[] {
  const groups = new Map<number, ResultRow[]>();
  for (const row of rows) {
    const bucket = groups.get(row.epsilon);
    if (bucket === undefined) {
      groups.set(row.epsilon, [row]);
    } else {
      bucket.push(row);
    }
  }
  const epsilons = [...groups.keys()].sort((a, b) => a - b);
  return epsilons.map((epsilon) => {
    const bucket = groups.get(epsilon)!;
    bucket.sort((a, b) => a.iteration - b.iteration);
    return {
      epsilon,
      iterations: bucket.map((row) => row.iteration),
      values: bucket.map((row) => (field === "meanFidelity" ? row.meanFidelity : row.meanDelta)),
    };
  });
}
