#!/usr/bin/env node
/**
 * plot --input <csv> --output <img> [--panel both|fidelity|delta] [--log-delta]
 *
 * Renders the figure layout from a harness results CSV.  The output
 * format follows the file extension: .svg is written directly (and is
 * byte-stable for identical input data); .png is rasterized from the
 * same SVG.  Malformed input fails with the offending line number.
 */

import * as fs from "node:fs";
import { parseArgs } from "node:util";

import { Panel, renderFigure } from "./render";
import { CsvFormatError, parseResultsCsv } from "./schema";

const USAGE =
  "usage: plot --input <results.csv> --output <figure.svg|figure.png> " +
  "[--panel both|fidelity|delta] [--log-delta]";

export interface Io {
  stdout: (line: string) => void;
  stderr: (line: string) => void;
}

export function runCli(argv: string[], io: Io): number {
  const args = argv[0] === "plot" ? argv.slice(1) : argv;
  let parsed;
  try {
    parsed = parseArgs({
      args,
      options: {
        input: { type: "string" },
        output: { type: "string" },
        panel: { type: "string", default: "both" },
        "log-delta": { type: "boolean", default: false },
      },
      allowPositionals: false,
    });
  } catch (error) {
    io.stderr(`error: ${(error as Error).message}`);
    io.stderr(USAGE);
    return 2;
  }
  const { input, output, panel } = parsed.values;
  const logDelta = parsed.values["log-delta"] ?? false;
  if (!input || !output) {
    io.stderr("error: --input and --output are required");
    io.stderr(USAGE);
    return 2;
  }
  if (panel !== "both" && panel !== "fidelity" && panel !== "delta") {
    io.stderr(`error: unknown panel ${JSON.stringify(panel)}; expected both, fidelity or delta`);
    return 2;
  }
  const lower = output.toLowerCase();
  if (!lower.endsWith(".svg") && !lower.endsWith(".png")) {
    io.stderr("error: --output must end in .svg or .png");
    return 2;
  }

  let text: string;
  try {
    text = fs.readFileSync(input, "utf8");
  } catch (error) {
    io.stderr(`error: cannot read ${input}: ${(error as NodeJS.ErrnoException).message}`);
    return 1;
  }

  let result;
  try {
    const rows = parseResultsCsv(text, (message) => io.stderr(`warning: ${message}`));
    result = renderFigure(rows, { panel: panel as Panel, logDelta });
  } catch (error) {
    if (error instanceof CsvFormatError) {
      io.stderr(`error: ${input}: ${error.message}`);
      return 1;
    }
    throw error;
  }
  for (const warning of result.warnings) {
    io.stderr(`warning: ${warning}`);
  }

  try {
    if (lower.endsWith(".svg")) {
      fs.writeFileSync(output, result.svg);
    } else {
      // lazy import: the SVG path must work even without the native rasterizer
      let Resvg;
      try {
        ({ Resvg } = require("@resvg/resvg-js"));
      } catch {
        io.stderr("error: PNG output needs the optional @resvg/resvg-js rasterizer; write .svg instead");
        return 1;
      }
      fs.writeFileSync(output, new Resvg(result.svg).render().asPng());
    }
  } catch (error) {
    io.stderr(`error: cannot write ${output}: ${(error as Error).message}`);
    return 1;
  }
  io.stdout(`wrote ${output}`);
  return 0;
}

if (require.main === module) {
  process.exit(
    runCli(process.argv.slice(2), {
      stdout: (line) => console.log(line),
      stderr: (line) => console.error(line),
    }),
  );
}
