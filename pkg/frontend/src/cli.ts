#!/usr/bin/env node
/** plotkit <curve|bars|memory> --in <csv> [--in <csv> ...] --out <svg>
 *
 * Figures are written only when every input parses and matches its schema;
 * failures exit non-zero with a column diagnostic and write nothing. */

import { readFileSync, writeFileSync } from "node:fs";
import { basename } from "node:path";

import { buildBarsFigure, buildCurveFigure, buildMemoryFigure, Figure } from "./charts.js";
import { SchemaError } from "./csv.js";

interface Args {
  kind: string;
  inputs: string[];
  labels: string[];
  out: string;
  title?: string;
}

function parseArgs(argv: string[]): Args {
  const [kind, ...rest] = argv;
  if (!kind || !["curve", "bars", "memory"].includes(kind)) {
    throw new Error("usage: plotkit <curve|bars|memory> --in <csv> [--in <csv> ...] --out <svg>");
  }
  const inputs: string[] = [];
  const labels: string[] = [];
  let out = "";
  let title: string | undefined;
  for (let i = 0; i < rest.length; i++) {
    switch (rest[i]) {
      case "--in":
        inputs.push(rest[++i]);
        break;
      case "--label":
        labels.push(rest[++i]);
        break;
      case "--out":
        out = rest[++i];
        break;
      case "--title":
        title = rest[++i];
        break;
      default:
        throw new Error(`unknown argument ${rest[i]}`);
    }
  }
  if (inputs.length === 0 || !out) {
    throw new Error("need at least one --in and an --out path");
  }
  return { kind, inputs, labels, out, title };
}

export function run(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 2;
  }
  try {
    let figure: Figure;
    if (args.kind === "curve") {
      figure = buildCurveFigure(
        args.inputs.map((path, i) => ({
          label: args.labels[i] ?? basename(path, ".csv"),
          text: readFileSync(path, "utf-8"),
        })),
        args.title,
      );
    } else if (args.kind === "bars") {
      figure = buildBarsFigure(readFileSync(args.inputs[0], "utf-8"), args.title);
    } else {
      figure = buildMemoryFigure(readFileSync(args.inputs[0], "utf-8"), args.title);
    }
    writeFileSync(args.out, figure.svg, "utf-8");
    console.log(args.out);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
    } else {
      console.error(String(err instanceof Error ? err.message : err));
    }
    return 1;
  }
}

if (process.argv[1] && basename(process.argv[1]).startsWith("cli")) {
  process.exit(run(process.argv.slice(2)));
}
