/** The three figure kinds: learning curves with stderr bands, grouped bars
 * for the ratio metrics, and memory growth with the fixed-library baseline
 * as a dashed reference line.
 *
 * Each builder returns both the SVG text and the plotted series values, so
 * callers (and tests) can verify exactly what went into the figure. */

import { parseCsv, numeric, requireColumns, Table } from "./csv.js";
import {
  PALETTE,
  Svg,
  extent,
  linearScale,
  plotArea,
} from "./figure.js";

export interface CurveSeries {
  label: string;
  blockStart: number[];
  mean: number[];
  stderr: number[];
}

export interface Figure {
  svg: string;
  series: Record<string, unknown>;
}

export function buildCurveFigure(
  inputs: { label: string; text: string }[],
  title = "Average score over the lifetime",
): Figure {
  const series: CurveSeries[] = inputs.map(({ label, text }) => {
    const table = parseCsv(text);
    requireColumns(table, ["block_start", "mean", "stderr"], `curve input ${label}`);
    return {
      label,
      blockStart: numeric(table, "block_start"),
      mean: numeric(table, "mean"),
      stderr: numeric(table, "stderr"),
    };
  });

  const area = plotArea();
  const xs = series.flatMap((s) => s.blockStart);
  const highs = series.flatMap((s) => s.mean.map((m, i) => m + s.stderr[i]));
  const lows = series.flatMap((s) => s.mean.map((m, i) => m - s.stderr[i]));
  const x = linearScale(extent(xs, 0.02), area.x);
  const y = linearScale(extent(lows.concat(highs)), area.y);

  const svg = new Svg(title);
  svg.axes(x, y, "task-block", "score (mean +- stderr)");
  series.forEach((s, i) => {
    const colour = PALETTE[i % PALETTE.length];
    svg.band(
      s.blockStart,
      s.mean.map((m, j) => m - s.stderr[j]),
      s.mean.map((m, j) => m + s.stderr[j]),
      x,
      y,
      colour,
    );
    svg.polyline(s.blockStart, s.mean, x, y, colour);
  });
  svg.legend(series.map((s, i) => ({ label: s.label, colour: PALETTE[i % PALETTE.length] })));
  return { svg: svg.render(), series: { curves: series } };
}

export interface BarGroup {
  label: string;
  mean: number;
  stderr: number;
  n: number;
}

export function buildBarsFigure(
  text: string,
  title = "Forgetting ratio by interfering task-blocks",
): Figure {
  const table = parseCsv(text);
  requireColumns(table, ["bin", "mean", "stderr", "n"], "bars input");
  const groups: BarGroup[] = table.rows
    .filter((r) => Number(r.n) > 0)
    .map((r) => ({
      label: r.bin,
      mean: Number(r.mean),
      stderr: Number(r.stderr),
      n: Number(r.n),
    }));
  if (groups.length === 0) {
    throw new Error("bars input: every bin is empty");
  }

  const area = plotArea();
  const values = groups.flatMap((g) => [g.mean - g.stderr, g.mean + g.stderr, 0]);
  const y = linearScale(extent(values), area.y);
  const x = linearScale([0, groups.length], area.x);

  const svg = new Svg(title);
  svg.axes(x, y, "interfering task-blocks", "ratio");
  const zero = y.apply(0);
  svg.add(
    `<line x1="${area.x[0]}" y1="${zero.toFixed(3)}" x2="${area.x[1]}" ` +
      `y2="${zero.toFixed(3)}" stroke="#888" stroke-width="1"/>`,
  );
  const slot = (area.x[1] - area.x[0]) / groups.length;
  groups.forEach((g, i) => {
    const colour = g.mean < 0 ? PALETTE[1] : PALETTE[0];
    const cx = area.x[0] + slot * (i + 0.5);
    const top = Math.min(y.apply(g.mean), zero);
    const height = Math.abs(y.apply(g.mean) - zero);
    svg.add(
      `<rect x="${(cx - slot * 0.3).toFixed(3)}" y="${top.toFixed(3)}" ` +
        `width="${(slot * 0.6).toFixed(3)}" height="${height.toFixed(3)}" fill="${colour}"/>`,
    );
    const eLo = y.apply(g.mean - g.stderr);
    const eHi = y.apply(g.mean + g.stderr);
    svg.add(
      `<line x1="${cx.toFixed(3)}" y1="${eLo.toFixed(3)}" x2="${cx.toFixed(3)}" ` +
        `y2="${eHi.toFixed(3)}" stroke="#333" stroke-width="1.5"/>`,
    );
    svg.add(
      `<text x="${cx.toFixed(3)}" y="${area.y[0] + 24}" text-anchor="middle" ` +
        `font-size="14">${g.label}</text>`,
    );
  });
  return { svg: svg.render(), series: { groups } };
}

export interface MemorySeries {
  blockIdx: number[];
  total: number[];
  library: number[];
  temporary: number[];
  baseline: number;
}

export function buildMemoryFigure(
  text: string,
  title = "Policies in memory: dynamic generation vs fixed library",
): Figure {
  const table = parseCsv(text);
  requireColumns(
    table,
    ["block_idx", "mean_library", "mean_temporary", "mean_total", "baseline"],
    "memory input",
  );
  const series: MemorySeries = {
    blockIdx: numeric(table, "block_idx"),
    total: numeric(table, "mean_total"),
    library: numeric(table, "mean_library"),
    temporary: numeric(table, "mean_temporary"),
    baseline: Number(table.rows[0].baseline),
  };

  const area = plotArea();
  const x = linearScale(extent(series.blockIdx, 0.02), area.x);
  const y = linearScale(
    extent([0, series.baseline, ...series.total]),
    area.y,
  );

  const svg = new Svg(title);
  svg.axes(x, y, "task-block", "policies in memory");
  svg.polyline(series.blockIdx, series.total, x, y, PALETTE[1]);
  svg.polyline(series.blockIdx, series.library, x, y, PALETTE[0]);
  svg.polyline(series.blockIdx, series.temporary, x, y, PALETTE[2]);
  // fixed-size library reference: constant dashed line
  svg.polyline(
    [series.blockIdx[0], series.blockIdx[series.blockIdx.length - 1]],
    [series.baseline, series.baseline],
    x,
    y,
    PALETTE[7],
    true,
  );
  svg.legend([
    { label: "total (dynamic scheme)", colour: PALETTE[1] },
    { label: "library (dynamic scheme)", colour: PALETTE[0] },
    { label: "temporary (dynamic scheme)", colour: PALETTE[2] },
    { label: "fixed library baseline", colour: PALETTE[7], dashed: true },
  ]);
  return { svg: svg.render(), series: { memory: series } };
}
