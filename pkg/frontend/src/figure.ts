/** Deterministic SVG scene building: fixed 1200x800 canvas, linear axes,
 * polylines, shaded bands, grouped bars, and dashed reference lines. */

export const WIDTH = 1200;
export const HEIGHT = 800;
export const MARGIN = { top: 60, right: 40, bottom: 70, left: 90 };

// colour-blind-safe palette (Okabe-Ito)
export const PALETTE = [
  "#0072B2",
  "#D55E00",
  "#009E73",
  "#CC79A7",
  "#E69F00",
  "#56B4E9",
  "#F0E442",
  "#000000",
];

const fmt = (v: number): string => {
  const s = v.toFixed(3);
  return s === "-0.000" ? "0.000" : s;
};

export interface Scale {
  domain: [number, number];
  range: [number, number];
  apply(v: number): number;
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  let [d0, d1] = domain;
  if (d0 === d1) {
    d0 -= 1;
    d1 += 1;
  }
  const k = (range[1] - range[0]) / (d1 - d0);
  return {
    domain: [d0, d1],
    range,
    apply: (v: number) => range[0] + (v - d0) * k,
  };
}

export function ticks(domain: [number, number], count = 6): number[] {
  const span = domain[1] - domain[0];
  if (span <= 0) return [domain[0]];
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const err = (span / count) / step;
  const factor = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const nice = step * factor;
  const start = Math.ceil(domain[0] / nice) * nice;
  const out: number[] = [];
  for (let v = start; v <= domain[1] + nice * 1e-9; v += nice) {
    out.push(Math.abs(v) < nice * 1e-9 ? 0 : v);
  }
  return out;
}

export class Svg {
  private parts: string[] = [];

  constructor(title: string) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
        `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica, Arial, sans-serif">`,
      `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
      `<text x="${WIDTH / 2}" y="32" text-anchor="middle" font-size="22">${escapeXml(title)}</text>`,
    );
  }

  add(fragment: string): void {
    this.parts.push(fragment);
  }

  axes(x: Scale, y: Scale, xLabel: string, yLabel: string): void {
    const [x0, x1] = x.range;
    const [y0, y1] = y.range;
    this.add(`<g stroke="#333" stroke-width="1">` +
      `<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}"/>` +
      `<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${y1}"/></g>`);
    for (const t of ticks(x.domain)) {
      const px = fmt(x.apply(t));
      this.add(
        `<line x1="${px}" y1="${y0}" x2="${px}" y2="${y0 + 6}" stroke="#333"/>` +
          `<text x="${px}" y="${y0 + 24}" text-anchor="middle" font-size="14">${tickLabel(t)}</text>`,
      );
    }
    for (const t of ticks(y.domain)) {
      const py = fmt(y.apply(t));
      this.add(
        `<line x1="${x0 - 6}" y1="${py}" x2="${x0}" y2="${py}" stroke="#333"/>` +
          `<text x="${x0 - 10}" y="${py}" text-anchor="end" dominant-baseline="middle" ` +
          `font-size="14">${tickLabel(t)}</text>`,
      );
    }
    this.add(
      `<text x="${(x0 + x1) / 2}" y="${y0 + 52}" text-anchor="middle" font-size="16">` +
        `${escapeXml(xLabel)}</text>`,
    );
    this.add(
      `<text x="${x0 - 64}" y="${(y0 + y1) / 2}" text-anchor="middle" font-size="16" ` +
        `transform="rotate(-90 ${x0 - 64} ${(y0 + y1) / 2})">${escapeXml(yLabel)}</text>`,
    );
  }

  polyline(xs: number[], ys: number[], x: Scale, y: Scale, colour: string, dashed = false): void {
    const points = xs.map((v, i) => `${fmt(x.apply(v))},${fmt(y.apply(ys[i]))}`).join(" ");
    const dash = dashed ? ` stroke-dasharray="8 6"` : "";
    this.add(`<polyline fill="none" stroke="${colour}" stroke-width="2"${dash} points="${points}"/>`);
  }

  band(xs: number[], lo: number[], hi: number[], x: Scale, y: Scale, colour: string): void {
    const upper = xs.map((v, i) => `${fmt(x.apply(v))},${fmt(y.apply(hi[i]))}`);
    const lower = xs
      .map((v, i) => `${fmt(x.apply(v))},${fmt(y.apply(lo[i]))}`)
      .reverse();
    this.add(
      `<polygon fill="${colour}" fill-opacity="0.18" stroke="none" ` +
        `points="${upper.concat(lower).join(" ")}"/>`,
    );
  }

  legend(entries: { label: string; colour: string; dashed?: boolean }[]): void {
    entries.forEach((e, i) => {
      const y = MARGIN.top + 8 + i * 24;
      const x = WIDTH - MARGIN.right - 220;
      const dash = e.dashed ? ` stroke-dasharray="8 6"` : "";
      this.add(
        `<line x1="${x}" y1="${y}" x2="${x + 34}" y2="${y}" stroke="${e.colour}" stroke-width="2"${dash}/>` +
          `<text x="${x + 42}" y="${y + 5}" font-size="14">${escapeXml(e.label)}</text>`,
      );
    });
  }

  render(): string {
    return this.parts.join("\n") + "\n</svg>\n";
  }
}

export function plotArea(): { x: [number, number]; y: [number, number] } {
  return {
    x: [MARGIN.left, WIDTH - MARGIN.right],
    y: [HEIGHT - MARGIN.bottom, MARGIN.top], // y grows upward
  };
}

export function extent(values: number[], padFraction = 0.05): [number, number] {
  let lo = Math.min(...values);
  let hi = Math.max(...values);
  if (lo === hi) {
    lo -= 1;
    hi += 1;
  }
  const pad = (hi - lo) * padFraction;
  return [lo - pad, hi + pad];
}

function tickLabel(v: number): string {
  if (Number.isInteger(v)) return String(v);
  const s = v.toPrecision(3);
  return String(Number(s));
}

export function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
