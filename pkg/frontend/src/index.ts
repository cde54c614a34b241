export { buildBarsFigure, buildCurveFigure, buildMemoryFigure } from "./charts.js";
export type { BarGroup, CurveSeries, Figure, MemorySeries } from "./charts.js";
export { parseCsv, SchemaError } from "./csv.js";
export { WIDTH, HEIGHT, PALETTE } from "./figure.js";
export { run } from "./cli.js";
