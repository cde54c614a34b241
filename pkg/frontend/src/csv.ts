/** Minimal CSV reading for the run/aggregate/memsim outputs. */

export class SchemaError extends Error {}

export interface Table {
  columns: string[];
  rows: Record<string, string>[];
}

function splitLine(line: string): string[] {
  const out: string[] = [];
  let field = "";
  let quoted = false;
  for (let i = 0; i < line.length; i++) {
    const ch = line[i];
    if (quoted) {
      if (ch === '"' && line[i + 1] === '"') {
        field += '"';
        i++;
      } else if (ch === '"') {
        quoted = false;
      } else {
        field += ch;
      }
    } else if (ch === '"') {
      quoted = true;
    } else if (ch === ",") {
      out.push(field);
      field = "";
    } else {
      field += ch;
    }
  }
  out.push(field);
  return out;
}

export function parseCsv(text: string): Table {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new SchemaError("empty CSV");
  }
  const columns = splitLine(lines[0]);
  const rows = lines.slice(1).map((line, i) => {
    const fields = splitLine(line);
    if (fields.length !== columns.length) {
      throw new SchemaError(`row ${i + 1}: ${fields.length} fields, expected ${columns.length}`);
    }
    const row: Record<string, string> = {};
    columns.forEach((c, j) => (row[c] = fields[j]));
    return row;
  });
  return { columns, rows };
}

/** Validate required columns, naming anything missing. */
export function requireColumns(table: Table, needed: string[], what: string): void {
  const missing = needed.filter((c) => !table.columns.includes(c));
  if (missing.length > 0) {
    throw new SchemaError(
      `${what}: missing column(s) ${missing.join(", ")} (found: ${table.columns.join(", ")})`,
    );
  }
  if (table.rows.length === 0) {
    throw new SchemaError(`${what}: no data rows`);
  }
}

export function numeric(table: Table, column: string): number[] {
  return table.rows.map((row, i) => {
    const v = Number(row[column]);
    if (!Number.isFinite(v)) {
      throw new SchemaError(`row ${i + 1}: column ${column} is not numeric (${row[column]})`);
    }
    return v;
  });
}
