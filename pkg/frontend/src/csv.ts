/** Parsing for the harness CSV schema: a mandatory header row followed by
 * comma-separated values with floats at 17 significant digits. */

export interface Table {
  header: string[];
  rows: string[][];
}

export class CsvError extends Error {}

export function parseCsv(text: string): Table {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new CsvError('empty CSV input: no header row');
  }
  const header = lines[0].split(',');
  const rows = lines.slice(1).map((line) => line.split(','));
  for (const row of rows) {
    if (row.length !== header.length) {
      throw new CsvError(
        `row has ${row.length} fields, header has ${header.length}`,
      );
    }
  }
  return { header, rows };
}

export function columnIndex(table: Table, name: string): number {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new CsvError(`missing column '${name}' (have: ${table.header.join(', ')})`);
  }
  return idx;
}

/** Numeric column; non-finite entries (nan markers, failed rows) become NaN. */
export function numericColumn(table: Table, name: string): number[] {
  const idx = columnIndex(table, name);
  return table.rows.map((row) => Number(row[idx]));
}

export function stringColumn(table: Table, name: string): string[] {
  const idx = columnIndex(table, name);
  return table.rows.map((row) => row[idx]);
}

export function requireRows(table: Table, context: string): void {
  if (table.rows.length === 0) {
    throw new CsvError(`empty CSV input: no data rows for ${context}`);
  }
}
