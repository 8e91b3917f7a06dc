/**
 * Reader for the simulator's result CSVs.
 *
 * Schema: scenario,sweep,path,throughput_MBps,makespan_s — `path` is the
 * series label. Values arrive as strings; charts coerce the columns they
 * plot and complain precisely when one is absent or non-numeric.
 */

export const EXPECTED_HEADER = [
  'scenario',
  'sweep',
  'path',
  'throughput_MBps',
  'makespan_s',
] as const;

export interface ResultTable {
  header: string[];
  rows: Record<string, string>[];
}

export class CsvError extends Error {}

export class MissingColumnError extends CsvError {
  readonly column: string;

  constructor(column: string, where: string) {
    super(`missing column "${column}" in ${where}`);
    this.column = column;
  }
}

export class EmptyCsvError extends CsvError {
  constructor(where: string) {
    super(`no data rows in ${where}`);
  }
}

/** Parse CSV text (no quoting in this schema — values never contain commas). */
export function parseResultCsv(text: string, where = '<csv>'): ResultTable {
  const lines = text.split('\n').filter((line) => line.trim() !== '');
  if (lines.length === 0) {
    throw new EmptyCsvError(where);
  }
  const header = lines[0]!.split(',').map((h) => h.trim());
  const rows: Record<string, string>[] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i]!.split(',');
    if (parts.length !== header.length) {
      throw new CsvError(
        `${where}: line ${i + 1} has ${parts.length} fields, header has ${header.length}`,
      );
    }
    const row: Record<string, string> = {};
    header.forEach((name, idx) => {
      row[name] = parts[idx]!.trim();
    });
    rows.push(row);
  }
  return { header, rows };
}

/** Assert a column exists before a chart references it. */
export function requireColumn(table: ResultTable, column: string, where: string): void {
  if (!table.header.includes(column)) {
    throw new MissingColumnError(column, where);
  }
}

/** Numeric cell access; a non-number is a data error worth naming. */
export function numericCell(row: Record<string, string>, column: string, where: string): number {
  const raw = row[column];
  const value = Number(raw);
  if (raw === undefined || raw === '' || !Number.isFinite(value)) {
    throw new CsvError(`${where}: column "${column}" has non-numeric value ${JSON.stringify(raw)}`);
  }
  return value;
}
