import { readFileSync } from "fs";

export interface CsvTable {
  file: string;
  header: string[];
  rows: string[][];
}

/** Parse simple comma-separated text (no quoting; stripesim never quotes).
 *  Errors name the offending file and 1-based line. */
export function parseCsv(text: string, file: string): CsvTable {
  const lines = text.split("\n").filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new Error(`${file}:1: empty file`);
  }
  const header = lines[0]!.split(",");
  const rows: string[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i]!.split(",");
    if (cells.length !== header.length) {
      throw new Error(
        `${file}:${i + 1}: expected ${header.length} fields, got ${cells.length}`,
      );
    }
    rows.push(cells);
  }
  return { file, header, rows };
}

export function readCsv(path: string): CsvTable {
  return parseCsv(readFileSync(path, "utf8"), path);
}

/** Column index by name, or an error naming the file. */
export function column(table: CsvTable, name: string): number {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new Error(
      `${table.file}:1: missing column '${name}' (have: ${table.header.join(", ")})`,
    );
  }
  return idx;
}

/** Strict numeric cell access; rejects NaN/empty with file:line context. */
export function num(table: CsvTable, row: number, col: number): number {
  const cell = table.rows[row]?.[col];
  const v = Number(cell);
  if (cell === undefined || cell === "" || Number.isNaN(v)) {
    throw new Error(
      `${table.file}:${row + 2}: not a number in column ${table.header[col]}: '${cell}'`,
    );
  }
  return v;
}
