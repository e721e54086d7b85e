/**
 * Diagnostics CSV reader.
 *
 * The files have a fixed header row; empty cells mean "not computed" and
 * parse to null, never to zero.
 */

import { readFileSync } from "node:fs";

export interface DiagnosticsTable {
  header: string[];
  /** column name -> values (null for empty cells) */
  columns: Map<string, (number | null)[]>;
  rows: number;
}

export function parseDiagnosticsCsv(text: string): DiagnosticsTable {
  const lines = text.split("\n").filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new Error("empty CSV: no header row");
  }
  const header = lines[0].split(",");
  const columns = new Map<string, (number | null)[]>(header.map((name) => [name, []]));
  for (const line of lines.slice(1)) {
    const cells = line.split(",");
    header.forEach((name, i) => {
      const cell = cells[i] ?? "";
      columns.get(name)!.push(cell === "" ? null : Number(cell));
    });
  }
  return { header, columns, rows: lines.length - 1 };
}

export function readDiagnosticsCsv(path: string): DiagnosticsTable {
  return parseDiagnosticsCsv(readFileSync(path, "ascii"));
}

/** Column lookup that names the missing column and file in its error. */
export function requireColumn(
  table: DiagnosticsTable,
  name: string,
  source: string,
): (number | null)[] {
  const column = table.columns.get(name);
  if (column === undefined) {
    throw new Error(
      `column "${name}" not found in ${source} (header: ${table.header.join(", ")})`,
    );
  }
  return column;
}
