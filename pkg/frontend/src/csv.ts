import { readFileSync } from 'fs'

/** Schema violation: lists every missing column by name. */
export class SchemaError extends Error {
  readonly missing: string[]
  readonly file: string

  constructor(file: string, missing: string[]) {
    super(`${file}: missing required column(s): ${missing.join(', ')}`)
    this.name = 'SchemaError'
    this.file = file
    this.missing = missing
  }
}

export class EmptyCsvError extends Error {
  constructor(file: string) {
    super(`${file}: no data rows`)
    this.name = 'EmptyCsvError'
  }
}

export interface Table {
  file: string
  columns: string[]
  /** column name -> numeric values, one entry per data row */
  data: Map<string, number[]>
  rowCount: number
}

export function parseCsv(file: string): Table {
  const text = readFileSync(file, 'utf8')
  const lines = text.split(/\r?\n/).filter(line => line.length > 0)
  if (lines.length === 0) throw new EmptyCsvError(file)
  const columns = lines[0].split(',').map(c => c.trim())
  const data = new Map<string, number[]>(columns.map(c => [c, []]))
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(',')
    for (let j = 0; j < columns.length; j++) {
      data.get(columns[j])!.push(Number(cells[j]))
    }
  }
  if (lines.length === 1) throw new EmptyCsvError(file)
  return { file, columns, data, rowCount: lines.length - 1 }
}

/** Throw a SchemaError naming every absent column. */
export function requireColumns(table: Table, required: string[]): void {
  const missing = required.filter(c => !table.columns.includes(c))
  if (missing.length > 0) throw new SchemaError(table.file, missing)
}

export function column(table: Table, name: string): number[] {
  const values = table.data.get(name)
  if (values === undefined) throw new SchemaError(table.file, [name])
  return values
}

/** Distinct values of a column, in first-seen order. */
export function distinct(values: number[]): number[] {
  const seen: number[] = []
  for (const v of values) if (!seen.includes(v)) seen.push(v)
  return seen
}
