#!/usr/bin/env node
import { SchemaError } from './csv'
import { FIGURES, render } from './figures'

export function main(argv: string[]): number {
  if (argv.length !== 3) {
    console.error('usage: render_figures <figure-id> <csv-dir> <out-dir>')
    console.error(`figure ids: ${Object.keys(FIGURES).join(', ')}`)
    return 1
  }
  const id = Number(argv[0])
  if (!Number.isInteger(id)) {
    console.error(`figure id must be an integer, got ${argv[0]}`)
    return 1
  }
  try {
    const out = render({ id, csvDir: argv[1], outDir: argv[2] })
    console.log(`wrote ${out}`)
    return 0
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`)
      return 2
    }
    console.error(String(err instanceof Error ? err.message : err))
    return 1
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)))
}
