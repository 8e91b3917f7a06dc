#!/usr/bin/env node
/**
 * plotgen --in <dir> --out <dir>
 *
 * Renders every result CSV in the input directory to an SVG chart in the
 * output directory. Scenario-specific chart styles are committed in
 * chartspec.ts; unknown scenario ids get a default throughput line chart.
 * Exit code 0 when every chart rendered, 1 otherwise.
 */

import * as fs from 'node:fs';
import * as path from 'node:path';

import { CsvError, parseResultCsv } from './csv';
import { specFor } from './chartspec';
import { renderChart } from './svg';

interface Args {
  inDir: string;
  outDir: string;
}

function parseArgs(argv: string[]): Args {
  let inDir: string | undefined;
  let outDir: string | undefined;
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i]!;
    if (arg === '--in') {
      inDir = argv[++i];
    } else if (arg === '--out') {
      outDir = argv[++i];
    } else {
      throw new CsvError(`unknown argument ${arg} (usage: plotgen --in <dir> --out <dir>)`);
    }
  }
  if (inDir === undefined || outDir === undefined) {
    throw new CsvError('usage: plotgen --in <dir> --out <dir>');
  }
  return { inDir, outDir };
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }

  let names: string[];
  try {
    names = fs.readdirSync(args.inDir).filter((n) => n.endsWith('.csv')).sort();
  } catch (err) {
    console.error(`error: cannot read ${args.inDir}: ${(err as Error).message}`);
    return 1;
  }
  if (names.length === 0) {
    console.error(`error: no CSV files in ${args.inDir}`);
    return 1;
  }

  fs.mkdirSync(args.outDir, { recursive: true });
  let failures = 0;
  for (const name of names) {
    const csvPath = path.join(args.inDir, name);
    const scenario = path.basename(name, '.csv');
    try {
      const table = parseResultCsv(fs.readFileSync(csvPath, 'utf8'), csvPath);
      const svg = renderChart(table, specFor(scenario), csvPath);
      const outPath = path.join(args.outDir, `${scenario}.svg`);
      fs.writeFileSync(outPath, svg);
      console.log(outPath);
    } catch (err) {
      console.error(`error: ${(err as Error).message}`);
      failures += 1;
    }
  }
  return failures === 0 ? 0 : 1;
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
