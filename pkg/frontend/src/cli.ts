#!/usr/bin/env node
/** sbpwave-plot plot --spec <path>: render one figure per spec file. */

import { readFileSync, writeFileSync } from 'fs';

import { extractConvergenceSeries, renderConvergence } from './convergence.js';
import { CsvError } from './csv.js';
import { extractDriftLines, renderDrift } from './drift.js';
import { FigureSpec, loadSpec, SpecError } from './figure.js';

export function renderFromSpec(spec: FigureSpec): string {
  if (spec.kind === 'convergence') {
    const series = spec.inputs.map((input) =>
      extractConvergenceSeries(input.label, readFileSync(input.csv, 'utf-8')),
    );
    return renderConvergence(series, spec.title ?? 'Convergence study');
  }
  const lines = spec.inputs.flatMap((input) =>
    extractDriftLines(readFileSync(input.csv, 'utf-8'), spec.invariants).map((line) => ({
      ...line,
      label: spec.inputs.length > 1 ? `${input.label} ${line.label}` : line.label,
    })),
  );
  return renderDrift(lines, spec.title ?? 'Invariant drift');
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  if (command !== 'plot') {
    process.stderr.write('usage: sbpwave-plot plot --spec <path>\n');
    return 2;
  }
  const specIdx = rest.indexOf('--spec');
  if (specIdx < 0 || specIdx + 1 >= rest.length) {
    process.stderr.write('usage: sbpwave-plot plot --spec <path>\n');
    return 2;
  }
  try {
    const spec = loadSpec(rest[specIdx + 1]);
    const svg = renderFromSpec(spec);
    writeFileSync(spec.output, svg);
    process.stdout.write(`wrote ${spec.output}\n`);
    return 0;
  } catch (error) {
    const recoverable =
      error instanceof SpecError ||
      error instanceof CsvError ||
      error instanceof SyntaxError ||
      (error as NodeJS.ErrnoException).code !== undefined;
    if (recoverable) {
      process.stderr.write(`error: ${(error as Error).message}\n`);
      return 1;
    }
    throw error;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url.endsWith(process.argv[1].split('/').pop() ?? '');
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
