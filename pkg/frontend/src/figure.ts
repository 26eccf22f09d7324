import { readFileSync } from 'fs';

export type FigureKind = 'convergence' | 'drift';

export interface SeriesInput {
  csv: string;
  label: string;
}

export interface FigureSpec {
  kind: FigureKind;
  inputs: SeriesInput[];
  output: string;
  title?: string;
  /** drift figures: which invariant drift columns to draw */
  invariants?: string[];
}

export class SpecError extends Error {}

export function loadSpec(path: string): FigureSpec {
  const raw = JSON.parse(readFileSync(path, 'utf-8')) as Partial<FigureSpec>;
  return validateSpec(raw);
}

export function validateSpec(raw: Partial<FigureSpec>): FigureSpec {
  if (raw.kind !== 'convergence' && raw.kind !== 'drift') {
    throw new SpecError(`figure kind must be 'convergence' or 'drift', got '${raw.kind}'`);
  }
  if (!Array.isArray(raw.inputs) || raw.inputs.length === 0) {
    throw new SpecError('spec needs at least one input CSV');
  }
  for (const input of raw.inputs) {
    if (typeof input.csv !== 'string' || typeof input.label !== 'string') {
      throw new SpecError('each input needs csv and label fields');
    }
  }
  if (typeof raw.output !== 'string' || raw.output.length === 0) {
    throw new SpecError('spec needs an output path');
  }
  return raw as FigureSpec;
}
