export { parseCsv, numericColumn, stringColumn, columnIndex, CsvError } from './csv.js';
export {
  extractConvergenceSeries,
  legendLabel,
  renderConvergence,
} from './convergence.js';
export { extractDriftLines, renderDrift } from './drift.js';
export { loadSpec, validateSpec, SpecError } from './figure.js';
export type { FigureSpec, SeriesInput } from './figure.js';
export { renderFromSpec } from './cli.js';
