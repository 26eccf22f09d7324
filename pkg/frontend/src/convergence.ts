/** Log-log error against resolution with the study's measured order in the
 * legend.  The legend slope is the mean of the finite entries of the CSV's
 * eoc column, printed to two decimals, so the figure states exactly what
 * the data file states. */

import { numericColumn, parseCsv, requireRows, Table } from './csv.js';
import {
  document,
  HEIGHT,
  logScale,
  MARGIN,
  polyline,
  round,
  SERIES_COLORS,
  tag,
  text,
  WIDTH,
} from './svg.js';

export interface ConvergenceSeries {
  label: string;
  n: number[];
  error: number[];
  /** mean of the finite pairwise slopes from the CSV */
  slope: number;
}

export function extractConvergenceSeries(label: string, csvText: string): ConvergenceSeries {
  const table: Table = parseCsv(csvText);
  requireRows(table, 'a convergence figure');
  const n = numericColumn(table, 'n');
  const error = numericColumn(table, 'error');
  const eoc = numericColumn(table, 'eoc').filter((value) => Number.isFinite(value));
  const keep = n.map((_, i) => Number.isFinite(n[i]) && Number.isFinite(error[i]) && error[i] > 0);
  return {
    label,
    n: n.filter((_, i) => keep[i]),
    error: error.filter((_, i) => keep[i]),
    slope: eoc.length > 0 ? eoc.reduce((a, b) => a + b, 0) / eoc.length : NaN,
  };
}

export function legendLabel(series: ConvergenceSeries): string {
  const slope = Number.isFinite(series.slope) ? series.slope.toFixed(2) : 'n/a';
  return `${series.label} (EOC ${slope})`;
}

export function renderConvergence(
  seriesList: ConvergenceSeries[],
  title = 'Convergence study',
): string {
  const allN = seriesList.flatMap((s) => s.n);
  const allErr = seriesList.flatMap((s) => s.error);
  if (allN.length === 0) {
    throw new Error('no plottable rows across the input series');
  }
  const x = logScale(Math.min(...allN), Math.max(...allN), MARGIN.left, WIDTH - MARGIN.right);
  const y = logScale(
    Math.min(...allErr),
    Math.max(...allErr),
    HEIGHT - MARGIN.bottom,
    MARGIN.top,
  );
  const body: string[] = [];
  body.push(...axes(x, y, 'resolution n', 'discrete L2 error'));
  seriesList.forEach((series, index) => {
    const color = SERIES_COLORS[index % SERIES_COLORS.length];
    const points = series.n.map(
      (value, i) => [x(value), y(series.error[i])] as [number, number],
    );
    body.push(polyline(points, color));
    for (const [px, py] of points) {
      body.push(tag('circle', { cx: round(px), cy: round(py), r: 3, fill: color }));
    }
    body.push(
      text(WIDTH - MARGIN.right - 8, MARGIN.top + 16 * (index + 1), legendLabel(series), {
        'text-anchor': 'end',
        fill: color,
        class: 'legend',
      }),
    );
  });
  body.push(text(WIDTH / 2, 20, title, { 'text-anchor': 'middle', 'font-size': 14 }));
  return document(body);
}

function axes(
  x: ReturnType<typeof logScale>,
  y: ReturnType<typeof logScale>,
  xLabel: string,
  yLabel: string,
): string[] {
  const body: string[] = [];
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom;
  const y1 = MARGIN.top;
  body.push(polyline([[x0, y0], [x1, y0]], '#333333'));
  body.push(polyline([[x0, y0], [x0, y1]], '#333333'));
  for (const tick of x.ticks) {
    const px = x(tick);
    body.push(polyline([[px, y0], [px, y0 + 5]], '#333333'));
    body.push(text(px, y0 + 20, x.label(tick), { 'text-anchor': 'middle' }));
  }
  for (const tick of y.ticks) {
    const py = y(tick);
    body.push(polyline([[x0 - 5, py], [x0, py]], '#333333'));
    body.push(text(x0 - 8, py + 4, y.label(tick), { 'text-anchor': 'end' }));
  }
  body.push(text((x0 + x1) / 2, HEIGHT - 12, xLabel, { 'text-anchor': 'middle' }));
  body.push(
    text(18, (y0 + y1) / 2, yLabel, {
      'text-anchor': 'middle',
      transform: `rotate(-90 18 ${round((y0 + y1) / 2)})`,
    }),
  );
  return body;
}
