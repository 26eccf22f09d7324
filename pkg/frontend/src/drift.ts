/** Invariant drift over time: one line per invariant and sub-series, solid
 * for the relaxation run and dashed for the baseline, signed drift on a
 * linear axis. */

import { CsvError, numericColumn, parseCsv, requireRows, stringColumn } from './csv.js';
import {
  document,
  HEIGHT,
  linearScale,
  MARGIN,
  polyline,
  SERIES_COLORS,
  text,
  WIDTH,
} from './svg.js';

export interface DriftLine {
  label: string;
  dashed: boolean;
  t: number[];
  drift: number[];
}

export function extractDriftLines(csvText: string, invariants?: string[]): DriftLine[] {
  const table = parseCsv(csvText);
  requireRows(table, 'a drift figure');
  const seriesColumn = stringColumn(table, 'series');
  const times = numericColumn(table, 't');
  const names =
    invariants ??
    table.header.filter((h) => h.startsWith('drift_')).map((h) => h.slice('drift_'.length));
  const lines: DriftLine[] = [];
  const groups = [...new Set(seriesColumn)];
  for (const name of names) {
    const drift = numericColumn(table, `drift_${name}`);
    for (const group of groups) {
      const mask = seriesColumn.map((value) => value === group);
      const t = times.filter((_, i) => mask[i]);
      const values = drift.filter((_, i) => mask[i]);
      if (values.every((value) => !Number.isFinite(value))) {
        continue;
      }
      lines.push({
        label: `${name} (${group})`,
        dashed: group !== 'relax_on',
        t,
        drift: values,
      });
    }
  }
  const lengths = new Set(lines.map((line) => line.t.length));
  if (lengths.size > 1) {
    throw new CsvError(
      `mismatched series lengths: ${[...lengths].sort((a, b) => a - b).join(' vs ')}`,
    );
  }
  return lines;
}

export function renderDrift(lines: DriftLine[], title = 'Invariant drift'): string {
  if (lines.length === 0) {
    throw new CsvError('no drift series to draw');
  }
  const allT = lines.flatMap((line) => line.t);
  const allD = lines.flatMap((line) => line.drift).filter((v) => Number.isFinite(v));
  const dLo = Math.min(...allD, 0);
  const dHi = Math.max(...allD, 0);
  const pad = 0.05 * (dHi - dLo || 1);
  const x = linearScale(Math.min(...allT), Math.max(...allT), MARGIN.left, WIDTH - MARGIN.right);
  const y = linearScale(dLo - pad, dHi + pad, HEIGHT - MARGIN.bottom, MARGIN.top);
  const body: string[] = [];
  const y0 = HEIGHT - MARGIN.bottom;
  body.push(polyline([[MARGIN.left, y0], [WIDTH - MARGIN.right, y0]], '#333333'));
  body.push(polyline([[MARGIN.left, y0], [MARGIN.left, MARGIN.top]], '#333333'));
  // zero reference line
  body.push(polyline([[MARGIN.left, y(0)], [WIDTH - MARGIN.right, y(0)]], '#bbbbbb'));
  for (const tick of x.ticks) {
    body.push(polyline([[x(tick), y0], [x(tick), y0 + 5]], '#333333'));
    body.push(text(x(tick), y0 + 20, x.label(tick), { 'text-anchor': 'middle' }));
  }
  for (const tick of y.ticks) {
    body.push(polyline([[MARGIN.left - 5, y(tick)], [MARGIN.left, y(tick)]], '#333333'));
    body.push(text(MARGIN.left - 8, y(tick) + 4, y.label(tick), { 'text-anchor': 'end' }));
  }
  lines.forEach((line, index) => {
    const color = SERIES_COLORS[index % SERIES_COLORS.length];
    const points = line.t.map(
      (value, i) => [x(value), y(line.drift[i])] as [number, number],
    );
    body.push(polyline(points, color, line.dashed));
    body.push(
      text(WIDTH - MARGIN.right - 8, MARGIN.top + 16 * (index + 1), line.label, {
        'text-anchor': 'end',
        fill: color,
        class: 'legend',
      }),
    );
  });
  body.push(text((MARGIN.left + WIDTH - MARGIN.right) / 2, HEIGHT - 12, 'time', {
    'text-anchor': 'middle',
  }));
  body.push(text(WIDTH / 2, 20, title, { 'text-anchor': 'middle', 'font-size': 14 }));
  return document(body);
}
