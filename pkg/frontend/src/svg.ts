/** Deterministic SVG assembly: fixed canvas, fixed fonts, no timestamps. */

export const WIDTH = 640;
export const HEIGHT = 440;
export const MARGIN = { top: 36, right: 24, bottom: 52, left: 72 };

export const SERIES_COLORS = [
  '#1f77b4',
  '#d62728',
  '#2ca02c',
  '#9467bd',
  '#ff7f0e',
  '#8c564b',
  '#17becf',
  '#7f7f7f',
];

export function escapeXml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

export function tag(
  name: string,
  attrs: Record<string, string | number>,
  body = '',
): string {
  const rendered = Object.entries(attrs)
    .map(([key, value]) => `${key}="${value}"`)
    .join(' ');
  return body === ''
    ? `<${name} ${rendered}/>`
    : `<${name} ${rendered}>${body}</${name}>`;
}

export function text(
  x: number,
  y: number,
  content: string,
  attrs: Record<string, string | number> = {},
): string {
  return tag(
    'text',
    { x: round(x), y: round(y), 'font-family': 'sans-serif', 'font-size': 12, ...attrs },
    escapeXml(content),
  );
}

export function polyline(
  points: Array<[number, number]>,
  color: string,
  dashed = false,
): string {
  const attr: Record<string, string | number> = {
    fill: 'none',
    stroke: color,
    'stroke-width': 1.5,
    points: points.map(([x, y]) => `${round(x)},${round(y)}`).join(' '),
  };
  if (dashed) {
    attr['stroke-dasharray'] = '6,3';
  }
  return tag('polyline', attr);
}

export function round(value: number): number {
  return Math.round(value * 100) / 100;
}

export function document(body: string[]): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
    ...body,
    '</svg>',
  ].join('\n');
}

export interface Scale {
  (value: number): number;
  ticks: number[];
  label: (value: number) => string;
}

export function linearScale(lo: number, hi: number, outLo: number, outHi: number): Scale {
  if (hi <= lo) {
    hi = lo + 1;
  }
  const scale = ((value: number) =>
    outLo + ((value - lo) / (hi - lo)) * (outHi - outLo)) as Scale;
  const step = niceStep((hi - lo) / 6);
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + 1e-12 * Math.abs(hi); v += step) {
    ticks.push(v);
  }
  scale.ticks = ticks;
  scale.label = (value: number) => formatTick(value);
  return scale;
}

export function logScale(lo: number, hi: number, outLo: number, outHi: number): Scale {
  const llo = Math.log10(lo);
  const lhi = Math.log10(hi <= lo ? lo * 10 : hi);
  const scale = ((value: number) =>
    outLo + ((Math.log10(value) - llo) / (lhi - llo)) * (outHi - outLo)) as Scale;
  const ticks: number[] = [];
  for (let e = Math.ceil(llo); e <= Math.floor(lhi); e += 1) {
    ticks.push(10 ** e);
  }
  if (ticks.length < 2) {
    ticks.length = 0;
    ticks.push(lo, hi);
  }
  scale.ticks = ticks;
  scale.label = (value: number) => formatTick(value);
  return scale;
}

function niceStep(raw: number): number {
  const power = 10 ** Math.floor(Math.log10(Math.abs(raw) || 1));
  const unit = raw / power;
  const nice = unit >= 5 ? 5 : unit >= 2 ? 2 : 1;
  return nice * power;
}

export function formatTick(value: number): string {
  if (value === 0) {
    return '0';
  }
  const magnitude = Math.abs(value);
  if (magnitude >= 1e4 || magnitude < 1e-3) {
    return value.toExponential(0).replace('+', '');
  }
  return `${Math.round(value * 1e6) / 1e6}`;
}
