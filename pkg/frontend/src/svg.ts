/** Small deterministic SVG figure builder.
 *
 * Pure string assembly: no dates, no randomness, fixed number formatting,
 * so the same inputs always produce byte-identical output.
 */

export const WIDTH = 640;
export const HEIGHT = 420;
export const MARGIN = { left: 64, right: 16, top: 30, bottom: 48 };

export const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
  "#7f7f7f",
];

export function fmt(x: number): string {
  if (!Number.isFinite(x)) throw new Error(`non-finite coordinate: ${x}`);
  const s = x.toFixed(2);
  return s === "-0.00" ? "0.00" : s;
}

/** Tick label: compact fixed-point for moderate values, 1eK for extremes. */
export function tickLabel(x: number): string {
  if (x === 0) return "0";
  const a = Math.abs(x);
  if (a >= 1e4 || a < 1e-2) {
    const e = Math.floor(Math.log10(a) + 1e-12);
    const m = x / 10 ** e;
    const ms = Math.abs(m - 1) < 1e-9 ? "1" : m.toPrecision(3);
    return `${ms}e${e}`;
  }
  const s = x.toPrecision(4);
  return s.includes(".") ? s.replace(/\.?0+$/, "") : s;
}

export function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Round-valued axis ticks covering [lo, hi] with steps of 1/2/5 x 10^k. */
export function ticks(lo: number, hi: number, count = 6): number[] {
  if (!(hi > lo)) return [lo];
  const raw = (hi - lo) / Math.max(count - 1, 1);
  const mag = 10 ** Math.floor(Math.log10(raw));
  let step = 10 * mag;
  for (const m of [1, 2, 5]) {
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  }
  const out: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) {
    out.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return out;
}

export interface Axis {
  label: string;
  min: number;
  max: number;
  log?: boolean;
}

export function scaleX(ax: Axis, v: number): number {
  const t = ax.log
    ? (Math.log10(v) - Math.log10(ax.min)) / (Math.log10(ax.max) - Math.log10(ax.min))
    : (v - ax.min) / (ax.max - ax.min);
  return MARGIN.left + t * (WIDTH - MARGIN.left - MARGIN.right);
}

export function scaleY(ax: Axis, v: number): number {
  const t = ax.log
    ? (Math.log10(v) - Math.log10(ax.min)) / (Math.log10(ax.max) - Math.log10(ax.min))
    : (v - ax.min) / (ax.max - ax.min);
  return HEIGHT - MARGIN.bottom - t * (HEIGHT - MARGIN.top - MARGIN.bottom);
}

function axisTicks(ax: Axis): number[] {
  if (!ax.log) return ticks(ax.min, ax.max);
  const out: number[] = [];
  for (
    let e = Math.ceil(Math.log10(ax.min) - 1e-9);
    e <= Math.floor(Math.log10(ax.max) + 1e-9);
    e++
  ) {
    out.push(10 ** e);
  }
  return out;
}

function frame(x: Axis, y: Axis, title: string): string[] {
  const parts: string[] = [];
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom;
  const y1 = MARGIN.top;
  parts.push(
    `<rect x="${x0}" y="${y1}" width="${x1 - x0}" height="${y0 - y1}" fill="none" stroke="#333" stroke-width="1"/>`,
  );
  for (const v of axisTicks(x)) {
    if (v < x.min - 1e-12 || v > x.max + 1e-12) continue;
    const px = fmt(scaleX(x, v));
    parts.push(
      `<line x1="${px}" y1="${y0}" x2="${px}" y2="${y0 + 5}" stroke="#333"/>`,
      `<text x="${px}" y="${y0 + 18}" text-anchor="middle" font-size="11">${tickLabel(v)}</text>`,
    );
  }
  for (const v of axisTicks(y)) {
    if (v < y.min - 1e-12 || v > y.max + 1e-12) continue;
    const py = fmt(scaleY(y, v));
    parts.push(
      `<line x1="${x0 - 5}" y1="${py}" x2="${x0}" y2="${py}" stroke="#333"/>`,
      `<text x="${x0 - 8}" y="${py}" text-anchor="end" dominant-baseline="middle" font-size="11">${tickLabel(v)}</text>`,
      `<line x1="${x0}" y1="${py}" x2="${x1}" y2="${py}" stroke="#ddd" stroke-width="0.5"/>`,
    );
  }
  parts.push(
    `<text x="${(x0 + x1) / 2}" y="${HEIGHT - 10}" text-anchor="middle" font-size="12">${escapeXml(x.label)}</text>`,
    `<text x="16" y="${(y0 + y1) / 2}" text-anchor="middle" font-size="12" transform="rotate(-90 16 ${(y0 + y1) / 2})">${escapeXml(y.label)}</text>`,
    `<text x="${(x0 + x1) / 2}" y="18" text-anchor="middle" font-size="13">${escapeXml(title)}</text>`,
  );
  return parts;
}

export interface Series {
  label: string;
  points: Array<[number, number]>;
  color: string;
  dash?: string;
}

export function document(body: string[]): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif">`,
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
    ...body,
    `</svg>`,
    ``,
  ].join("\n");
}

export function linePlot(
  title: string,
  x: Axis,
  y: Axis,
  series: Series[],
): string {
  const parts = frame(x, y, title);
  for (const s of series) {
    const pts = s.points
      .map(([px, py]) => `${fmt(scaleX(x, px))},${fmt(scaleY(y, py))}`)
      .join(" ");
    const dash = s.dash ? ` stroke-dasharray="${s.dash}"` : "";
    parts.push(
      `<polyline points="${pts}" fill="none" stroke="${s.color}" stroke-width="1.5"${dash}><title>${escapeXml(s.label)}</title></polyline>`,
    );
  }
  series.forEach((s, i) => {
    const ly = MARGIN.top + 14 + 16 * i;
    const lx = MARGIN.left + 10;
    const dash = s.dash ? ` stroke-dasharray="${s.dash}"` : "";
    parts.push(
      `<line x1="${lx}" y1="${ly - 4}" x2="${lx + 22}" y2="${ly - 4}" stroke="${s.color}" stroke-width="1.5"${dash}/>`,
      `<text x="${lx + 28}" y="${ly}" font-size="11">${escapeXml(s.label)}</text>`,
    );
  });
  return document(parts);
}

export interface Bar {
  group: string;
  series: string;
  value: number;
  x: number;
  y: number;
  w: number;
  h: number;
  color: string;
}

export interface BarChart {
  svg: string;
  bars: Bar[];
}

/** Grouped bar chart; returns the pixel geometry next to the markup so
 *  tests can check the value -> height mapping without re-parsing SVG. */
export function barChart(
  title: string,
  groups: string[],
  seriesNames: string[],
  values: number[][], // [group][series]
  y: Axis,
): BarChart {
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom;
  const slot = (x1 - x0) / groups.length;
  const barW = (slot * 0.7) / seriesNames.length;
  const bars: Bar[] = [];
  const parts = frame(
    { label: "", min: 0, max: 1 },
    y,
    title,
  ).filter((p) => !p.includes(`y="${y0 + 18}"`)); // drop numeric x tick labels
  groups.forEach((g, gi) => {
    const cx = x0 + slot * (gi + 0.5);
    parts.push(
      `<text x="${fmt(cx)}" y="${y0 + 18}" text-anchor="middle" font-size="11">${escapeXml(g)}</text>`,
    );
    seriesNames.forEach((s, si) => {
      const v = values[gi]![si]!;
      const top = scaleY(y, v);
      const bx = cx - (barW * seriesNames.length) / 2 + si * barW;
      const color = PALETTE[si % PALETTE.length]!;
      bars.push({
        group: g,
        series: s,
        value: v,
        x: bx,
        y: top,
        w: barW,
        h: y0 - top,
        color,
      });
      parts.push(
        `<rect x="${fmt(bx)}" y="${fmt(top)}" width="${fmt(barW)}" height="${fmt(y0 - top)}" fill="${color}"><title>${escapeXml(`${g} ${s}: ${v}`)}</title></rect>`,
      );
    });
  });
  seriesNames.forEach((s, i) => {
    const ly = MARGIN.top + 14 + 16 * i;
    const lx = x0 + 10;
    parts.push(
      `<rect x="${lx}" y="${ly - 10}" width="12" height="12" fill="${PALETTE[i % PALETTE.length]}"/>`,
      `<text x="${lx + 18}" y="${ly}" font-size="11">${escapeXml(s)}</text>`,
    );
  });
  return { svg: document(parts), bars };
}
