import { readdirSync } from "fs";
import { join } from "path";

import { column, num, readCsv } from "./csv.js";
import { displayName, schemeColor, schemeRank } from "./schemes.js";
import { linePlot, Series, ticks } from "./svg.js";

export interface CdfSeries {
  scheme: string;
  uc: string;
  points: Array<[number, number]>; // (se, prob), prob nondecreasing to 1
}

/** Load cdf_<scheme>_<uc>.csv and validate it is a CDF. */
export function loadCdf(path: string, scheme: string, uc: string): CdfSeries {
  const table = readCsv(path);
  const se = column(table, "se");
  const prob = column(table, "prob");
  const points: Array<[number, number]> = [];
  for (let i = 0; i < table.rows.length; i++) {
    const x = num(table, i, se);
    const p = num(table, i, prob);
    const prev = points[points.length - 1];
    if (prev && (x < prev[0] || p < prev[1])) {
      throw new Error(`${path}:${i + 2}: CDF not nondecreasing`);
    }
    points.push([x, p]);
  }
  const last = points[points.length - 1];
  if (!last || Math.abs(last[1] - 1.0) > 1e-9) {
    throw new Error(`${path}: CDF does not end at 1.0`);
  }
  return { scheme, uc, points };
}

/** All CDF files for one uc mode in a data directory, canonical order. */
export function discoverCdfs(dataDir: string, uc: string): CdfSeries[] {
  const re = new RegExp(`^cdf_(.+)_${uc}\\.csv$`);
  const found: Array<[string, string]> = [];
  for (const f of readdirSync(dataDir)) {
    const m = re.exec(f);
    if (m) found.push([m[1]!, join(dataDir, f)]);
  }
  found.sort((a, b) => (schemeRank(a[0]) < schemeRank(b[0]) ? -1 : 1));
  return found.map(([scheme, path]) => loadCdf(path, scheme, uc));
}

/** SE CDF figure for one uc mode. */
export function cdfFigure(series: CdfSeries[], uc: string): string {
  if (series.length === 0) throw new Error(`no CDF series for uc=${uc}`);
  let xmax = 0;
  for (const s of series) {
    const end = s.points[s.points.length - 1];
    if (end) xmax = Math.max(xmax, end[0]);
  }
  const tick = ticks(0, xmax);
  const lines: Series[] = series.map((s) => ({
    label: displayName(s.scheme),
    // anchor the curve at probability 0 under its smallest sample
    points: [[s.points[0]![0], 0] as [number, number]].concat(s.points),
    color: schemeColor(s.scheme),
  }));
  const title =
    uc === "on"
      ? "Per-user spectral efficiency CDF (user-centric serving)"
      : "Per-user spectral efficiency CDF (all APs serve all users)";
  return linePlot(
    title,
    { label: "spectral efficiency [bit/s/Hz]", min: 0, max: tick[tick.length - 1]! },
    { label: "CDF", min: 0, max: 1 },
    lines,
  );
}
