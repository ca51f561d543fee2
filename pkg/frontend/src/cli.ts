import { existsSync, mkdirSync, writeFileSync } from "fs";
import { createRequire } from "module";
import { join } from "path";
import { pathToFileURL } from "url";

import { cdfFigure, discoverCdfs } from "./cdf.js";
import { costFigures } from "./bars.js";
import { loadSweep, sweepFigure } from "./sweep.js";

export interface Args {
  data: string;
  out: string;
  only: Set<string> | null;
  png: boolean;
}

export function parseArgs(argv: string[]): Args {
  let data: string | null = null;
  let out: string | null = null;
  let only: Set<string> | null = null;
  let png = false;
  for (let i = 0; i < argv.length; i++) {
    const a = argv[i];
    if (a === "--data") data = argv[++i] ?? null;
    else if (a === "--out") out = argv[++i] ?? null;
    else if (a === "--png") png = true;
    else if (a === "--only") {
      const v = argv[++i];
      if (v) only = new Set(v.split(",").map((s) => s.trim()));
    } else {
      throw new Error(`unknown argument: ${a}`);
    }
  }
  if (!data || !out) {
    throw new Error(
      "usage: render --data <csv dir> --out <figure dir> [--only cdf,cost,sweep] [--png]",
    );
  }
  return { data, out, only, png };
}

/** Optional SVG -> PNG rasterizer; null when @resvg/resvg-js is absent. */
export function tryLoadRasterizer(): ((svg: string) => Buffer) | null {
  try {
    const req = createRequire(import.meta.url);
    const { Resvg } = req("@resvg/resvg-js");
    return (svg: string) =>
      new Resvg(svg, { fitTo: { mode: "width", value: 1280 } })
        .render()
        .asPng();
  } catch {
    return null;
  }
}

function want(args: Args, kind: string): boolean {
  return args.only === null || args.only.has(kind);
}

/** Render every figure the data directory supports; returns written paths. */
export function render(args: Args): string[] {
  mkdirSync(args.out, { recursive: true });
  let raster: ((svg: string) => Buffer) | null = null;
  if (args.png) {
    raster = tryLoadRasterizer();
    if (!raster) {
      throw new Error("--png requires the optional @resvg/resvg-js package");
    }
  }
  const written: string[] = [];
  const put = (name: string, svg: string) => {
    const path = join(args.out, name);
    writeFileSync(path, svg);
    written.push(path);
    if (raster) {
      const pngPath = path.replace(/\.svg$/, ".png");
      writeFileSync(pngPath, raster(svg));
      written.push(pngPath);
    }
  };
  if (want(args, "cdf")) {
    for (const uc of ["off", "on"]) {
      const series = discoverCdfs(args.data, uc);
      if (series.length > 0) put(`cdf_${uc}.svg`, cdfFigure(series, uc));
    }
  }
  const costPath = join(args.data, "cost.csv");
  if (want(args, "cost") && existsSync(costPath)) {
    const figs = costFigures(costPath);
    put("cost_fronthaul.svg", figs.fronthaul.svg);
    put("cost_complexity.svg", figs.complexity.svg);
  }
  const sweepPath = join(args.data, "sweep.csv");
  if (want(args, "sweep") && existsSync(sweepPath)) {
    put("sweep.svg", sweepFigure(loadSweep(sweepPath)));
  }
  if (written.length === 0) {
    throw new Error(`no renderable CSV files found in ${args.data}`);
  }
  return written;
}

export function main(argv: string[]): number {
  try {
    const written = render(parseArgs(argv));
    for (const w of written) console.log(`wrote ${w}`);
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 2;
  }
}

if (import.meta.url === pathToFileURL(process.argv[1] ?? "").href) {
  process.exit(main(process.argv.slice(2)));
}
