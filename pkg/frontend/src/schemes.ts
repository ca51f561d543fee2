import { PALETTE } from "./svg.js";

/** Canonical scheme order used across figures (matches the simulator CLI). */
export const SCHEME_ORDER = ["mrc", "lmmse", "nlmmse", "qlmmse"];

const DISPLAY: Record<string, string> = {
  mrc: "MRC",
  lmmse: "LMMSE",
  nlmmse: "N-LMMSE",
  qlmmse: "Q-LMMSE",
};

export function displayName(scheme: string): string {
  return DISPLAY[scheme] ?? scheme;
}

export function schemeColor(scheme: string): string {
  const base = scheme.replace(/_uc$/, "");
  const i = SCHEME_ORDER.indexOf(base);
  return PALETTE[(i >= 0 ? i : SCHEME_ORDER.length) % PALETTE.length]!;
}

/** Stable sort key: canonical schemes first, anything else after, alphabetical. */
export function schemeRank(scheme: string): string {
  const i = SCHEME_ORDER.indexOf(scheme.replace(/_uc$/, ""));
  return `${i >= 0 ? i : 9}_${scheme}`;
}
