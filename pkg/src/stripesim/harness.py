"""Monte Carlo driver: drop workers, output writers, and parameter sweeps.

Determinism contract: (config, seed) fully determine every output file.
Per-drop generators come from spawning the master SeedSequence, each drop
spawns one child per coherence block plus one for the user placement, and
parallel execution only farms out whole drops, so results are identical
for any job count.  Wall-clock timings are kept out of the output files
for the same reason.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._version import __version__
from .channel import (complex_noise, covariance_factors, draw_channels,
                      gaussian_symbols, pilot_matrix, received_data,
                      received_pilots)
from .combiners import (instantaneous_sinr, lmmse_combiners, nlmmse_receive,
                        uc_select)
from .config import SystemConfig
from .costs import CostReport, aggregate_costs, complexity_counts
from .covariance import spatial_covariances
from .estimation import estimate_channels, estimation_matrices
from .geometry import place_layout
from .metrics import cdf_table, sinr_from_probes, summarize_samples
from .qlmmse import recover_gram, stream_second_moment

SCHEME_ORDER = ("mrc", "lmmse", "nlmmse", "qlmmse")
UC_ORDER = ("off", "on")
MAX_SKIP_FRACTION = 1e-3


def fmt_float(x: float) -> str:
    """Canonical float formatting for all emitted numbers."""
    return "%.9g" % x


def canonical_schemes(schemes) -> tuple:
    out = tuple(s for s in SCHEME_ORDER if s in set(schemes))
    bad = set(schemes) - set(SCHEME_ORDER)
    if bad or not out:
        raise ValueError("unknown schemes: %s (choose from %s)"
                         % (sorted(bad), ", ".join(SCHEME_ORDER)))
    return out


def canonical_uc_modes(uc_modes) -> tuple:
    out = tuple(u for u in UC_ORDER if u in set(uc_modes))
    bad = set(uc_modes) - set(UC_ORDER)
    if bad or not out:
        raise ValueError("unknown uc modes: %s (choose from on, off)"
                         % sorted(bad))
    return out


@dataclass(frozen=True)
class RunManifest:
    """Reproducibility record for one run (timings never hit the files)."""

    version: str
    master_seed: int
    drop_seeds: tuple
    config: SystemConfig
    schemes: tuple
    uc_modes: tuple
    elapsed_s: float


@dataclass(frozen=True)
class RunResult:
    """All per-(scheme, uc) outputs of a Monte Carlo run.

    sinr_mean and se map "scheme_uc" keys to (drops, K) arrays; costs maps
    the same keys to CostReport.  se values already include the prelog.
    """

    manifest: RunManifest
    sinr_mean: dict
    se: dict
    costs: dict
    skipped_blocks: int
    total_blocks: int

    def keys(self):
        return ["%s_%s" % (s, u) for u in self.manifest.uc_modes
                for s in self.manifest.schemes]

    def summary(self) -> dict:
        return {key: summarize_samples(self.se[key]) for key in self.keys()}


def result_key(scheme: str, uc: str) -> str:
    return "%s_%s" % (scheme, uc)


def cost_row_name(scheme: str, uc: str) -> str:
    return scheme + ("_uc" if uc == "on" else "")


def _drop_generators(child_ss, blocks: int):
    """Layout generator plus one generator per coherence block."""
    seqs = child_ss.spawn(1 + blocks)
    return (np.random.default_rng(seqs[0]),
            [np.random.default_rng(s) for s in seqs[1:]])


def _block_sinrs(cfg, h, h_hat, C_err, R, Y, serve, schemes, qlmmse_exact):
    """Per-scheme (K,) instantaneous SINR for one coherence block."""
    K, L, N = h.shape
    M = L * N
    p = cfg.p_vector
    sigma2 = cfg.sigma2_mw
    sqp = np.sqrt(p)
    H = h.transpose(1, 2, 0).reshape(M, K)
    Hh = h_hat.transpose(1, 2, 0).reshape(M, K)
    if serve is None:
        Vh = Hh
    else:
        row_mask = np.repeat(serve, N, axis=1).T  # (M, K), AP-major rows
        Vh = np.where(row_mask, Hh, 0.0)
    H_eff = H * sqp[None, :]
    Vh_eff = Vh * sqp[None, :]
    out = {}
    for scheme in schemes:
        if scheme == "mrc":
            sinr = instantaneous_sinr(Vh, H, p, sigma2)
        elif scheme == "lmmse":
            V = lmmse_combiners(h_hat, C_err, p, sigma2, serve, R)
            sinr = instantaneous_sinr(V, H, p, sigma2)
        elif scheme == "nlmmse":
            T_s = nlmmse_receive(h_hat, H_eff.reshape(L, N, K),
                                 p, sigma2, serve)
            T_n = nlmmse_receive(h_hat, np.eye(M).reshape(L, N, M),
                                 p, sigma2, serve)
            sinr = sinr_from_probes(T_s, T_n, sigma2)
        elif scheme == "qlmmse":
            if qlmmse_exact:
                B = Vh_eff.conj().T @ H_eff
                A = B @ B.conj().T + sigma2 * (Vh_eff.conj().T @ Vh_eff)
            else:
                S_eff = Vh_eff.conj().T @ Y.reshape(M, -1)
                A = stream_second_moment(S_eff)
            rec = recover_gram(A, sigma2)
            T_s = rec.combiner @ (Vh_eff.conj().T @ H_eff)
            T_n = rec.combiner @ Vh_eff.conj().T
            sinr = sinr_from_probes(T_s, T_n, sigma2)
        else:
            raise ValueError("unknown scheme %r" % (scheme,))
        out[scheme] = sinr
    return out


def _simulate_drop(args):
    """Worker: one user drop.  Returns per-key SINR/SE sums and costs."""
    cfg, schemes, uc_modes, child_ss, qlmmse_exact = args
    rng_layout, rng_blocks = _drop_generators(child_ss, cfg.blocks_per_drop)
    layout = place_layout(cfg, rng_layout)
    R = spatial_covariances(cfg, layout)
    K, L, N = cfg.K, cfg.L, cfg.N
    p = cfg.p_vector
    sigma2 = cfg.sigma2_mw
    assignment = np.arange(K)
    pilots = pilot_matrix(cfg.tau_p)
    W, Gamma = estimation_matrices(R, assignment, p, cfg.tau_p, sigma2)
    C_err = R - Gamma
    C_err = 0.5 * (C_err + np.conj(np.swapaxes(C_err, -1, -2)))
    F = covariance_factors(R)
    masks = {}
    for uc in uc_modes:
        masks[uc] = uc_select(layout.gains, cfg.uc_fraction) \
            if uc == "on" else None
    sinr_sum = {result_key(s, u): np.zeros(K)
                for u in uc_modes for s in schemes}
    log_sum = {key: np.zeros(K) for key in sinr_sum}
    ok_blocks = 0
    skipped = 0
    for rng in rng_blocks:
        h = draw_channels(F, rng)                       # (K, L, N)
        Zn = complex_noise((L, N, cfg.tau_p), sigma2, rng)
        Z = received_pilots(h, pilots, assignment, p, Zn)
        s_true = gaussian_symbols((K, cfg.L_D), rng)
        Yn = complex_noise((L, N, cfg.L_D), sigma2, rng)
        Y = received_data(h, s_true, p, Yn)
        try:
            h_hat = estimate_channels(Z, W, pilots, assignment)
            block = {}
            for uc in uc_modes:
                sinrs = _block_sinrs(cfg, h, h_hat, C_err, R, Y, masks[uc],
                                     schemes, qlmmse_exact)
                for s in schemes:
                    block[result_key(s, uc)] = sinrs[s]
        except np.linalg.LinAlgError:
            skipped += 1
            continue
        if not all(np.isfinite(v).all() for v in block.values()):
            skipped += 1
            continue
        for key, v in block.items():
            sinr_sum[key] += v
            log_sum[key] += np.log2(1.0 + v)
        ok_blocks += 1
    costs = {result_key(s, u): complexity_counts(s, cfg, masks[u])
             for u in uc_modes for s in schemes}
    return sinr_sum, log_sum, ok_blocks, skipped, costs


def run_experiment(cfg: SystemConfig, schemes=SCHEME_ORDER,
                   uc_modes=("off",), jobs: int = 1,
                   qlmmse_exact: bool = False) -> RunResult:
    """Monte Carlo over cfg.drops user placements.

    Per drop and block: draw geometry, covariances, channels, pilots and
    data; estimate channels; evaluate every requested (scheme, uc) pair.
    Blocks hitting numeric failures are skipped and counted; the run fails
    if more than 0.1% skip.  jobs > 1 distributes whole drops over
    processes without changing any output value.
    """
    schemes = canonical_schemes(schemes)
    uc_modes = canonical_uc_modes(uc_modes)
    t0 = time.perf_counter()
    master = np.random.SeedSequence(cfg.seed)
    children = master.spawn(cfg.drops)
    drop_seeds = tuple(int(c.generate_state(1)[0]) for c in children)
    work = [(cfg, schemes, uc_modes, c, qlmmse_exact) for c in children]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_simulate_drop, work))
    else:
        results = [_simulate_drop(w) for w in work]
    keys = [result_key(s, u) for u in uc_modes for s in schemes]
    sinr_mean = {key: np.zeros((cfg.drops, cfg.K)) for key in keys}
    se = {key: np.zeros((cfg.drops, cfg.K)) for key in keys}
    skipped = 0
    total = cfg.drops * cfg.blocks_per_drop
    for d, (s_sum, l_sum, n_ok, n_skip, _) in enumerate(results):
        skipped += n_skip
        if n_ok == 0:
            raise RuntimeError("drop %d lost all %d blocks to numeric "
                               "failures" % (d, cfg.blocks_per_drop))
        for key in keys:
            sinr_mean[key][d] = s_sum[key] / n_ok
            se[key][d] = cfg.prelog * l_sum[key] / n_ok
    if skipped > MAX_SKIP_FRACTION * total:
        raise RuntimeError("%d of %d blocks skipped (> %.1f%%)"
                           % (skipped, total, 100 * MAX_SKIP_FRACTION))
    costs = {key: aggregate_costs([r[4][key] for r in results], cfg.L)
             for key in keys}
    manifest = RunManifest(version=__version__, master_seed=cfg.seed,
                           drop_seeds=drop_seeds, config=cfg,
                           schemes=schemes, uc_modes=uc_modes,
                           elapsed_s=time.perf_counter() - t0)
    return RunResult(manifest=manifest, sinr_mean=sinr_mean, se=se,
                     costs=costs, skipped_blocks=skipped, total_blocks=total)


# ----------------------------------------------------------------------
# Output writers
# ----------------------------------------------------------------------

def _json_floats(obj):
    """Round every float to 9 significant digits for stable JSON."""
    if isinstance(obj, float):
        return float(fmt_float(obj))
    if isinstance(obj, dict):
        return {k: _json_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_floats(v) for v in obj]
    return obj


def write_outputs(result: RunResult, outdir) -> list:
    """Emit se_samples.csv, per-key CDF tables, cost.csv, summary.json."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    man = result.manifest
    cfg = man.config
    written = []

    lines = ["drop,user,scheme,uc,sinr_mean,se"]
    for d in range(cfg.drops):
        for uc in man.uc_modes:
            for s in man.schemes:
                key = result_key(s, uc)
                for k in range(cfg.K):
                    lines.append("%d,%d,%s,%s,%s,%s" % (
                        d, k, s, uc,
                        fmt_float(result.sinr_mean[key][d, k]),
                        fmt_float(result.se[key][d, k])))
    path = outdir / "se_samples.csv"
    path.write_text("\n".join(lines) + "\n")
    written.append(path)

    for uc in man.uc_modes:
        for s in man.schemes:
            key = result_key(s, uc)
            table = cdf_table(result.se[key])
            lines = ["se,prob"]
            lines += ["%s,%s" % (fmt_float(v), fmt_float(q))
                      for v, q in table]
            path = outdir / ("cdf_%s_%s.csv" % (s, uc))
            path.write_text("\n".join(lines) + "\n")
            written.append(path)

    lines = ["scheme,fronthaul_reals,c_serial,c_parallel,c_total"]
    for uc in man.uc_modes:
        for s in man.schemes:
            rep = result.costs[result_key(s, uc)]
            lines.append("%s,%d,%d,%d,%d" % (
                cost_row_name(s, uc), rep.fronthaul_reals, rep.c_serial,
                rep.c_parallel, rep.c_total))
    path = outdir / "cost.csv"
    path.write_text("\n".join(lines) + "\n")
    written.append(path)

    summary = {
        "version": man.version,
        "master_seed": man.master_seed,
        "config": cfg.as_dict(),
        "schemes": list(man.schemes),
        "uc_modes": list(man.uc_modes),
        "drop_seeds": list(man.drop_seeds),
        "results": result.summary(),
        "cost": {result_key(s, u): {
            "fronthaul_reals": result.costs[result_key(s, u)].fronthaul_reals,
            "c_serial": result.costs[result_key(s, u)].c_serial,
            "c_parallel": result.costs[result_key(s, u)].c_parallel,
            "c_total": result.costs[result_key(s, u)].c_total,
            "c_cpu": result.costs[result_key(s, u)].c_cpu,
        } for u in man.uc_modes for s in man.schemes},
        "skipped_blocks": result.skipped_blocks,
        "total_blocks": result.total_blocks,
    }
    path = outdir / "summary.json"
    path.write_text(json.dumps(_json_floats(summary), indent=2,
                               sort_keys=True) + "\n")
    written.append(path)
    return written


# ----------------------------------------------------------------------
# Cost-only evaluation (same layouts and masks as the simulation)
# ----------------------------------------------------------------------

def compute_costs(cfg: SystemConfig, schemes=SCHEME_ORDER,
                  uc_modes=("off",)) -> dict:
    """Per-(scheme, uc) CostReport without running the signal chain.

    UC masks are rebuilt from the same per-drop layout streams the
    simulation uses, so the reports match a full run's cost.csv exactly.
    """
    schemes = canonical_schemes(schemes)
    uc_modes = canonical_uc_modes(uc_modes)
    costs = {}
    for s in schemes:
        costs[result_key(s, "off")] = complexity_counts(s, cfg, None)
    if "on" in uc_modes:
        per_drop = {s: [] for s in schemes}
        for child in np.random.SeedSequence(cfg.seed).spawn(cfg.drops):
            rng_layout, _ = _drop_generators(child, cfg.blocks_per_drop)
            layout = place_layout(cfg, rng_layout)
            mask = uc_select(layout.gains, cfg.uc_fraction)
            for s in schemes:
                per_drop[s].append(complexity_counts(s, cfg, mask))
        for s in schemes:
            costs[result_key(s, "on")] = aggregate_costs(per_drop[s], cfg.L)
    return {result_key(s, u): costs[result_key(s, u)]
            for u in uc_modes for s in schemes}


def write_cost_table(costs: dict, outdir) -> Path:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    lines = ["scheme,fronthaul_reals,c_serial,c_parallel,c_total"]
    for key, rep in costs.items():
        uc = "on" if key.endswith("_on") else "off"
        lines.append("%s,%d,%d,%d,%d" % (
            cost_row_name(rep.scheme, uc), rep.fronthaul_reals,
            rep.c_serial, rep.c_parallel, rep.c_total))
    path = outdir / "cost.csv"
    path.write_text("\n".join(lines) + "\n")
    return path


# ----------------------------------------------------------------------
# Delta-SNR / block-length sweep
# ----------------------------------------------------------------------

def parse_dsnr(text: str) -> tuple:
    """dB offsets: 'start:step:stop' (inclusive) or a comma list."""
    text = text.strip()
    if ":" in text:
        parts = [float(x) for x in text.split(":")]
        if len(parts) != 3 or parts[1] <= 0:
            raise ValueError("expected start:step:stop with step > 0, got %r"
                             % text)
        start, step, stop = parts
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        return tuple(start + i * step for i in range(max(n, 0)))
    return tuple(float(x) for x in text.split(","))


def parse_ld(text: str) -> tuple:
    """Data block lengths: comma list of positive ints, 'inf' allowed."""
    out = []
    for tok in text.split(","):
        tok = tok.strip().lower()
        if tok == "inf":
            out.append("inf")
        else:
            v = int(tok)
            if v < 1:
                raise ValueError("block length must be >= 1, got %d" % v)
            out.append(v)
    return tuple(out)


def _scale_power(p, dsnr_db: float):
    factor = 10.0 ** (dsnr_db / 10.0)
    if isinstance(p, tuple):
        return tuple(x * factor for x in p)
    return p * factor


def sweep_snr_ld(cfg: SystemConfig, dsnr_list, ld_list,
                 schemes=SCHEME_ORDER, jobs: int = 1) -> list:
    """Mean SE per (scheme, dsnr_db, ld) cell.

    Each cell reruns the experiment with transmit power scaled by the dB
    offset and tau_c = tau_p + ld, reusing the master seed so layouts and
    channel draws pair up across cells.  Mean SE is reported with the base
    config's prelog for every cell, so rows differ only through estimation
    and equalization quality, not pilot overhead.  ld == 'inf' evaluates
    the exact-statistics variant of the stream-equalizing scheme: the
    second moment is injected analytically instead of being estimated
    from data.
    """
    schemes = canonical_schemes(schemes)
    rows = []
    for dsnr in dsnr_list:
        p_scaled = _scale_power(cfg.p, dsnr)
        for ld in ld_list:
            if ld == "inf":
                cell = cfg.replace(p=p_scaled)
                res = run_experiment(cell, schemes=("qlmmse",),
                                     uc_modes=("off",), jobs=jobs,
                                     qlmmse_exact=True)
                mean = float(np.mean(res.se["qlmmse_off"]))
                rows.append(("qlmmse", float(dsnr), "inf", mean))
                continue
            cell = cfg.replace(p=p_scaled, tau_c=cfg.tau_p + ld)
            res = run_experiment(cell, schemes=schemes, uc_modes=("off",),
                                 jobs=jobs)
            fix = cfg.prelog / cell.prelog
            for s in schemes:
                mean = fix * float(np.mean(res.se[result_key(s, "off")]))
                rows.append((s, float(dsnr), str(ld), mean))
    return rows


def write_sweep(rows, outdir) -> Path:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    lines = ["scheme,dsnr_db,ld,mean_se"]
    lines += ["%s,%s,%s,%s" % (s, fmt_float(d), ld, fmt_float(m))
              for s, d, ld, m in rows]
    path = outdir / "sweep.csv"
    path.write_text("\n".join(lines) + "\n")
    return path
