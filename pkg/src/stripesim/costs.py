"""Fronthaul load and complexity accounting per receiver scheme.

All counts are complex multiplications for one coherence block.  Three
positions are distinguished:

* c_parallel : work the APs can do simultaneously (channel estimation and
  any purely local combining); reported as the maximum over APs.
* c_serial   : work that must run AP after AP along the stripe (the
  sequential per-AP equalization); also the maximum over APs.
* c_total    : critical-path count, always L * c_serial + c_parallel.

c_cpu is kept separately: it is the central processor's own work and does
not ride the stripe, so it is reported in run summaries but not in the
per-scheme cost table.

Sequential per-AP equalization is counted per user stream: each of the
K_l served users contributes an (N+1)-dimensional solve (its N antenna
observations plus the one incoming stream), i.e. assembling an
(N+1) x (N+1) system against K_l columns, one Cholesky, the triangular
solves, and applying the result over the data samples.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .config import SystemConfig

SCHEMES = ("mrc", "lmmse", "nlmmse", "qlmmse")


def chol_cost(n: int) -> int:
    """Complex multiplications of an n x n Cholesky factorization."""
    return (n ** 3 + 2) // 3


@dataclass(frozen=True)
class CostReport:
    scheme: str
    fronthaul_reals: int
    c_serial: int
    c_parallel: int
    c_total: int
    c_cpu: int

    def as_row(self) -> tuple:
        """The five-column cost table row (c_cpu is reported elsewhere)."""
        return (self.scheme, self.fronthaul_reals, self.c_serial,
                self.c_parallel, self.c_total)


def fronthaul_reals(scheme: str, cfg: SystemConfig) -> int:
    """Real values crossing the fronthaul per coherence block.

    Stream-forwarding schemes move K complex soft symbols per data sample;
    the sequential scheme additionally passes the K x K effective
    stream-channel state between APs (3 K^2 reals); the centralized scheme
    moves every antenna sample plus the channel estimates.
    """
    K, M, L_D = cfg.K, cfg.M, cfg.L_D
    if scheme in ("mrc", "qlmmse"):
        return 2 * K * L_D
    if scheme == "nlmmse":
        return 2 * K * L_D + 3 * K * K
    if scheme == "lmmse":
        return 2 * M * L_D + 2 * M * K
    raise ValueError("unknown scheme %r" % (scheme,))


def _served_counts(cfg: SystemConfig, serve: np.ndarray | None) -> np.ndarray:
    """(L,) number of users served per AP."""
    if serve is None:
        return np.full(cfg.L, cfg.K, dtype=np.int64)
    return np.asarray(serve, dtype=bool).sum(axis=0).astype(np.int64)


def complexity_counts(scheme: str, cfg: SystemConfig,
                      serve: np.ndarray | None = None) -> CostReport:
    """CostReport for one scheme under an optional (K, L) serving mask."""
    N, K, L, L_D, tau_p = cfg.N, cfg.K, cfg.L, cfg.L_D, cfg.tau_p
    k_l = _served_counts(cfg, serve)
    ce_ap = k_l * (N * tau_p + N * N)        # per-AP channel estimation
    c_serial = 0
    c_cpu = 0
    if scheme in ("mrc", "qlmmse"):
        per_ap = ce_ap + k_l * N * L_D
        c_parallel = int(per_ap.max())
        if scheme == "qlmmse":
            # moment estimate, eigendecomposition (modeled at 10 K^3),
            # equalizer assembly, and equalizer application
            c_cpu = 2 * K * K * L_D + 11 * K ** 3 + K * K
    elif scheme == "lmmse":
        c_parallel = int(ce_ap.max())
        if serve is None:
            m_k = np.full(K, cfg.M, dtype=np.int64)
        else:
            m_k = np.asarray(serve, dtype=bool).sum(axis=1).astype(np.int64) * N
        c_cpu = int(sum(K * m * m + chol_cost(int(m)) + m * m + m * L_D
                        for m in m_k))
    elif scheme == "nlmmse":
        n1 = N + 1
        per_ap = k_l * (n1 * n1 * k_l + chol_cost(n1) + n1 * n1 + n1 * L_D)
        c_serial = int(per_ap.max())
        c_parallel = int(ce_ap.max())
    else:
        raise ValueError("unknown scheme %r" % (scheme,))
    c_total = L * c_serial + c_parallel
    return CostReport(scheme=scheme, fronthaul_reals=fronthaul_reals(scheme, cfg),
                      c_serial=int(c_serial), c_parallel=int(c_parallel),
                      c_total=int(c_total), c_cpu=int(c_cpu))


def aggregate_costs(reports, L: int) -> CostReport:
    """Worst case over per-drop reports: max per field, c_total recomputed."""
    reports = list(reports)
    first = reports[0]
    c_serial = max(r.c_serial for r in reports)
    c_parallel = max(r.c_parallel for r in reports)
    return replace(first,
                   fronthaul_reals=max(r.fronthaul_reals for r in reports),
                   c_serial=c_serial, c_parallel=c_parallel,
                   c_total=L * c_serial + c_parallel,
                   c_cpu=max(r.c_cpu for r in reports))
