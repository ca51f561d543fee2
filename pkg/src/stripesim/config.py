"""Simulation configuration and the flat key=value config file format."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

ANTENNA_MODES = ("correlated", "uncorrelated")

_INT_FIELDS = {"L", "N", "K", "tau_c", "tau_p", "seed", "drops", "blocks_per_drop"}
_FLOAT_FIELDS = {
    "sigma2_dBm", "room_x", "room_y", "room_z", "stripe_height",
    "user_height", "angle_spread_deg", "uc_fraction",
}
_STR_FIELDS = {"antenna_mode"}


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


@dataclass(frozen=True)
class SystemConfig:
    """All scalar simulation parameters.

    Powers are in mW (noise given in dBm), distances in meters, angles in
    degrees.  `p` is either a single per-user transmit power or a sequence
    of K powers.  The total antenna count M = N*L is always derived.
    """

    L: int = 24
    N: int = 4
    K: int = 24
    tau_c: int = 720
    tau_p: int = 24
    p: float | tuple = 50.0
    sigma2_dBm: float = -92.0
    room_x: float = 200.0
    room_y: float = 200.0
    room_z: float = 5.0
    stripe_height: float = 5.0
    user_height: float = 1.5
    angle_spread_deg: float = 15.0
    uc_fraction: float = 0.25
    antenna_mode: str = "correlated"
    seed: int = 1
    drops: int = 500
    blocks_per_drop: int = 1

    def __post_init__(self):
        for name in ("L", "N", "K"):
            if int(getattr(self, name)) < 1:
                raise ConfigError(f"{name}: must be >= 1")
        if not 0 < self.tau_p < self.tau_c:
            raise ConfigError("tau_p: need 0 < tau_p < tau_c")
        if self.tau_p < self.K:
            raise ConfigError(
                "tau_p: orthogonal pilots need tau_p >= K (pilot reuse unsupported)")
        if not 0.0 < self.uc_fraction <= 1.0:
            raise ConfigError("uc_fraction: need 0 < uc_fraction <= 1")
        if self.antenna_mode not in ANTENNA_MODES:
            raise ConfigError(f"antenna_mode: must be one of {ANTENNA_MODES}")
        for name in ("room_x", "room_y", "room_z"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name}: must be > 0")
        for name in ("stripe_height", "user_height"):
            if not 0 <= getattr(self, name) <= self.room_z:
                raise ConfigError(f"{name}: must lie in [0, room_z]")
        if self.angle_spread_deg <= 0:
            raise ConfigError("angle_spread_deg: must be > 0")
        p = np.atleast_1d(np.asarray(self.p, dtype=float))
        if p.size not in (1, self.K):
            raise ConfigError("p: scalar or one power per user")
        if np.any(p < 0):
            raise ConfigError("p: powers must be >= 0")
        if self.seed < 0:
            raise ConfigError("seed: must be >= 0")
        if self.drops < 1:
            raise ConfigError("drops: must be >= 1")
        if self.blocks_per_drop < 1:
            raise ConfigError("blocks_per_drop: must be >= 1")

    @property
    def M(self) -> int:
        return self.N * self.L

    @property
    def L_D(self) -> int:
        return self.tau_c - self.tau_p

    @property
    def prelog(self) -> float:
        return (self.tau_c - self.tau_p) / self.tau_c

    @property
    def sigma2_mw(self) -> float:
        return 10.0 ** (self.sigma2_dBm / 10.0)

    @property
    def p_vector(self) -> np.ndarray:
        """Per-user transmit powers in mW, shape (K,)."""
        p = np.atleast_1d(np.asarray(self.p, dtype=float))
        if p.size == 1:
            p = np.full(self.K, p[0])
        return p

    def replace(self, **changes) -> "SystemConfig":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        d = dataclasses.asdict(self)
        if isinstance(d["p"], tuple):
            d["p"] = list(d["p"])
        return d


def parse_config(text: str, source: str = "<config>") -> SystemConfig:
    """Parse the flat `key = value` config format ('#' starts a comment)."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        field_names = {f.name for f in dataclasses.fields(SystemConfig)}
        if key not in field_names:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        try:
            if key in _INT_FIELDS:
                values[key] = int(val)
            elif key in _FLOAT_FIELDS:
                values[key] = float(val)
            elif key in _STR_FIELDS:
                values[key] = val
            elif key == "p":
                parts = [float(x) for x in val.split(",")]
                values[key] = parts[0] if len(parts) == 1 else tuple(parts)
        except ValueError as e:
            raise ConfigError(f"{source}:{lineno}: {key}: {e}") from e
    return SystemConfig(**values)


def read_config(path) -> SystemConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read(), source=str(path))


def format_config(cfg: SystemConfig) -> str:
    lines = []
    for f in dataclasses.fields(SystemConfig):
        v = getattr(cfg, f.name)
        if f.name == "p" and isinstance(v, tuple):
            v = ",".join(f"{x:.9g}" for x in v)
        elif isinstance(v, float):
            v = f"{v:.9g}"
        lines.append(f"{f.name} = {v}")
    return "\n".join(lines) + "\n"
