"""Room geometry: stripe AP placement, user drops, large-scale fading."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import SystemConfig

# Log-distance pathloss: beta_dB = PL0 - 10 * alpha * log10(d / 1 m)
PATHLOSS_DB_1M = -30.5
PATHLOSS_EXPONENT = 3.67
MIN_DISTANCE_M = 1.0


@dataclass(frozen=True)
class Layout:
    """One geometric realization: AP frames, user positions, link gains.

    ap_positions : (L, 3) stripe AP centers on the room perimeter
    ap_tangents  : (L, 3) unit vector along the wall (stripe direction)
    ap_normals   : (L, 3) unit vector pointing into the room
    user_positions : (K, 3)
    distances    : (L, K) 3-D link distances, floored at 1 m
    gains        : (L, K) linear large-scale gains beta
    """

    ap_positions: np.ndarray
    ap_tangents: np.ndarray
    ap_normals: np.ndarray
    user_positions: np.ndarray
    distances: np.ndarray = field(init=False)
    gains: np.ndarray = field(init=False)

    def __post_init__(self):
        for name in ("ap_positions", "ap_tangents", "ap_normals",
                     "user_positions"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        diff = self.user_positions[None, :, :] - self.ap_positions[:, None, :]
        d = np.sqrt(np.sum(diff * diff, axis=2))
        d = np.maximum(d, MIN_DISTANCE_M)
        g = large_scale_gain(d)
        d.setflags(write=False)
        g.setflags(write=False)
        object.__setattr__(self, "distances", d)
        object.__setattr__(self, "gains", g)


def large_scale_gain(d):
    """Linear pathloss gain at 3-D distance d (meters, > 0)."""
    d = np.asarray(d, dtype=np.float64)
    if np.any(d <= 0.0):
        raise ValueError("distance must be positive")
    beta_db = PATHLOSS_DB_1M - 10.0 * PATHLOSS_EXPONENT * np.log10(d)
    return 10.0 ** (beta_db / 10.0)


def ap_positions_and_frames(cfg: SystemConfig):
    """Equally spaced AP centers along the room perimeter at stripe height.

    Walk the rectangle counterclockwise from corner (0, 0); AP l sits at
    arclength (l + 0.5) * perimeter / L.  Returns (positions, tangents,
    normals), each (L, 3); tangents follow the walk direction and normals
    point into the room.
    """
    X, Y = cfg.room_x, cfg.room_y
    P = 2.0 * (X + Y)
    s = (np.arange(cfg.L) + 0.5) * (P / cfg.L)
    pos = np.zeros((cfg.L, 3))
    tan = np.zeros((cfg.L, 3))
    nrm = np.zeros((cfg.L, 3))
    pos[:, 2] = cfg.stripe_height
    # wall segments: [0,X) south, [X,X+Y) east, [X+Y,2X+Y) north, rest west
    for i, si in enumerate(s):
        if si < X:
            pos[i, :2] = (si, 0.0)
            tan[i, :2] = (1.0, 0.0)
            nrm[i, :2] = (0.0, 1.0)
        elif si < X + Y:
            pos[i, :2] = (X, si - X)
            tan[i, :2] = (0.0, 1.0)
            nrm[i, :2] = (-1.0, 0.0)
        elif si < 2 * X + Y:
            pos[i, :2] = (X - (si - X - Y), Y)
            tan[i, :2] = (-1.0, 0.0)
            nrm[i, :2] = (0.0, -1.0)
        else:
            pos[i, :2] = (0.0, Y - (si - 2 * X - Y))
            tan[i, :2] = (0.0, -1.0)
            nrm[i, :2] = (1.0, 0.0)
    return pos, tan, nrm


def place_layout(cfg: SystemConfig, rng: np.random.Generator) -> Layout:
    """Drop K users uniformly in the room and build the Layout."""
    pos, tan, nrm = ap_positions_and_frames(cfg)
    users = np.empty((cfg.K, 3))
    users[:, 0] = rng.uniform(0.0, cfg.room_x, cfg.K)
    users[:, 1] = rng.uniform(0.0, cfg.room_y, cfg.K)
    users[:, 2] = cfg.user_height
    return Layout(ap_positions=pos, ap_tangents=tan, ap_normals=nrm,
                  user_positions=users)
