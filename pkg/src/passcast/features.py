"""Feature vectors at three levels of abstraction (92, 352 and 385 values).

Layout, from the canonical frame (kicker's team Left, attacking +x):

low (92)
    ball position (2), ball velocity (2), teammate positions by unum (22),
    opponent positions (22), teammate velocities (22), opponent velocities (22)
mid (+260)
    ball distance to each important point (9), ball direction to each
    important point (9), ball distance to every player, teammates first (22),
    ball direction to every player (22), distance of every player to every
    important point, player-major (198)
high (+33)
    free passing angle from the ball to each teammate (11), each teammate's
    nearest other teammate (11), each teammate's nearest opponent (11)

Scaling: x / 52.5, y / 34, velocity / 3, distance / 130, angle / 180.
Directions between coincident points are encoded as 0.
"""
from __future__ import annotations

import enum
from typing import Sequence

import numpy as np

from passcast.geometry import FieldSpec, Snapshot, Vec2, angle_deg, dist

X_SCALE = 52.5
Y_SCALE = 34.0
VEL_SCALE = 3.0
DIST_SCALE = 130.0
ANGLE_SCALE = 180.0


class EmptyGroup(ValueError):
    pass


class Level(enum.Enum):
    LOW = "low"
    MID = "mid"
    HIGH = "high"

    @property
    def dim(self) -> int:
        return LEVEL_DIMS[self]

    @classmethod
    def parse(cls, value) -> "Level":
        if isinstance(value, Level):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown level {value!r}; expected low, mid or high") from None


# Per-block dimensions, in output order.
LOW_BLOCKS = (
    ("ball_pos", 2),
    ("ball_vel", 2),
    ("player_pos", 44),
    ("player_vel", 44),
)
MID_BLOCKS = (
    ("ball_point_dist", 9),
    ("ball_point_angle", 9),
    ("ball_player_dist", 22),
    ("ball_player_angle", 22),
    ("player_point_dist", 198),
)
HIGH_BLOCKS = (
    ("free_angle", 11),
    ("min_dist_teammate", 11),
    ("min_dist_opponent", 11),
)

LEVEL_DIMS = {
    Level.LOW: sum(n for _, n in LOW_BLOCKS),
    Level.MID: sum(n for _, n in LOW_BLOCKS + MID_BLOCKS),
    Level.HIGH: sum(n for _, n in LOW_BLOCKS + MID_BLOCKS + HIGH_BLOCKS),
}


def min_dist_to_group(p: Vec2, group: Sequence[Vec2]) -> float:
    if not group:
        raise EmptyGroup("minimum distance to an empty group")
    return min(dist(p, q) for q in group)


def _ang_diff(a: float, b: float) -> float:
    d = abs(a - b) % 360.0
    return 360.0 - d if d > 180.0 else d


def free_angle(ball: Vec2, teammate: Vec2, opponents: Sequence[Vec2]) -> float:
    """Angular clearance of the ball->teammate line, in degrees [0, 180].

    Only opponents no farther from the ball than the teammate can narrow it;
    an opponent sitting exactly on the ball has no direction and is ignored.
    """
    reach = dist(ball, teammate)
    heading = angle_deg(ball, teammate)
    best = 180.0
    for o in opponents:
        d = dist(ball, o)
        if d > reach or d == 0.0:
            continue
        best = min(best, _ang_diff(heading, angle_deg(ball, o)))
    return best


def _directions(origin: np.ndarray, targets: np.ndarray) -> np.ndarray:
    # degrees in [-180, 180); coincident pairs -> 0
    delta = targets - origin
    ang = np.degrees(np.arctan2(delta[..., 1], delta[..., 0]))
    ang = np.where(ang >= 180.0, ang - 360.0, ang)
    coincident = (delta[..., 0] == 0.0) & (delta[..., 1] == 0.0)
    return np.where(coincident, 0.0, ang)


def _snapshot_arrays(s: Snapshot):
    pos = np.array([[p.pos.x, p.pos.y] for p in s.players])
    vel = np.array([[p.vel.x, p.vel.y] for p in s.players])
    ball = np.array([s.ball_pos.x, s.ball_pos.y])
    ball_vel = np.array([s.ball_vel.x, s.ball_vel.y])
    return ball, ball_vel, pos, vel


def extract(s: Snapshot, level="high", field: FieldSpec = FieldSpec()) -> np.ndarray:
    """Feature vector of a canonical snapshot; length 92, 352 or 385 by level."""
    level = Level.parse(level)
    ball, ball_vel, pos, vel = _snapshot_arrays(s)
    pscale = np.array([X_SCALE, Y_SCALE])

    parts = [
        ball / pscale,
        ball_vel / VEL_SCALE,
        (pos / pscale).ravel(),
        (vel / VEL_SCALE).ravel(),
    ]
    if level is not Level.LOW:
        points = np.array([[q.x, q.y] for q in field.important_points])
        parts += [
            np.linalg.norm(points - ball, axis=1) / DIST_SCALE,
            _directions(ball, points) / ANGLE_SCALE,
            np.linalg.norm(pos - ball, axis=1) / DIST_SCALE,
            _directions(ball, pos) / ANGLE_SCALE,
            np.linalg.norm(pos[:, None, :] - points[None, :, :], axis=2).ravel() / DIST_SCALE,
        ]
    if level is Level.HIGH:
        parts += list(_high_blocks(s, ball, pos))
    out = np.concatenate(parts)
    assert out.shape == (level.dim,)
    return out


def _high_blocks(s: Snapshot, ball: np.ndarray, pos: np.ndarray):
    mates = s.players[:11]
    opps = [p.pos for p in s.players[11:]]
    fa = np.empty(11)
    for i, p in enumerate(mates):
        if p.pos.x == s.ball_pos.x and p.pos.y == s.ball_pos.y:
            fa[i] = 0.0
        else:
            fa[i] = free_angle(s.ball_pos, p.pos, opps)

    pair = np.linalg.norm(pos[:11, None, :] - pos[None, :, :], axis=2)  # 11 x 22
    own = pair[:, :11].copy()
    np.fill_diagonal(own, np.inf)
    return (
        fa / ANGLE_SCALE,
        own.min(axis=1) / DIST_SCALE,
        pair[:, 11:].min(axis=1) / DIST_SCALE,
    )


def extract_many(snapshots: Sequence[Snapshot], level="high", field: FieldSpec = FieldSpec()) -> np.ndarray:
    level = Level.parse(level)
    if not snapshots:
        return np.empty((0, level.dim))
    return np.vstack([extract(s, level, field) for s in snapshots])


def feature_names(level="high") -> list[str]:
    """Human-readable column names in output order."""
    level = Level.parse(level)
    names = ["ball_x", "ball_y", "ball_vx", "ball_vy"]
    tags = [f"t{u}" for u in range(1, 12)] + [f"o{u}" for u in range(1, 12)]
    names += [f"{t}_{c}" for t in tags for c in ("x", "y")]
    names += [f"{t}_{c}" for t in tags for c in ("vx", "vy")]
    if level is not Level.LOW:
        pts = [f"p{k}" for k in range(1, 10)]
        names += [f"ball_dist_{p}" for p in pts]
        names += [f"ball_angle_{p}" for p in pts]
        names += [f"ball_dist_{t}" for t in tags]
        names += [f"ball_angle_{t}" for t in tags]
        names += [f"{t}_dist_{p}" for t in tags for p in pts]
    if level is Level.HIGH:
        names += [f"free_angle_t{u}" for u in range(1, 12)]
        names += [f"t{u}_min_dist_teammate" for u in range(1, 12)]
        names += [f"t{u}_min_dist_opponent" for u in range(1, 12)]
    return names


__all__ = [
    "Level",
    "LEVEL_DIMS",
    "EmptyGroup",
    "extract",
    "extract_many",
    "free_angle",
    "min_dist_to_group",
    "feature_names",
]
