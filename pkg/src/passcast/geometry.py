"""World-state value types and the planar geometry shared by every stage.

All coordinates are in the soccer-server field frame: x along the pitch
length, y along its width, meters. Every type here is immutable.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable


class AngleUndefined(ValueError):
    """Raised when a direction is requested between coincident points."""


class Side(enum.Enum):
    LEFT = "l"
    RIGHT = "r"

    @property
    def other(self) -> "Side":
        return Side.RIGHT if self is Side.LEFT else Side.LEFT

    @classmethod
    def parse(cls, token: str) -> "Side":
        token = token.lower()
        if token in ("l", "left"):
            return cls.LEFT
        if token in ("r", "right"):
            return cls.RIGHT
        raise ValueError(f"unknown side {token!r}")


@dataclass(frozen=True, slots=True)
class Vec2:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite vector ({self.x}, {self.y})")

    def __neg__(self) -> "Vec2":
        return Vec2(-self.x, -self.y)

    def __add__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x - other.x, self.y - other.y)


@dataclass(frozen=True, slots=True)
class PlayerState:
    side: Side
    unum: int
    pos: Vec2
    vel: Vec2 = Vec2(0.0, 0.0)

    def __post_init__(self):
        if not 1 <= self.unum <= 11:
            raise ValueError(f"uniform number out of range: {self.unum}")


PLAY_ON = "play_on"
BEFORE_KICK_OFF = "before_kick_off"


def swap_playmode_side(playmode: str) -> str:
    """``kick_in_l`` <-> ``kick_in_r``; side-less modes pass through."""
    if playmode.endswith("_l"):
        return playmode[:-2] + "_r"
    if playmode.endswith("_r"):
        return playmode[:-2] + "_l"
    return playmode


BALL_X_LIMIT = 60.0
BALL_Y_LIMIT = 40.0


@dataclass(frozen=True)
class Snapshot:
    """One simulation cycle: ball, all 22 players and the referee playmode.

    ``players`` is stored sorted as Left 1..11 followed by Right 1..11
    regardless of the order it was given in.
    """

    cycle: int
    ball_pos: Vec2
    ball_vel: Vec2
    players: tuple[PlayerState, ...]
    playmode: str = PLAY_ON

    def __post_init__(self):
        if self.cycle < 0:
            raise ValueError(f"negative cycle {self.cycle}")
        if abs(self.ball_pos.x) > BALL_X_LIMIT or abs(self.ball_pos.y) > BALL_Y_LIMIT:
            raise ValueError(f"ball outside field margin: {self.ball_pos}")
        players = tuple(self.players)
        if len(players) != 22:
            raise ValueError(f"expected 22 players, got {len(players)}")
        for side in Side:
            unums = sorted(p.unum for p in players if p.side is side)
            if unums != list(range(1, 12)):
                raise ValueError(f"side {side.value} must carry unums 1..11 exactly once, got {unums}")
        order = {Side.LEFT: 0, Side.RIGHT: 1}
        players = tuple(sorted(players, key=lambda p: (order[p.side], p.unum)))
        object.__setattr__(self, "players", players)

    def team(self, side: Side) -> tuple[PlayerState, ...]:
        """The 11 players of ``side`` in unum order."""
        return self.players[:11] if side is Side.LEFT else self.players[11:]

    def player(self, side: Side, unum: int) -> PlayerState:
        if not 1 <= unum <= 11:
            raise KeyError((side, unum))
        return self.team(side)[unum - 1]


def _default_points() -> tuple[Vec2, ...]:
    return (
        Vec2(-52.5, 0.0),   # own goal center
        Vec2(52.5, 0.0),    # opponent goal center
        Vec2(0.0, 0.0),     # field center
        Vec2(-52.5, -34.0),
        Vec2(-52.5, 34.0),
        Vec2(52.5, -34.0),
        Vec2(52.5, 34.0),
        Vec2(-41.5, 0.0),   # own penalty spot
        Vec2(41.5, 0.0),    # opponent penalty spot
    )


@dataclass(frozen=True)
class FieldSpec:
    """Field constants; defaults are the standard server values."""

    half_length: float = 52.5
    half_width: float = 34.0
    kickable_dist: float = 1.085
    important_points: tuple[Vec2, ...] = field(default_factory=_default_points)

    def __post_init__(self):
        object.__setattr__(self, "important_points", tuple(self.important_points))
        if len(self.important_points) != 9:
            raise ValueError(f"important_points needs exactly 9 entries, got {len(self.important_points)}")
        if self.kickable_dist <= 0:
            raise ValueError("kickable_dist must be positive")

    @property
    def own_goal(self) -> Vec2:
        return Vec2(-self.half_length, 0.0)

    @property
    def opp_goal(self) -> Vec2:
        return Vec2(self.half_length, 0.0)


def dist(a: Vec2, b: Vec2) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def angle_deg(frm: Vec2, to: Vec2) -> float:
    """Direction of ``to - frm`` in degrees, counterclockwise from +x, in [-180, 180)."""
    dx, dy = to.x - frm.x, to.y - frm.y
    if dx == 0.0 and dy == 0.0:
        raise AngleUndefined(f"direction from {frm} to itself")
    return normalize_deg(math.degrees(math.atan2(dy, dx)))


def normalize_deg(a: float) -> float:
    a = math.fmod(a + 180.0, 360.0)
    if a < 0.0:
        a += 360.0
    return a - 180.0


def mirror_player(p: PlayerState) -> PlayerState:
    return PlayerState(p.side.other, p.unum, -p.pos, -p.vel)


def mirror(s: Snapshot) -> Snapshot:
    """Rotate the world by 180 degrees and swap team sides."""
    return Snapshot(
        cycle=s.cycle,
        ball_pos=-s.ball_pos,
        ball_vel=-s.ball_vel,
        players=tuple(mirror_player(p) for p in s.players),
        playmode=swap_playmode_side(s.playmode),
    )


def canonicalize(s: Snapshot, attacking: Side) -> Snapshot:
    """Return ``s`` in the frame where ``attacking`` is Left and attacks +x."""
    return s if attacking is Side.LEFT else mirror(s)


def make_snapshot(
    cycle: int,
    ball_pos: tuple[float, float],
    left: Iterable[tuple[float, float]],
    right: Iterable[tuple[float, float]],
    *,
    ball_vel: tuple[float, float] = (0.0, 0.0),
    playmode: str = PLAY_ON,
) -> Snapshot:
    """Convenience builder from plain position tuples, unums assigned in order."""
    players = [PlayerState(Side.LEFT, i + 1, Vec2(*xy)) for i, xy in enumerate(left)]
    players += [PlayerState(Side.RIGHT, i + 1, Vec2(*xy)) for i, xy in enumerate(right)]
    return Snapshot(cycle, Vec2(*ball_pos), Vec2(*ball_vel), tuple(players), playmode)
