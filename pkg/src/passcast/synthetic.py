"""Synthetic logs and snapshots with known ground truth.

``scripted_log`` builds a 300-cycle game with five planted passes, one
interception, one out-of-play stoppage and one abandoned ball. The policy
generators produce canonical snapshots labelled by a fixed passing rule,
which a correctly working pipeline must be able to learn.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from passcast.features import free_angle
from passcast.geometry import (
    PLAY_ON,
    FieldSpec,
    PlayerState,
    Side,
    Snapshot,
    Vec2,
    dist,
)
from passcast.labeler import possession
from passcast.mlp import make_rng
from passcast.rcg import format_log

L, R = Side.LEFT, Side.RIGHT

_LEFT_POS = {
    1: (-50.0, 0.0), 2: (-30.0, -20.0), 3: (-30.0, 20.0), 4: (-35.0, -5.0),
    5: (-35.0, 5.0), 6: (-10.0, -10.0), 7: (-10.0, 25.0), 8: (5.0, 20.0),
    9: (10.0, -15.0), 10: (25.0, -5.0), 11: (35.0, 15.0),
}
_RIGHT_POS = {
    1: (50.0, 0.0), 2: (30.0, 5.0), 3: (40.0, -20.0), 4: (42.0, -8.0),
    5: (12.0, 26.0), 6: (20.0, -25.0), 7: (0.0, 0.0), 8: (-20.0, 10.0),
    9: (-15.0, -25.0), 10: (-25.0, 30.0), 11: (-40.0, -28.0),
}


@dataclass(frozen=True)
class PlantedPass:
    kick_cycle: int
    kicker: tuple[Side, int]
    receiver_unum: int
    receive_cycle: int


# Ground truth for scripted_log().
PLANTED_PASSES = (
    PlantedPass(10, (L, 6), 9, 21),
    PlantedPass(30, (L, 9), 10, 41),
    PlantedPass(80, (R, 2), 5, 91),
    PlantedPass(125, (L, 7), 8, 134),
    PlantedPass(150, (L, 8), 11, 166),
)


def _pos(side: Side, unum: int) -> Vec2:
    return Vec2(*(_LEFT_POS if side is L else _RIGHT_POS)[unum])


def _hold_point(side: Side, unum: int, toward: Vec2) -> Vec2:
    p = _pos(side, unum)
    d = dist(p, toward)
    return Vec2(p.x + 0.5 * (toward.x - p.x) / d, p.y + 0.5 * (toward.y - p.y) / d)


def _script() -> list[tuple]:
    # (first cycle, last cycle, kind, args)
    l6 = _hold_point(L, 6, _pos(L, 9))
    l9 = _hold_point(L, 9, _pos(L, 10))
    l10 = _hold_point(L, 10, _pos(L, 11))
    r2 = _hold_point(R, 2, _pos(R, 5))
    r5 = _hold_point(R, 5, Vec2(12.0, 36.0))
    l7 = _hold_point(L, 7, _pos(L, 8))
    l8 = _hold_point(L, 8, _pos(L, 11))
    l11 = _hold_point(L, 11, Vec2(45.0, 30.0))
    return [
        (1, 10, "rest", l6),
        (11, 20, "fly", l6, l9),
        (21, 30, "rest", l9),
        (31, 40, "fly", l9, l10),
        (41, 55, "rest", l10),
        (56, 62, "fly", l10, r2),          # intercepted by Right 2
        (63, 80, "rest", r2),
        (81, 90, "fly", r2, r5),
        (91, 100, "rest", r5),
        (101, 110, "fly", r5, Vec2(12.0, 36.0)),  # over the touch line
        (111, 125, "rest", l7),            # kick-in taken by Left 7
        (126, 133, "fly", l7, l8),
        (134, 150, "rest", l8),
        (151, 165, "fly", l8, l11),
        (166, 175, "rest", l11),
        (176, 185, "fly", l11, Vec2(45.0, 30.0)),
        (186, 300, "rest", Vec2(45.0, 30.0)),  # nobody comes for it
    ]


def _playmode(cycle: int) -> str:
    return "kick_in_l" if 111 <= cycle <= 120 else PLAY_ON


def scripted_snapshots() -> list[Snapshot]:
    players = tuple(PlayerState(L, u, Vec2(*xy)) for u, xy in _LEFT_POS.items()) + tuple(
        PlayerState(R, u, Vec2(*xy)) for u, xy in _RIGHT_POS.items()
    )
    out = []
    for first, last, kind, *args in _script():
        span = last - first + 2
        for c in range(first, last + 1):
            if kind == "rest":
                ball, vel = args[0], Vec2(0.0, 0.0)
            else:
                a, b = args
                step = Vec2((b.x - a.x) / span, (b.y - a.y) / span)
                k = c - first + 1
                ball, vel = Vec2(a.x + step.x * k, a.y + step.y * k), step
            out.append(Snapshot(c, ball, vel, players, _playmode(c)))
    return out


def scripted_log() -> str:
    """Text of the 300-cycle synthetic game log (v5 format)."""
    return format_log(scripted_snapshots(), ("SynthLeft", "SynthRight"))


def scripted_possession() -> dict[int, tuple[Side, int] | None]:
    """Intended ball holder per cycle, used to validate the script geometry."""
    holders: dict[int, tuple[Side, int] | None] = {c: None for c in range(1, 301)}
    spans = {
        (L, 6): (1, 10), (L, 9): (21, 30), (L, 10): (41, 55), (R, 2): (63, 80),
        (R, 5): (91, 100), (L, 7): (111, 125), (L, 8): (134, 150), (L, 11): (166, 175),
    }
    for who, (a, b) in spans.items():
        for c in range(a, b + 1):
            holders[c] = who
    return holders


# --- policy-labelled snapshots -------------------------------------------------

Policy = Callable[[Snapshot, int], int]


def most_advanced_policy(s: Snapshot, kicker: int) -> int:
    """Receiver = the teammate (not the kicker) with the largest x."""
    mates = [p for p in s.team(L) if p.unum != kicker]
    return max(mates, key=lambda p: (p.pos.x, -p.unum)).unum


def _free_angles(s: Snapshot, kicker: int) -> dict[int, float]:
    opps = [p.pos for p in s.team(R)]
    return {p.unum: free_angle(s.ball_pos, p.pos, opps) for p in s.team(L) if p.unum != kicker}


def _pick_widest(s: Snapshot, angles: dict[int, float]) -> int:
    return max(angles, key=lambda u: (angles[u], -dist(s.ball_pos, s.player(L, u).pos), -u))


def free_angle_policy(s: Snapshot, kicker: int) -> int:
    """Receiver = teammate with the widest free angle; ties go to the nearest."""
    return _pick_widest(s, _free_angles(s, kicker))


def random_snapshot(
    rng: np.random.Generator,
    fs: FieldSpec = FieldSpec(),
    cycle: int = 0,
    spacing: float = 0.0,
) -> tuple[Snapshot, int]:
    """A play_on snapshot in canonical frame with a random Left kicker on the ball.

    Teammates of the kicker are redrawn until they stand at least
    ``spacing`` meters from the ball.
    """
    kicker = int(rng.integers(2, 12))
    half = np.array([fs.half_length, fs.half_width])
    pos = rng.uniform(-1.0, 1.0, size=(22, 2)) * half
    pos[0] = (-50.0, rng.uniform(-5.0, 5.0))   # goalkeepers stay home
    pos[11] = (50.0, rng.uniform(-5.0, 5.0))
    vel = rng.uniform(-0.5, 0.5, size=(22, 2))
    theta = rng.uniform(-math.pi, math.pi)
    ball = pos[kicker - 1] + 0.5 * np.array([math.cos(theta), math.sin(theta)])
    ball = np.clip(ball, [-59.0, -39.0], [59.0, 39.0])
    for i in range(1, 11):
        if i == kicker - 1:
            continue
        while np.hypot(*(pos[i] - ball)) < spacing:
            pos[i] = rng.uniform(-1.0, 1.0, size=2) * half
    players = tuple(
        PlayerState(L if i < 11 else R, i % 11 + 1, Vec2(float(pos[i, 0]), float(pos[i, 1])),
                    Vec2(float(vel[i, 0]), float(vel[i, 1])))
        for i in range(22)
    )
    bv = rng.uniform(-1.0, 1.0, size=2)
    s = Snapshot(cycle, Vec2(float(ball[0]), float(ball[1])), Vec2(float(bv[0]), float(bv[1])), players, PLAY_ON)
    return s, kicker


def _labelled(s: Snapshot, kicker: int, policy: Policy, margin: float) -> int | None:
    # label, or None when the rule's decision is closer than ``margin``
    if possession(s) != (L, kicker):
        return None
    if policy is most_advanced_policy:
        xs = sorted((p.pos.x for p in s.team(L) if p.unum != kicker), reverse=True)
        if xs[0] - xs[1] < margin or xs[0] <= s.player(L, kicker).pos.x:
            return None
        return policy(s, kicker)
    if policy is free_angle_policy:
        angles = _free_angles(s, kicker)
        fa = sorted(angles.values(), reverse=True)
        if fa[0] - fa[1] < margin:
            return None
        return _pick_widest(s, angles)
    return policy(s, kicker)


def policy_dataset(
    n: int,
    policy: Policy,
    seed: int = 0,
    margin: float = 0.0,
    spacing: float = 0.0,
    fs: FieldSpec = FieldSpec(),
) -> tuple[list[Snapshot], np.ndarray]:
    """``n`` random canonical snapshots labelled by ``policy``.

    Snapshots whose decision is closer than ``margin`` (meters of x for the
    positional rule, degrees for the free-angle rule) are redrawn, so the
    labelling rule is unambiguous on every kept sample. For the positional
    rule the kicker is also never the most advanced player.
    """
    rng = make_rng(seed)
    snaps, labels = [], []
    while len(snaps) < n:
        s, kicker = random_snapshot(rng, fs, cycle=len(snaps), spacing=spacing)
        label = _labelled(s, kicker, policy, margin)
        if label is None:
            continue
        snaps.append(s)
        labels.append(label)
    return snaps, np.array(labels, dtype=int)
