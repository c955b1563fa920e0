"""Pass detection: who released the ball, and which teammate got it next."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from passcast.geometry import (
    PLAY_ON,
    FieldSpec,
    Side,
    Snapshot,
    canonicalize,
    dist,
)
from passcast.rcg import ParsedLog

Holder = tuple[Side, int]

_SIDE_RANK = {Side.LEFT: 0, Side.RIGHT: 1}


@dataclass(frozen=True)
class PassEvent:
    kick_cycle: int
    kicker: Holder
    receiver_unum: int
    receive_cycle: int
    # World at the kick, mirrored if needed so the kicker's team is Left.
    state: Snapshot

    def __post_init__(self):
        if self.receive_cycle <= self.kick_cycle:
            raise ValueError("receive_cycle must follow kick_cycle")
        if not 1 <= self.receiver_unum <= 11:
            raise ValueError(f"receiver unum out of range: {self.receiver_unum}")


def possession(s: Snapshot, field: FieldSpec = FieldSpec()) -> Optional[Holder]:
    """The player controlling the ball, or None.

    Nearest player within kickable distance; ties go to Left, then lower unum.
    """
    best = None
    for p in s.players:
        d = dist(p.pos, s.ball_pos)
        if d > field.kickable_dist:
            continue
        key = (d, _SIDE_RANK[p.side], p.unum)
        if best is None or key < best:
            best = key
            holder = (p.side, p.unum)
    return holder if best is not None else None


def extract_pass_events(
    log: ParsedLog,
    field: FieldSpec = FieldSpec(),
    window: int = 100,
    include_set_plays: bool = False,
) -> list[PassEvent]:
    """Scan a parsed log for completed passes (including self-receptions).

    A pass starts at the last cycle of a possession run and completes at
    the first later cycle, within ``window`` cycles, where a teammate holds
    the ball. Interceptions, stoppages and expired windows yield nothing.
    With ``include_set_plays`` every non-stopped playmode counts as live.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    snaps = log.snapshots
    live = [_is_live(s.playmode, include_set_plays) for s in snaps]
    holders = [possession(s, field) if ok else None for s, ok in zip(snaps, live)]

    events = []
    n = len(snaps)
    for i in range(n - 1):
        holder = holders[i]
        if holder is None or not live[i]:
            continue
        if live[i + 1] and snaps[i + 1].cycle == snaps[i].cycle + 1 and holders[i + 1] == holder:
            continue  # run continues
        t = snaps[i].cycle
        receiver = None
        for j in range(i + 1, n):
            if snaps[j].cycle > t + window or not live[j]:
                break
            if holders[j] is not None:
                receiver = (holders[j], snaps[j].cycle)
                break
        if receiver is None:
            continue
        (side, unum), t_recv = receiver
        if side is not holder[0]:
            continue
        events.append(
            PassEvent(
                kick_cycle=t,
                kicker=holder,
                receiver_unum=unum,
                receive_cycle=t_recv,
                state=canonicalize(snaps[i], holder[0]),
            )
        )
    return events


_STOPPED = ("before_kick_off", "time_over", "goal_l", "goal_r")


def _is_live(playmode: str, include_set_plays: bool) -> bool:
    if playmode == PLAY_ON:
        return True
    return include_set_plays and playmode not in _STOPPED


def label_onehot(event: PassEvent) -> np.ndarray:
    out = np.zeros(11)
    out[event.receiver_unum - 1] = 1.0
    return out
