"""Opponent threat scoring and greedy mark/block assignment.

All positions are taken in the defensive frame: the attacking team plays
Left toward +x, so the goal we defend sits at (+half_length, 0). This is
exactly the attacker-canonical frame produced for the predictor, which lets
one snapshot feed both the network and the scoring.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from passcast.features import Level, extract
from passcast.geometry import FieldSpec, PlayerState, Side, Snapshot, Vec2, canonicalize, dist
from passcast.mlp import DimensionMismatch, Model, forward


class UnknownPlayer(KeyError):
    pass


class Task(enum.Enum):
    MARK = "mark"
    BLOCK = "block"


@dataclass(frozen=True)
class DefenseConfig:
    goal_radius: float = 40.0    # distance inside which closeness to goal adds threat
    clamp_at_zero: bool = True
    block_dist: float = 2.5
    threat_floor: float = 0.0
    exclude_goalie: bool = True


@dataclass(frozen=True)
class ThreatScore:
    unum: int
    base: float
    final: float


@dataclass(frozen=True)
class Assignment:
    teammate: int
    opponent: int
    task: Task
    pair_score: float
    threat: float


@dataclass
class AssignmentPlan:
    entries: list[Assignment] = field(default_factory=list)
    unassigned_teammates: list[int] = field(default_factory=list)
    unassigned_opponents: list[int] = field(default_factory=list)

    def lines(self) -> list[str]:
        return [
            f"teammate {a.teammate} -> {a.task.value} opponent {a.opponent} "
            f"(threat {a.threat:.4f}, pair {a.pair_score:.4f})"
            for a in self.entries
        ]


def defended_goal(field: FieldSpec = FieldSpec()) -> Vec2:
    return Vec2(field.half_length, 0.0)


def threat_base(pos: Vec2, field: FieldSpec = FieldSpec(), cfg: DefenseConfig = DefenseConfig()) -> float:
    closeness = cfg.goal_radius - dist(pos, defended_goal(field))
    if cfg.clamp_at_zero:
        closeness = max(0.0, closeness)
    return pos.x + closeness


def opponent_score(
    s: Snapshot,
    unum: int,
    p: float,
    attacking: Side = Side.LEFT,
    field: FieldSpec = FieldSpec(),
    cfg: DefenseConfig = DefenseConfig(),
) -> ThreatScore:
    """Threat of attacker ``unum``: x plus goal closeness, scaled by (1 + p).

    ``s`` must already be in the defensive frame with the attackers on
    ``attacking`` (Left for a canonicalized snapshot).
    """
    if not 1 <= unum <= 11:
        raise UnknownPlayer(unum)
    opp = s.player(attacking, unum)
    base = threat_base(opp.pos, field, cfg)
    return ThreatScore(unum, base, base * (1.0 + p))


def block_point(opponent: Vec2, field: FieldSpec = FieldSpec(), block_dist: float = 2.5) -> Vec2:
    goal = defended_goal(field)
    length = dist(opponent, goal)
    if length == 0.0:
        return goal
    step = min(block_dist, length) / length
    return Vec2(opponent.x + (goal.x - opponent.x) * step, opponent.y + (goal.y - opponent.y) * step)


def pair_score(
    teammate: PlayerState,
    opponent: PlayerState,
    task: Task,
    field: FieldSpec = FieldSpec(),
    block_dist: float = 2.5,
) -> float:
    """Higher is better; negative travel distance to the mark or block spot."""
    if task is Task.MARK:
        return -dist(teammate.pos, opponent.pos)
    return -dist(teammate.pos, block_point(opponent.pos, field, block_dist))


def pair_table(
    teammates: Sequence[PlayerState],
    opponents: Sequence[PlayerState],
    field: FieldSpec = FieldSpec(),
    block_dist: float = 2.5,
) -> dict[tuple[int, int], tuple[float, float]]:
    """(teammate unum, opponent unum) -> (mark score, block score)."""
    return {
        (t.unum, o.unum): (
            pair_score(t, o, Task.MARK, field, block_dist),
            pair_score(t, o, Task.BLOCK, field, block_dist),
        )
        for t in teammates
        for o in opponents
    }


def greedy_assign(
    threats: Iterable[ThreatScore],
    teammates: Iterable[int],
    pairs: Mapping[tuple[int, int], tuple[float, float]],
    threat_floor: float = 0.0,
) -> AssignmentPlan:
    """Repeatedly give the most threatening free opponent its best free defender.

    Ties: higher threat first, then lower opponent unum; among defenders the
    higher pair score, then lower unum; Mark wins a mark/block tie.
    """
    pool_o = sorted(threats, key=lambda t: (-t.final, t.unum))
    pool_t = sorted(set(teammates))
    plan = AssignmentPlan()
    while pool_o and pool_t:
        threat = pool_o[0]
        if threat.final <= threat_floor:
            break
        best = None
        for u in pool_t:
            mark, block = pairs[(u, threat.unum)]
            task, score = (Task.MARK, mark) if mark >= block else (Task.BLOCK, block)
            if best is None or score > best[2]:
                best = (u, task, score)
        u, task, score = best
        plan.entries.append(Assignment(u, threat.unum, task, score, threat.final))
        pool_o.pop(0)
        pool_t.remove(u)
    plan.unassigned_teammates = pool_t
    plan.unassigned_opponents = sorted(t.unum for t in pool_o)
    return plan


def score_all(
    s: Snapshot,
    model: Optional[Model],
    attacking: Side,
    field: FieldSpec = FieldSpec(),
    cfg: DefenseConfig = DefenseConfig(),
) -> tuple[list[ThreatScore], np.ndarray]:
    """Threat scores for all 11 attackers and the receiver probabilities used.

    ``s`` may be in any frame; it is canonicalized so ``attacking`` plays Left.
    With ``model=None`` every probability is zero (pure positional threat).
    """
    canon = canonicalize(s, attacking)
    if model is None:
        probs = np.zeros(11)
    else:
        if model.n_inputs != Level.HIGH.dim:
            raise DimensionMismatch(f"threat scoring needs a {Level.HIGH.dim}-input model, got {model.n_inputs}")
        probs = forward(model, extract(canon, Level.HIGH, field))
    scores = [opponent_score(canon, u, float(probs[u - 1]), Side.LEFT, field, cfg) for u in range(1, 12)]
    return scores, probs


def plan_defense(
    s: Snapshot,
    model: Optional[Model],
    defending: Side,
    defenders: Optional[Sequence[int]] = None,
    field: FieldSpec = FieldSpec(),
    cfg: DefenseConfig = DefenseConfig(),
) -> AssignmentPlan:
    """Score the attackers of ``s`` and assign ``defending`` players to them."""
    attacking = defending.other
    threats, _ = score_all(s, model, attacking, field, cfg)
    canon = canonicalize(s, attacking)
    if defenders is None:
        defenders = [u for u in range(1, 12) if not (cfg.exclude_goalie and u == 1)]
    ours = [canon.player(Side.RIGHT, u) for u in defenders]
    theirs = list(canon.team(Side.LEFT))
    pairs = pair_table(ours, theirs, field, cfg.block_dist)
    return greedy_assign(threats, [p.unum for p in ours], pairs, cfg.threat_floor)


__all__ = [
    "Task",
    "DefenseConfig",
    "ThreatScore",
    "Assignment",
    "AssignmentPlan",
    "UnknownPlayer",
    "threat_base",
    "opponent_score",
    "block_point",
    "pair_score",
    "pair_table",
    "greedy_assign",
    "score_all",
    "plan_defense",
]
