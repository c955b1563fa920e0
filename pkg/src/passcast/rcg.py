"""Reader for text game logs (``.rcg`` versions 4 and 5).

Only ``(show ...)``, ``(playmode ...)`` and ``(team ...)`` lines carry data
we use; parameter and drawing lines are skipped silently, anything else is
reported as a warning.
"""
from __future__ import annotations

import gzip
import io
import os
import re
from dataclasses import dataclass, field
from typing import IO, Iterable, Union

from passcast.geometry import (
    BEFORE_KICK_OFF,
    PlayerState,
    Side,
    Snapshot,
    Vec2,
)

__all__ = [
    "ParseError",
    "MalformedFrame",
    "ParsedLog",
    "scan_sexpr",
    "parse_show",
    "parse_log",
    "read_log",
    "format_show",
]

Tree = list


class ParseError(ValueError):
    def __init__(self, message: str, line_no: int | None = None, offset: int | None = None):
        self.message = message
        self.line_no = line_no
        self.offset = offset
        where = ""
        if line_no is not None:
            where = f"line {line_no}"
            if offset is not None:
                where += f", byte {offset}"
            where += ": "
        super().__init__(where + message)


class MalformedFrame(ParseError):
    """A show frame that is well formed as text but not a valid world state."""


_TOKEN = re.compile(r"\(|\)|[^\s()]+")
_HEAD = re.compile(r"\(\s*([^\s()]*)")

# Lines we recognise but deliberately ignore.
_IGNORED_HEADS = frozenset(
    {"msg", "draw", "server_param", "player_param", "player_type", "frame"}
)


def scan_sexpr(text: str) -> Tree:
    """Parse one parenthesised expression into nested lists of string atoms.

    >>> scan_sexpr("(a (b c) d)")
    ['a', ['b', 'c'], 'd']
    """
    stack: list[list] = []
    result: list | None = None
    for m in _TOKEN.finditer(text):
        tok = m.group()
        if result is not None:
            raise ParseError("trailing data after expression", offset=m.start())
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if not stack:
                raise ParseError("unbalanced ')'", offset=m.start())
            done = stack.pop()
            if stack:
                stack[-1].append(done)
            else:
                result = done
        else:
            if not stack:
                raise ParseError(f"atom {tok!r} outside parentheses", offset=m.start())
            stack[-1].append(tok)
    if stack:
        raise ParseError("unbalanced '(': expression not closed", offset=len(text))
    if result is None:
        raise ParseError("empty input", offset=0)
    return result


def _num(atom) -> float:
    if not isinstance(atom, str):
        raise ParseError(f"expected number, got group {atom!r}")
    try:
        return float(atom)
    except ValueError:
        raise ParseError(f"expected number, got {atom!r}") from None


def _parse_player(group) -> PlayerState:
    # ((side unum) type state x y vx vy body neck [px py] (v ..) (s ..) [(f ..)] (c ..))
    if not isinstance(group, list) or len(group) < 7:
        raise ParseError(f"short player group {group!r}")
    ident = group[0]
    if not isinstance(ident, list) or len(ident) != 2 or not all(isinstance(t, str) for t in ident):
        raise ParseError(f"bad player id {ident!r}")
    try:
        side = Side.parse(ident[0])
        unum = int(ident[1])
    except ValueError as exc:
        raise ParseError(f"bad player id {ident!r}") from exc
    x, y, vx, vy = (_num(a) for a in group[3:7])
    try:
        return PlayerState(side, unum, Vec2(x, y), Vec2(vx, vy))
    except ValueError as exc:
        raise MalformedFrame(str(exc)) from exc


def parse_show(tree: Tree, playmode: str = BEFORE_KICK_OFF) -> Snapshot:
    """Build a Snapshot from an already scanned ``(show ...)`` expression."""
    if len(tree) < 3 or tree[0] != "show":
        raise ParseError("not a show expression")
    try:
        cycle = int(tree[1])
    except (TypeError, ValueError):
        raise ParseError(f"bad cycle {tree[1]!r}") from None
    ball = tree[2]
    if not (isinstance(ball, list) and len(ball) == 5 and ball[0] == ["b"]):
        raise ParseError(f"bad ball group {ball!r}")
    bx, by, bvx, bvy = (_num(a) for a in ball[1:])
    players = [_parse_player(g) for g in tree[3:]]
    if len(players) != 22:
        raise MalformedFrame(f"show frame has {len(players)} players, expected 22")
    try:
        return Snapshot(cycle, Vec2(bx, by), Vec2(bvx, bvy), tuple(players), playmode)
    except ValueError as exc:
        raise MalformedFrame(str(exc)) from exc


@dataclass
class ParsedLog:
    snapshots: list[Snapshot] = field(default_factory=list)
    team_names: tuple[str, str] = ("", "")
    warnings: list[tuple[int, str]] = field(default_factory=list)


def _keep_last_per_cycle(snaps: list[Snapshot]) -> list[Snapshot]:
    # Stopped-clock frames repeat a cycle number; the latest one wins and
    # keeps its position in the sequence.
    out: list[Snapshot] = []
    index: dict[int, int] = {}
    for s in snaps:
        if s.cycle in index:
            out[index[s.cycle]] = s
        else:
            index[s.cycle] = len(out)
            out.append(s)
    out.sort(key=lambda s: s.cycle)
    return out


def parse_log(lines: Iterable[str], lenient: bool = True) -> ParsedLog:
    """Parse a text game log given as an iterable of lines.

    In strict mode a malformed show line raises ``ParseError`` (or its
    subclass ``MalformedFrame``); in lenient mode it becomes a warning.
    """
    log = ParsedLog()
    playmode = BEFORE_KICK_OFF
    snaps: list[Snapshot] = []
    byte_pos = 0
    for line_no, raw in enumerate(lines, start=1):
        line_start = byte_pos
        byte_pos += len(raw.encode("utf-8", "surrogateescape")) if isinstance(raw, str) else len(raw)
        line = raw.strip()
        if not line:
            continue
        if line_no == 1 and line.startswith("ULG"):
            continue
        if not line.startswith("("):
            log.warnings.append((line_no, f"unrecognized line: {line[:40]!r}"))
            continue
        head = _HEAD.match(line).group(1)
        if head in _IGNORED_HEADS:
            continue
        if head not in ("show", "playmode", "team"):
            log.warnings.append((line_no, f"unrecognized line head {head!r}"))
            continue
        try:
            tree = scan_sexpr(line)
            if head == "show":
                snaps.append(parse_show(tree, playmode))
            elif head == "playmode":
                if len(tree) < 3 or not isinstance(tree[2], str):
                    raise ParseError("bad playmode line")
                playmode = tree[2]
            else:
                if len(tree) < 4 or not all(isinstance(t, str) for t in tree[2:4]):
                    raise ParseError("bad team line")
                log.team_names = (tree[2], tree[3])
        except ParseError as exc:
            if not lenient and head == "show":
                cls = type(exc)
                offset = line_start + (exc.offset or 0)
                raise cls(exc.message, line_no, offset) from exc
            log.warnings.append((line_no, exc.message))
    log.snapshots = _keep_last_per_cycle(snaps)
    return log


def open_log(path: Union[str, os.PathLike]) -> IO[str]:
    """Open a log for text reading, transparently un-gzipping by magic bytes."""
    fh = open(path, "rb")
    magic = fh.read(2)
    fh.seek(0)
    if magic == b"\x1f\x8b":
        return io.TextIOWrapper(gzip.GzipFile(fileobj=fh), encoding="utf-8", errors="replace")
    return io.TextIOWrapper(fh, encoding="utf-8", errors="replace")


def read_log(path: Union[str, os.PathLike], lenient: bool = True) -> ParsedLog:
    with open_log(path) as fh:
        return parse_log(fh, lenient=lenient)


def _f(v: float) -> str:
    return repr(float(v))


def format_show(s: Snapshot) -> str:
    """Emit a snapshot as a single v5 show line at full float precision."""
    parts = [f"(show {s.cycle} ((b) {_f(s.ball_pos.x)} {_f(s.ball_pos.y)} {_f(s.ball_vel.x)} {_f(s.ball_vel.y)})"]
    for p in s.players:
        parts.append(
            f" (({p.side.value} {p.unum}) 0 0x1 {_f(p.pos.x)} {_f(p.pos.y)} {_f(p.vel.x)} {_f(p.vel.y)}"
            " 0 0 (v h 90) (s 8000 1 1 130600) (c 0 0 0 0 0 0 0 0 0 0 0))"
        )
    parts.append(")")
    return "".join(parts)


def format_log(snapshots: Iterable[Snapshot], team_names: tuple[str, str] = ("left", "right")) -> str:
    """Emit a minimal v5 log: header, team line, playmode changes and show lines."""
    out = ["ULG5"]
    current = None
    first = True
    for s in snapshots:
        if first:
            out.append(f"(team {s.cycle} {team_names[0]} {team_names[1]} 0 0)")
            first = False
        if s.playmode != current:
            out.append(f"(playmode {s.cycle} {s.playmode})")
            current = s.playmode
        out.append(format_show(s))
    return "\n".join(out) + "\n"
