"""Command-line entry point: extract, train, eval, assign.

Exit codes: 0 ok, 2 unreadable or malformed input, 3 nothing extracted,
4 feature-size mismatch between model and data.
"""
from __future__ import annotations

import argparse
import concurrent.futures
import logging
import os
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from passcast import dataset as ds_io
from passcast import mlp
from passcast.defense import DefenseConfig, plan_defense
from passcast.features import Level
from passcast.geometry import PLAY_ON, FieldSpec, Side, Snapshot, dist
from passcast.labeler import extract_pass_events, possession
from passcast.rcg import ParseError, parse_show, read_log, scan_sexpr

log = logging.getLogger("passcast")

EXIT_IO = 2
EXIT_EMPTY = 3
EXIT_SHAPE = 4


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _seed(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get("PASSCAST_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise CliError(EXIT_IO, f"PASSCAST_SEED is not an integer: {env!r}") from None


# --- extract ---------------------------------------------------------------


def _log_files(paths: Sequence[str]) -> list[Path]:
    files: list[Path] = []
    for raw in paths:
        p = Path(raw)
        if p.is_dir():
            files.extend(sorted(f for f in p.iterdir() if f.is_file() and ".rcg" in f.name))
        elif p.is_file():
            files.append(p)
        else:
            raise CliError(EXIT_IO, f"cannot read {raw}: no such file or directory")
    return files


def _events_from_file(path: Path, lenient: bool, field: FieldSpec, window: int, set_plays: bool):
    parsed = read_log(path, lenient=lenient)
    events = extract_pass_events(parsed, field, window, include_set_plays=set_plays)
    return events, len(parsed.warnings)


def cmd_extract(args) -> int:
    field = FieldSpec(kickable_dist=args.kickable)
    files = _log_files(args.paths)
    work = [(f, args.lenient, field, args.window, args.set_plays) for f in files]
    try:
        if args.jobs > 1 and len(files) > 1:
            with concurrent.futures.ProcessPoolExecutor(args.jobs) as pool:
                results = list(pool.map(_events_from_file, *zip(*work)))
        else:
            results = [_events_from_file(*w) for w in work]
    except (OSError, EOFError) as exc:
        raise CliError(EXIT_IO, f"cannot read log: {exc}") from None
    except ParseError as exc:
        raise CliError(EXIT_IO, f"malformed log: {exc}") from None

    for f, (evs, warn) in zip(files, results):
        log.info("%s: %d events, %d warnings", f, len(evs), warn)
    events = [e for evs, _ in results for e in evs]
    n_warn = sum(w for _, w in results)
    print(f"logs {len(files)}, events {len(events)}, rows {len(events)}, warnings {n_warn}")
    if not events:
        print("no pass events found", file=sys.stderr)
        return EXIT_EMPTY
    data = ds_io.from_events(events, args.level, field)
    try:
        ds_io.write_dataset(data, args.out, field)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {args.out}: {exc}") from None
    return 0


# --- train / eval -------------------------------------------------------------


def _read_dataset(path: str) -> ds_io.Dataset:
    try:
        return ds_io.read_dataset(path)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read dataset {path}: {exc}") from None
    except ds_io.DatasetFormatError as exc:
        raise CliError(EXIT_IO, f"malformed dataset {path}: {exc}") from None


def _read_model(path: str) -> mlp.Model:
    try:
        return mlp.load(path)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read model {path}: {exc}") from None
    except mlp.ModelFormatError as exc:
        raise CliError(EXIT_IO, f"malformed model {path}: {exc}") from None


def _parse_layers(text: str | None, n_inputs: int) -> list[int]:
    if not text:
        return [n_inputs, 64, 11]
    try:
        sizes = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise CliError(EXIT_IO, f"bad --layers value {text!r}") from None
    if len(sizes) < 2 or sizes[-1] != 11 or any(s <= 0 for s in sizes):
        raise CliError(EXIT_SHAPE, f"--layers must run from the input size to 11 outputs, got {text!r}")
    if sizes[0] != n_inputs:
        raise CliError(EXIT_SHAPE, f"--layers expects {sizes[0]} inputs but the dataset has {n_inputs} features")
    return sizes


def cmd_train(args) -> int:
    data = _read_dataset(args.dataset)
    if len(data) == 0:
        raise CliError(EXIT_EMPTY, "dataset has no rows")
    sizes = _parse_layers(args.layers, data.level.dim)
    cfg = mlp.TrainConfig(
        learning_rate=args.lr,
        batch_size=args.batch,
        epochs=args.epochs,
        seed=_seed(args.seed),
        validation_fraction=args.val_fraction,
    )
    model, history = mlp.train(data.X, data.y, sizes, cfg)
    history_path = args.history_out or str(Path(args.model_out).with_name("history.csv"))
    try:
        mlp.save(model, args.model_out)
        with open(history_path, "w", encoding="ascii", newline="") as fh:
            fh.write(history.to_csv())
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write output: {exc}") from None

    _, va = mlp.split_indices(len(data), cfg.validation_fraction, cfg.seed)
    rows = va if len(va) else np.arange(len(data))
    split = "validation" if len(va) else "training (no validation split)"
    print(f"level {data.level.value}, layers {','.join(map(str, sizes))}, seed {cfg.seed}")
    print(f"split {len(data) - len(va)} train / {len(va)} validation (fraction {cfg.validation_fraction})")
    print(f"metrics on {split} rows:")
    print(ds_io.evaluate(model, data.X[rows], data.y[rows]).format())
    return 0


def cmd_eval(args) -> int:
    model = _read_model(args.model)
    data = _read_dataset(args.dataset)
    if model.n_inputs != data.level.dim:
        raise CliError(
            EXIT_SHAPE,
            f"model takes {model.n_inputs} inputs but dataset level {data.level.value} has {data.level.dim}",
        )
    print(ds_io.evaluate(model, data.X, data.y).format())
    return 0


# --- assign -------------------------------------------------------------------


def read_state(path: str) -> Snapshot:
    """One show line (same grammar as the game log) describing a single cycle."""
    try:
        text = Path(path).read_text(encoding="utf-8", errors="replace")
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read state {path}: {exc}") from None
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith(("#", "ULG"))]
    shows = [ln for ln in lines if ln.startswith("(show")]
    if len(shows) != 1:
        raise CliError(EXIT_IO, f"state file must hold exactly one show line, found {len(shows)}")
    try:
        return parse_show(scan_sexpr(shows[0]), PLAY_ON)
    except ParseError as exc:
        raise CliError(EXIT_IO, f"malformed state: {exc}") from None


def _attacking_side(s: Snapshot, field: FieldSpec) -> Side:
    holder = possession(s, field)
    if holder is not None:
        return holder[0]
    nearest = min(s.players, key=lambda p: (dist(p.pos, s.ball_pos), p.side is Side.RIGHT, p.unum))
    return nearest.side


def _defenders(text: str | None) -> list[int] | None:
    if text is None:
        return None
    try:
        unums = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise CliError(EXIT_IO, f"bad --defenders value {text!r}") from None
    if any(not 1 <= u <= 11 for u in unums):
        raise CliError(EXIT_IO, "--defenders must list unums 1..11")
    return unums


def cmd_assign(args) -> int:
    field = FieldSpec(kickable_dist=args.kickable)
    state = read_state(args.state)
    model = _read_model(args.model)
    if model.n_inputs != Level.HIGH.dim:
        raise CliError(EXIT_SHAPE, f"threat scoring needs a {Level.HIGH.dim}-input model, got {model.n_inputs}")
    if args.side == "auto":
        defending = _attacking_side(state, field).other
    else:
        defending = Side.parse(args.side)
    cfg = DefenseConfig(
        goal_radius=args.goal_radius,
        block_dist=args.block_dist,
        threat_floor=args.threat_floor,
        exclude_goalie=not args.include_goalie,
    )
    plan = plan_defense(state, model, defending, _defenders(args.defenders), field, cfg)
    lines = plan.lines()
    if not lines:
        print("no assignments")
    for line in lines:
        print(line)
    return 0


# --- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="passcast", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="game logs -> labelled dataset CSV")
    p.add_argument("paths", nargs="*", help="log files or directories of *.rcg[.gz]")
    p.add_argument("--level", choices=[lv.value for lv in Level], default="high")
    p.add_argument("--out", "-o", required=True)
    p.add_argument("--window", type=int, default=100)
    p.add_argument("--kickable", type=float, default=1.085)
    p.add_argument("--lenient", dest="lenient", action="store_true", default=True)
    p.add_argument("--strict", dest="lenient", action="store_false")
    p.add_argument("--set-plays", action="store_true", help="also label passes from free kicks, kick-ins, ...")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train", help="train the receiver network on a dataset")
    p.add_argument("dataset")
    p.add_argument("--model-out", required=True)
    p.add_argument("--history-out", help="per-epoch CSV (default: history.csv beside the model)")
    p.add_argument("--layers", help="comma-separated sizes, input first, e.g. 385,64,11")
    p.add_argument("--seed", type=int, default=None, help="default: $PASSCAST_SEED or 0")
    p.add_argument("--lr", type=float, default=0.01)
    p.add_argument("--batch", type=int, default=32)
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--val-fraction", type=float, default=0.2)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="top-1/top-2 accuracy of a model on a dataset")
    p.add_argument("model")
    p.add_argument("dataset")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("assign", help="greedy mark/block plan for one world state")
    p.add_argument("state", help="file holding one (show ...) line")
    p.add_argument("model", help="high-level (385-input) model file")
    p.add_argument("--side", choices=["auto", "l", "r"], default="auto", help="our (defending) side")
    p.add_argument("--defenders", help="comma-separated unums; empty string for none")
    p.add_argument("--include-goalie", action="store_true")
    p.add_argument("--threat-floor", type=float, default=0.0)
    p.add_argument("--block-dist", type=float, default=2.5)
    p.add_argument("--goal-radius", type=float, default=40.0)
    p.add_argument("--kickable", type=float, default=1.085)
    p.set_defaults(func=cmd_assign)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"passcast: {exc}", file=sys.stderr)
        return exc.code
    except mlp.DimensionMismatch as exc:
        print(f"passcast: {exc}", file=sys.stderr)
        return EXIT_SHAPE


if __name__ == "__main__":
    sys.exit(main())
