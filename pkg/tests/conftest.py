import pytest
from hypothesis import strategies as st

from passcast.geometry import PlayerState, Side, Snapshot, Vec2, make_snapshot
from passcast.mlp import make_rng
from passcast.synthetic import random_snapshot, scripted_log

coord_x = st.floats(-52.5, 52.5, allow_nan=False)
coord_y = st.floats(-34.0, 34.0, allow_nan=False)
speed = st.floats(-1.2, 1.2, allow_nan=False)


@st.composite
def snapshots(draw, playmode="play_on"):
    players = []
    for side in (Side.LEFT, Side.RIGHT):
        for u in range(1, 12):
            players.append(
                PlayerState(side, u, Vec2(draw(coord_x), draw(coord_y)), Vec2(draw(speed), draw(speed)))
            )
    ball = Vec2(draw(coord_x), draw(coord_y))
    ball_vel = Vec2(draw(st.floats(-3.0, 3.0)), draw(st.floats(-3.0, 3.0)))
    cycle = draw(st.integers(0, 6000))
    return Snapshot(cycle, ball, ball_vel, tuple(players), playmode)


def spread_snapshot(ball=(0.0, 0.0), cycle=0, playmode="play_on", **moves):
    """Players parked on a grid well away from the origin; ``l7=(x, y)`` moves one."""
    left = [(-40.0 + 3.0 * i, 30.0) for i in range(11)]
    right = [(-40.0 + 3.0 * i, -30.0) for i in range(11)]
    for key, xy in moves.items():
        team = left if key[0] == "l" else right
        team[int(key[1:]) - 1] = xy
    return make_snapshot(cycle, ball, left, right, playmode=playmode)


@pytest.fixture
def rng():
    return make_rng(1234)


@pytest.fixture
def random_snaps():
    r = make_rng(99)
    return [random_snapshot(r, cycle=i)[0] for i in range(50)]


@pytest.fixture(scope="session")
def scripted_log_text():
    return scripted_log()


@pytest.fixture(scope="session")
def scripted_log_path(tmp_path_factory):
    d = tmp_path_factory.mktemp("logs")
    path = d / "synthetic.rcg"
    path.write_text(scripted_log())
    return path


# Acceptance checks append (number, ok, text) here; printed after the run.
ACCEPTANCE_LINES: list[tuple[int, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, text in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {text}")
