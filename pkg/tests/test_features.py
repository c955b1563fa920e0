import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from passcast.features import (
    HIGH_BLOCKS,
    LEVEL_DIMS,
    LOW_BLOCKS,
    MID_BLOCKS,
    EmptyGroup,
    Level,
    extract,
    feature_names,
    free_angle,
    min_dist_to_group,
)
from passcast.geometry import FieldSpec, Side, Vec2, angle_deg, dist, mirror

from conftest import snapshots, spread_snapshot

# Per-row dimensions of the published feature table.
TABLE_ROWS = {
    "ball position": (2, "low"),
    "ball velocity": (2, "low"),
    "player positions": (44, "low"),
    "player velocities": (44, "low"),
    "ball to important points, distance": (9, "mid"),
    "ball to important points, angle": (9, "mid"),
    "ball to players, distance": (22, "mid"),
    "ball to players, angle": (22, "mid"),
    "free angle ball to teammate": (11, "high"),
    "players to important points, distance": (198, "mid"),
    "min distance to teammate": (11, "high"),
    "min distance to opponent": (11, "high"),
}


def reference_features(s, level, field=FieldSpec()):
    """Element-by-element construction from the documented layout."""
    mates, opps = s.team(Side.LEFT), s.team(Side.RIGHT)
    everyone = mates + opps
    out = [s.ball_pos.x / 52.5, s.ball_pos.y / 34.0, s.ball_vel.x / 3.0, s.ball_vel.y / 3.0]
    for p in everyone:
        out += [p.pos.x / 52.5, p.pos.y / 34.0]
    for p in everyone:
        out += [p.vel.x / 3.0, p.vel.y / 3.0]
    if level == "low":
        return np.array(out)

    def ang(a, b):
        return 0.0 if a == b else angle_deg(a, b) / 180.0

    pts = field.important_points
    out += [dist(s.ball_pos, q) / 130.0 for q in pts]
    out += [ang(s.ball_pos, q) for q in pts]
    out += [dist(s.ball_pos, p.pos) / 130.0 for p in everyone]
    out += [ang(s.ball_pos, p.pos) for p in everyone]
    for p in everyone:
        out += [dist(p.pos, q) / 130.0 for q in pts]
    if level == "mid":
        return np.array(out)
    for p in mates:
        out.append(0.0 if p.pos == s.ball_pos else free_angle(s.ball_pos, p.pos, [o.pos for o in opps]) / 180.0)
    for p in mates:
        out.append(min(dist(p.pos, q.pos) for q in mates if q.unum != p.unum) / 130.0)
    for p in mates:
        out.append(min(dist(p.pos, q.pos) for q in opps) / 130.0)
    return np.array(out)


def test_dimension_identities_match_table():
    low = sum(n for n, lv in TABLE_ROWS.values() if lv == "low")
    mid = low + sum(n for n, lv in TABLE_ROWS.values() if lv == "mid")
    high = mid + sum(n for n, lv in TABLE_ROWS.values() if lv == "high")
    assert (low, mid, high) == (92, 352, 385)
    assert 2 + 2 + 44 + 44 == 92
    assert 92 + 9 + 9 + 22 + 22 + 198 == 352
    assert 352 + 11 + 11 + 11 == 385
    assert [n for _, n in LOW_BLOCKS] == [2, 2, 44, 44]
    assert [n for _, n in MID_BLOCKS] == [9, 9, 22, 22, 198]
    assert [n for _, n in HIGH_BLOCKS] == [11, 11, 11]
    assert {lv.value: d for lv, d in LEVEL_DIMS.items()} == {"low": 92, "mid": 352, "high": 385}


@pytest.mark.parametrize("level, dim", [("low", 92), ("mid", 352), ("high", 385)])
def test_lengths(level, dim, random_snaps):
    for s in random_snaps[:5]:
        assert extract(s, level).shape == (dim,)
    assert len(feature_names(level)) == dim


@settings(max_examples=40, deadline=None)
@given(snapshots())
def test_levels_are_prefixes_and_match_reference(s):
    low, mid, high = (extract(s, lv) for lv in ("low", "mid", "high"))
    assert np.array_equal(mid[:92], low)
    assert np.array_equal(high[:352], mid)
    np.testing.assert_allclose(high, reference_features(s, "high"), rtol=0, atol=1e-12)
    assert np.all(np.isfinite(high))
    assert np.all(np.abs(high) <= 1.5)


def test_center_landmark_distance_is_zero():
    s = spread_snapshot(ball=(0.0, 0.0))
    f = extract(s, "mid")
    names = feature_names("mid")
    k = names.index("ball_dist_p3")
    assert k == 92 + 2
    assert f[k] == 0.0
    assert f[names.index("ball_angle_p3")] == 0.0  # coincident -> 0 by convention


def test_mirror_then_canonicalize_is_identity():
    s = spread_snapshot(ball=(0.0, 0.0))
    assert np.array_equal(extract(mirror(mirror(s)), "high"), extract(s, "high"))


def test_free_angle_examples():
    ball, mate = Vec2(0, 0), Vec2(10, 0)
    assert free_angle(ball, mate, [Vec2(20, 0), Vec2(-30, 5)]) == 180.0
    assert free_angle(ball, mate, [Vec2(5, 0)]) == 0.0
    assert free_angle(ball, mate, [Vec2(5, 5)]) == pytest.approx(45.0, abs=1e-12)
    # an opponent level with the teammate still qualifies
    assert free_angle(ball, mate, [Vec2(0, 10)]) == pytest.approx(90.0)


def test_free_angle_across_the_seam():
    # teammate just above the -x axis, opponent just below it: the gap is
    # the sum of the two small angles, not 360 minus it
    a_mate = np.degrees(np.arctan2(0.5, 10))
    a_opp = np.degrees(np.arctan2(0.5, 5))
    got = free_angle(Vec2(0, 0), Vec2(-10, 0.5), [Vec2(-5, -0.5)])
    assert got == pytest.approx(a_mate + a_opp, abs=1e-9)


def test_min_dist_examples():
    assert min_dist_to_group(Vec2(0, 0), [Vec2(3, 4)]) == 5.0
    assert min_dist_to_group(Vec2(0, 0), [Vec2(1, 0), Vec2(0, 2)]) == 1.0
    with pytest.raises(EmptyGroup):
        min_dist_to_group(Vec2(0, 0), [])


def test_teammate_min_distance_excludes_self():
    s = spread_snapshot(l5=(0.0, 0.0), l6=(2.0, 0.0))
    f = extract(s, "high")
    names = feature_names("high")
    assert f[names.index("t5_min_dist_teammate")] == pytest.approx(2.0 / 130.0)
    # the grid spacing is 3 m for everyone else, never 0
    assert f[names.index("t1_min_dist_teammate")] == pytest.approx(3.0 / 130.0)


small = st.floats(-0.5, 0.5)


@given(
    st.floats(-30, 30), st.floats(-20, 20), st.floats(-30, 30), st.floats(-20, 20),
    st.lists(st.tuples(st.floats(-30, 30), st.floats(-20, 20)), min_size=1, max_size=11),
    small, small,
)
def test_free_angle_translation_invariance(bx, by, tx, ty, opps, dx, dy):
    ball, mate = Vec2(bx, by), Vec2(tx, ty)
    assume(dist(ball, mate) > 1e-3)
    opps = [Vec2(*o) for o in opps]
    assume(all(abs(dist(ball, o) - dist(ball, mate)) > 1e-6 and dist(ball, o) > 1e-6 for o in opps))
    shift = Vec2(dx, dy)
    moved = free_angle(ball + shift, mate + shift, [o + shift for o in opps])
    assert moved == pytest.approx(free_angle(ball, mate, opps), abs=1e-7)


def test_level_parse():
    assert Level.parse("HIGH") is Level.HIGH
    with pytest.raises(ValueError):
        Level.parse("ultra")
