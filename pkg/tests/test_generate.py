import math
from fractions import Fraction as F

import pytest

from fencepatrol import generate as gen
from fencepatrol.errors import PatrolError
from fencepatrol.model import UNIDIRECTIONAL, eval_trajectory, validate_schedule
from fencepatrol.numeric import harmonic_number
from fencepatrol.verify import (analyze_gaps, exact_idle, max_gap_at, visit_timeline,
                                volume_lower_bound)

from helpers import brute_idle

H = F(1, 2)


def _mod1(q):
    return q % 1


# trajectories of the six harmonic agents written out piece by piece
def _harmonic_reference(i, t):
    if i == 1:
        return _mod1(t)
    if i == 2:
        return _mod1(t / 2)
    if i == 3:
        if t <= F(5, 2):
            return _mod1((t - 1) / 3)
        if t <= F(7, 2) or F(13, 2) <= t <= F(15, 2):
            return H
        if t <= F(13, 2):
            return _mod1((t - 2) / 3)
        return _mod1(t / 3)
    if i == 4:
        return _mod1((t - 3) / 4)
    if i == 5:
        if t <= 2:
            return F(0)
        if t <= F(9, 2):
            return _mod1((t - 2) / 5)
        if t <= F(11, 2):
            return H
        return _mod1((t - 3) / 5)
    if t <= H:
        return _mod1((t - F(7, 2)) / 6)
    if t <= F(3, 2):
        return H
    if t <= F(9, 2):
        return _mod1((t - F(9, 2)) / 6)
    if t <= F(11, 2):
        return F(0)
    return _mod1((t - F(11, 2)) / 6)


# --- A1 ----------------------------------------------------------------------


def test_a1_examples():
    out = gen.gen_partition_a1(1, [1, F(1, 3)])
    assert out.predicted_idle == F(3, 2)
    assert out.metadata["pieces"] == [(0, F(3, 4)), (F(3, 4), 1)]
    assert gen.gen_partition_a1(1, [1]).predicted_idle == 2
    assert gen.gen_partition_a1(1, [1, 1]).predicted_idle == 1
    with pytest.raises(PatrolError) as exc:
        gen.gen_partition_a1(1, [])
    assert exc.value.code == "EMPTY_SPEEDS"


def test_a1_period_is_bounce_time():
    out = gen.gen_partition_a1(F(5, 2), [2, F(1, 2), F(3, 4)])
    assert out.schedule.span == 2 * F(5, 2) / F(13, 4)
    assert exact_idle(out.schedule).idle == out.predicted_idle


# --- A2 ----------------------------------------------------------------------


def test_a2_examples():
    harmonic = gen.gen_runners_a2([F(1, i) for i in range(1, 33)])
    assert harmonic.predicted_idle == 1 and harmonic.metadata["r"] == 1
    assert len(harmonic.schedule.agents) == 1
    assert harmonic.metadata["discarded"] == list(range(2, 33))
    out = gen.gen_runners_a2([3, 2, 2])
    assert out.metadata["r"] == 3 and out.predicted_idle == F(1, 6)
    assert [a.trajectory.breakpoints[0][1] for a in out.schedule.agents] == [0, F(1, 3), F(2, 3)]
    assert exact_idle(out.schedule).idle == F(1, 6)
    assert gen.gen_runners_a2([1]).predicted_idle == 1


def test_a2_tie_break_and_order():
    # i*v_i = (1, 1, 1): the smallest maximizing index wins
    out = gen.gen_runners_a2([1, H, F(1, 3)])
    assert out.metadata["r"] == 1
    with pytest.raises(PatrolError) as exc:
        gen.gen_runners_a2([1, 2])
    assert exc.value.code == "UNSORTED_SPEEDS"


# --- train ---------------------------------------------------------------------


def test_train_examples():
    out = gen.gen_train_a3(1, F(1, 5), 5)
    m = out.metadata
    assert out.predicted_idle == F(25, 27)
    assert m["spacing"] == F(5, 27) and m["arc"] == F(4, 9) and m["period"] == 25
    assert m["arc"] / (1 - F(1, 5)) + m["arc"] / (1 + F(1, 5)) == m["spacing"] / F(1, 5)
    assert exact_idle(out.schedule).idle == F(25, 27)
    four = gen.gen_train_a3(1, F(1, 4), 4)
    assert four.predicted_idle == F(32, 31)
    assert exact_idle(four.schedule).idle == F(32, 31)


def test_train_errors():
    for a, b, k, code in ((1, 1, 5, "SPEED_ORDER"), (H, 1, 5, "SPEED_ORDER"), (1, H, 2, "BAD_K")):
        with pytest.raises(PatrolError) as exc:
            gen.gen_train_a3(a, b, k)
        assert exc.value.code == code
    with pytest.raises(PatrolError) as exc:
        gen.gen_train_a3(1, F(1, 1000), 1000)
    assert exc.value.code == "SCHEDULE_TOO_LARGE"


def test_train_limit_formula():
    for k in (100, 1000, 10_000):
        v = gen.predicted_idle_formula("A3", a=1, b=F(1, k), k=k)
        assert F(2, 3) < v < F(2, 3) + F(1, 100)


def test_train_beats_baselines_condition():
    for a, b in ((1, F(1, 5)), (1, F(1, 4)), (5, 1), (3, 1), (F(21, 5), 1), (F(43, 10), 1)):
        k = 6
        idle3 = gen.predicted_idle_formula("A3", a=a, b=b, k=k)
        speeds = [F(a)] + [F(b)] * (k - 1)
        idle2 = gen.predicted_idle_formula("A2", speeds=speeds)
        cond = gen.gen_train_a3(a, b, k).metadata["beats_a1_and_a2"]
        assert cond == (F(a) ** 2 - F(b) ** 2 - 4 * F(a) * F(b) >= 0)
        # a*a - b*b - 4ab >= 0 is exactly the condition for beating A2 here
        assert cond == (idle3 <= idle2)


# --- harmonic ------------------------------------------------------------------


def test_harmonic6_matches_formulas():
    s = gen.gen_harmonic6().schedule
    assert s.span == 8 and s.direction == UNIDIRECTIONAL
    for a in s.agents:
        assert a.max_speed == F(1, a.id)
        for j in range(8 * 24 + 1):
            t = F(j, 24)
            got = eval_trajectory(a.trajectory, s.fence, s.time_model, t)
            assert got == _harmonic_reference(a.id, t) or (t == 8 and got == _harmonic_reference(a.id, F(0)))


def test_f3_branch_resolution():
    # only the t/3 branch is continuous at 15/2 and closes the period at 8
    assert _mod1(F(15, 2) / 3) == H
    assert _mod1((F(15, 2) - 1) / 3) != H
    assert _mod1(F(8) / 3) == _mod1(F(-1, 3))


def test_harmonic6_examples():
    out = gen.gen_harmonic6()
    s = out.schedule
    a1, a4 = s.agents[0], s.agents[3]
    wraps = sum(1 for (t0, _), (t1, _) in zip(a1.trajectory.breakpoints, a1.trajectory.breakpoints[1:])
                if t0 == t1)
    assert wraps == 7  # 8 loops in one period
    assert eval_trajectory(a4.trajectory, s.fence, s.time_model, F(3)) == 0
    r = exact_idle(s)
    assert r.idle == 1 == out.predicted_idle
    positions = {w.position for w in r.witnesses}
    assert {F(0), H} <= positions
    assert len(out.metadata["critical_points"]) == 12


def test_harmonic6_critical_points_are_uncovered():
    # on one side of each critical point (t, x), points within eps of x stay
    # unvisited for all of (t, t+1) except a margin that shrinks with eps
    # (agents are at most 6 times slower than a_1); an agent may be parked
    # exactly at x, so x itself is not the right probe
    s = gen.gen_harmonic6().schedule
    eps = F(1, 10_000)
    margin = 10 * eps
    for t, x in gen.HARMONIC6_CRITICAL_POINTS:
        free_side = False
        for near in ((x + eps) % 1, (x - eps) % 1):
            hits = [a + k * 8 for a, _ in visit_timeline(s, near) for k in (-1, 0, 1)]
            if not any(t + margin < h < t + 1 - margin for h in hits):
                free_side = True
        assert free_side, (t, x)


HARMONIC32_IDLE = F(61, 62)


def test_harmonic32_structure():
    out = gen.gen_harmonic32()
    s = out.schedule
    assert [a.id for a in s.agents] == list(range(1, 33))
    assert all(a.max_speed == F(1, a.id) for a in s.agents)
    assert s.span == 32
    assert validate_schedule(s).ok
    a7, a8 = s.agents[6], s.agents[7]
    assert eval_trajectory(a7.trajectory, s.fence, s.time_model, F(1, 3)) == 0
    assert eval_trajectory(a8.trajectory, s.fence, s.time_model, F(19, 3)) == H
    groups = out.metadata["assignment"]
    assert sorted(len(v) for v in groups.values()) == [1, 1, 1, 1, 2, 2, 2, 2, 4, 4, 4, 4]
    # every critical point is passed at its time + 1/2 in each of the four 8-periods
    for (t, x), ids in groups.items():
        for rep in range(4):
            when = t + H + 8 * rep
            if ids in ([7], [8]):
                continue
            assert any(eval_trajectory(s.agents[i - 1].trajectory, s.fence, s.time_model, when) == x
                       for i in ids)


def test_harmonic32_golden_idle():
    s = gen.gen_harmonic32().schedule
    r = exact_idle(s)
    assert r.idle == HARMONIC32_IDLE
    assert r.idle < 1
    w = r.witnesses[0]
    assert max_gap_at(s, w.position)[0] == HARMONIC32_IDLE


def test_harmonic32_without_pair_is_back_to_one():
    out = gen.gen_harmonic32()
    ids = out.metadata["assignment"][(F(1), F(0))]
    assert exact_idle(out.schedule.without_agents(ids)).idle == 1


# --- greedy --------------------------------------------------------------------


def test_greedy_allocation_examples():
    assert gen.greedy_allocation(1, 2) == [(2, 4), (5, 12)]
    assert gen.greedy_allocation(F(2, 3), 2) == [(2, 11), (12, 85)]
    # H_11 >= 3 > H_10
    assert harmonic_number(11) >= 3 > harmonic_number(10)


def test_greedy_allocation_is_minimal():
    for tau in (1, F(2, 3), F(1, 2), F(3, 5)):
        need = 2 / F(tau) - 1
        for i1, i2 in gen.greedy_allocation(tau, 3):
            assert sum(F(1, i) for i in range(i1, i2 + 1)) >= need
            assert sum(F(1, i) for i in range(i1, i2)) < need


def test_greedy_small_schedule():
    out = gen.gen_greedy_finite(1, 1)
    s = out.schedule
    m = out.metadata
    assert m["k"] == 12 and m["m"] == 1 and m["padding"] == 0
    assert validate_schedule(s).ok
    idle = exact_idle(s).idle
    assert idle <= 1
    assert idle == brute_idle(s)
    assert m["harmonic_bound_holds"]


def test_greedy_padding_and_errors():
    out = gen.gen_greedy_finite(1, F(3, 2))
    assert out.metadata["horizon"] == 2 and out.metadata["padding"] == H
    for tau, t, code in ((0, 1, "BAD_TAU"), (F(3, 2), 2, "BAD_TAU"), (H, F(1, 4), "BAD_HORIZON")):
        with pytest.raises(PatrolError) as exc:
            gen.gen_greedy_finite(tau, t)
        assert exc.value.code == code
    with pytest.raises(PatrolError) as exc:
        gen.gen_greedy_finite(F(2, 3), 2)
    assert exc.value.code == "SCHEDULE_TOO_LARGE"


def test_greedy_two_thirds():
    out = gen.gen_greedy_finite(F(2, 3), F(2, 3))
    assert out.metadata["allocation"] == [(2, 11), (12, 85)]
    assert out.metadata["k"] == 85
    assert exact_idle(out.schedule).idle <= F(2, 3)


def test_greedy_plan_bounds():
    plan = gen.greedy_plan(F(2, 3), 2)
    assert plan["allocation"][:2] == [(2, 11), (12, 85)]
    assert plan["harmonic_bound_holds"]
    assert plan["log_k_bound_holds"]
    assert plan["k"] <= math.exp(4 * 2 / (F(2, 3) ** 2))


# --- blocks --------------------------------------------------------------------


def test_zigzag_triangles():
    s = gen.gen_zigzag(1).schedule
    assert s.span == F(10, 3) and s.fence.length == F(25, 3)
    geo = gen.triangle_geometry(analyze_gaps(s, 1), s.span)
    assert (geo["base"], geo["height"], geo["spacing"]) == (F(1, 3), F(5, 6), F(4, 3))
    tris = sorted(geo["triangles"], key=lambda t: t.base_x)
    assert [(t.base_x, t.base_start, t.apex_x, t.apex_t) for t in tris] == [
        (0, 3, F(5, 6), F(19, 6)), (F(25, 3), F(4, 3), F(15, 2), F(3, 2))]


def test_covering_speeds():
    assert gen.single_cover_speed(F(1, 3), F(5, 6)) == 1
    assert gen.alternating_cover_speed(F(1, 3), F(5, 6), F(4, 3)) == 1


@pytest.mark.parametrize("x", [2, 3, 4])
def test_blocks(x):
    out = gen.gen_blocks(x)
    s = out.schedule
    m = out.metadata
    assert len(s.agents) == 4 * x + 1 == m["k"]
    assert sum(s.speeds) == 16 * x + 1
    assert s.fence.length == F(25 * x, 3)
    assert m["rho"] == F(48 * x + 3, 50 * x)
    assert validate_schedule(s).ok
    assert exact_idle(s).idle == 1
    assert analyze_gaps(s, 1) == []
    # without the unit agents the triangles come back, one per end of every block
    fast = s.without_agents([a.id for a in s.agents if a.max_speed == 1])
    regions = analyze_gaps(fast, 1)
    assert len(regions) == 2 * x
    geo = gen.triangle_geometry(regions, s.span)
    assert (geo["base"], geo["height"], geo["spacing"]) == (F(1, 3), F(5, 6), F(4, 3))


def test_blocks_shared_agent_is_symmetric():
    s = gen.gen_blocks(2).schedule
    shared = s.agents[-2]
    xs = {x for _, x in shared.trajectory.breakpoints}
    assert min(xs) + max(xs) == 2 * F(25, 3)


def test_blocks_errors_and_large_x():
    for bad in (1, 0, -3):
        with pytest.raises(PatrolError) as exc:
            gen.gen_blocks(bad)
        assert exc.value.code == "BAD_X"
    assert gen.gen_blocks(200).metadata["rho"] == F(9603, 10000)


# --- formulas ------------------------------------------------------------------


def test_predicted_formulas():
    assert gen.predicted_idle_formula("A1", length=1, speeds=[1, F(1, 3)]) == F(3, 2)
    assert gen.predicted_idle_formula("A2", speeds=[3, 2, 2]) == F(1, 6)
    assert gen.predicted_idle_formula("A3", a=1, b=F(1, 5), k=5) == F(25, 27)
    for bad in (dict(algo="A4", speeds=[1]), dict(algo="A3", a=1)):
        with pytest.raises(PatrolError) as exc:
            gen.predicted_idle_formula(**bad)
        assert exc.value.code == "BAD_PARAMS"


def test_generators_respect_volume_bound():
    for out in (gen.gen_partition_a1(1, [1, 2]), gen.gen_runners_a2([3, 2, 2]),
                gen.gen_train_a3(1, F(1, 5), 5), gen.gen_harmonic6(), gen.gen_blocks(2)):
        s = out.schedule
        assert exact_idle(s).idle >= volume_lower_bound(s.fence, s.speeds)
