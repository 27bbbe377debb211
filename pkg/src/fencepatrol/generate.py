"""Schedule constructors.

Every constructor returns a :class:`GeneratorOutput` holding the schedule,
the closed-form idle time it is built to achieve (when there is one) and a
metadata dict with the construction parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .errors import PatrolError
from .model import (CIRCLE, NO_CONSTRAINT, SEGMENT, UNIDIRECTIONAL, Agent, Fence, Horizon,
                    Periodic, Schedule, Trajectory, common_period)
from .numeric import as_rational, harmonic_number, harmonic_range_cmp

F = Fraction


@dataclass
class GeneratorOutput:
    schedule: Schedule
    predicted_idle: Optional[Fraction]
    metadata: dict = field(default_factory=dict)


def _speeds(speeds: Iterable) -> list[Fraction]:
    out = [as_rational(v) for v in speeds]
    if not out:
        raise PatrolError("EMPTY_SPEEDS", "need at least one speed")
    if any(v <= 0 for v in out):
        raise PatrolError("BAD_PARAMS", "speeds must be positive")
    return out


# ---------------------------------------------------------------------------
# trajectory helpers


def _window(points: Sequence[tuple[Fraction, Fraction]], lo: Fraction, hi: Fraction):
    """Restrict an increasing-time polyline to [lo, hi], interpolating the ends."""
    def at(t):
        for (t0, x0), (t1, x1) in zip(points, points[1:]):
            if t0 <= t <= t1:
                return x0 if t1 == t0 else x0 + (x1 - x0) * (t - t0) / (t1 - t0)
        raise PatrolError("CONSTRUCTION_FAILED", f"time {t} outside waypoints")

    out = [(lo, at(lo))]
    out.extend(p for p in points if lo < p[0] < hi)
    out.append((hi, at(hi)))
    return out


def cyclic_trajectory(fence: Fence, waypoints, period) -> Trajectory:
    """Trajectory over ``[0, period]`` from one cycle of waypoints.

    ``waypoints`` are ``(time, unwrapped position)`` pairs spanning exactly one
    period starting at any time; the cycle is repeated as needed so that the
    result starts at time 0.
    """
    P = F(period)
    pts = [(F(t), F(x)) for t, x in waypoints]
    if pts[-1][0] - pts[0][0] != P:
        raise PatrolError("CONSTRUCTION_FAILED", "waypoints must span one period")
    drift = pts[-1][1] - pts[0][1]
    k = pts[0][0] // P
    pts = [(t - k * P, x - k * drift) for t, x in pts]
    unrolled = [(t - P, x - drift) for t, x in pts[:-1]] + pts
    return Trajectory.from_unwrapped(_window(unrolled, F(0), P), fence)


def _bounce(lo, hi, speed, start, rightward: bool):
    """One cycle of a constant-speed back-and-forth motion on [lo, hi]."""
    lo, hi, speed, start = F(lo), F(hi), F(speed), F(start)
    width = hi - lo
    pts = [(F(0), start)]
    t = F(0)
    ends = (hi, lo) if rightward else (lo, hi)
    pos = start
    for end in ends:
        if end != pos:
            t += abs(end - pos) / speed
            pts.append((t, end))
            pos = end
    if pos != start:
        t += abs(start - pos) / speed
        pts.append((t, start))
    assert t == 2 * width / speed
    return pts


def _tile(points, cycle, repeats: int):
    """Repeat an unwrapped one-cycle polyline ``repeats`` times."""
    cycle = F(cycle)
    drift = points[-1][1] - points[0][1]
    out = list(points)
    for r in range(1, repeats):
        out.extend((t + r * cycle, x + r * drift) for t, x in points[1:])
    return out


def _loop(speed, phase_time, period):
    """Unwrapped points of f(t) = speed * (t - phase_time) over [0, period]."""
    speed, phase_time, period = F(speed), F(phase_time), F(period)
    return [(F(0), -speed * phase_time), (period, speed * (period - phase_time))]


# ---------------------------------------------------------------------------
# closed-form idle times


def predicted_idle_formula(algo: str, **params) -> Fraction:
    """Closed-form idle time of the partition (A1), runners (A2) or train (A3) algorithm."""
    algo = algo.upper()
    try:
        if algo == "A1":
            speeds = _speeds(params["speeds"])
            return 2 * as_rational(params.get("length", 1)) / sum(speeds)
        if algo == "A2":
            speeds = sorted(_speeds(params["speeds"]), reverse=True)
            return 1 / max(i * v for i, v in enumerate(speeds, start=1))
        if algo == "A3":
            a, b, k = as_rational(params["a"]), as_rational(params["b"]), int(params["k"])
            return 2 * a / (a * a - b * b + 2 * (k - 2) * a * b)
    except KeyError as exc:
        raise PatrolError("BAD_PARAMS", f"missing parameter {exc}") from None
    raise PatrolError("BAD_PARAMS", f"unknown algorithm {algo!r}")


# ---------------------------------------------------------------------------
# open fence: partition


def gen_partition_a1(length, speeds) -> GeneratorOutput:
    L = as_rational(length)
    if L <= 0:
        raise PatrolError("BAD_PARAMS", "length must be positive")
    v = _speeds(speeds)
    total = sum(v)
    fence = Fence(SEGMENT, L)
    agents = []
    start = F(0)
    bounds = []
    periods = []
    for i, vi in enumerate(v, start=1):
        part = L * vi / total
        pts = _bounce(start, start + part, vi, start, True)
        periods.append(pts[-1][0])
        agents.append(Agent(i, vi, Trajectory.from_unwrapped(pts, fence)))
        bounds.append((start, start + part))
        start += part
    period = common_period(periods)
    assert period == periods[0]
    sched = Schedule(fence, Periodic(period), tuple(agents), NO_CONSTRAINT)
    idle = 2 * L / total
    return GeneratorOutput(sched, idle, {"algo": "a1", "k": len(v), "speed_sum": total,
                                         "period": period, "pieces": bounds})


# ---------------------------------------------------------------------------
# circle: runners


def gen_runners_a2(speeds) -> GeneratorOutput:
    v = _speeds(speeds)
    if any(a < b for a, b in zip(v, v[1:])):
        raise PatrolError("UNSORTED_SPEEDS", "speeds must be sorted in decreasing order")
    products = [i * vi for i, vi in enumerate(v, start=1)]
    best = max(products)
    r = products.index(best) + 1  # smallest maximizing index
    vr = v[r - 1]
    fence = Fence(CIRCLE, F(1))
    period = 1 / vr
    agents = []
    for i in range(1, r + 1):
        p0 = F(i - 1, r)
        pts = [(F(0), p0), (period, p0 + 1)]
        agents.append(Agent(i, v[i - 1], Trajectory.from_unwrapped(pts, fence)))
    sched = Schedule(fence, Periodic(period), tuple(agents), UNIDIRECTIONAL)
    return GeneratorOutput(sched, 1 / best, {
        "algo": "a2", "k": len(v), "speed_sum": sum(v), "r": r, "runner_speed": vr,
        "discarded": list(range(r + 1, len(v) + 1)), "period": period})


# ---------------------------------------------------------------------------
# circle: train


def train_parameters(a, b, k: int) -> dict:
    """Spacing, free arc, bounce cycle and common period of the train schedule."""
    a, b = as_rational(a), as_rational(b)
    if not a > b > 0:
        raise PatrolError("SPEED_ORDER", "the train needs a > b > 0")
    if k < 3:
        raise PatrolError("BAD_K", "the train needs k >= 3")
    idle = predicted_idle_formula("A3", a=a, b=b, k=k)
    spacing = b * idle
    arc = 1 - (k - 2) * spacing
    cycle = arc / (a - b) + arc / (a + b)
    assert cycle == spacing / b
    period = common_period([1 / b, cycle])
    return {"idle": idle, "spacing": spacing, "arc": arc, "cycle": cycle,
            "period": period, "cycles_per_period": period / cycle}


def gen_train_a3(a, b, k: int, max_breakpoints: int = 200_000) -> GeneratorOutput:
    """Agents 2..k ride clockwise at speed ``b``; agent 1 bounces across the free arc."""
    a, b, k = as_rational(a), as_rational(b), int(k)
    par = train_parameters(a, b, k)
    x, y, period = par["spacing"], par["arc"], par["period"]
    cycles = par["cycles_per_period"]
    assert cycles.denominator == 1
    cycles = int(cycles)
    estimate = 2 * cycles + (k - 1) * int(period * b) + 2 * cycles
    if estimate > max_breakpoints:
        raise PatrolError("SCHEDULE_TOO_LARGE",
                          f"about {estimate} breakpoints ({cycles} bounce cycles); "
                          f"raise max_breakpoints to build it anyway")
    fence = Fence(CIRCLE, F(1))
    agents = []
    # agent 1 starts at the train head, chases the tail, then returns to the head
    out_t, back_t = y / (a - b), y / (a + b)
    u, t = (k - 2) * x, F(0)
    pts = [(t, u)]
    for _ in range(cycles):
        t, u = t + out_t, u + a * out_t
        pts.append((t, u))
        t, u = t + back_t, u - a * back_t
        pts.append((t, u))
    assert t == period
    agents.append(Agent(1, a, Trajectory.from_unwrapped(pts, fence)))
    for j in range(2, k + 1):
        p0 = (j - 2) * x
        agents.append(Agent(j, b, Trajectory.from_unwrapped([(F(0), p0), (period, p0 + b * period)],
                                                            fence)))
    sched = Schedule(fence, Periodic(period), tuple(agents), NO_CONSTRAINT)
    meta = {"algo": "train", "k": k, "speed_sum": a + (k - 1) * b, **par}
    meta["beats_a1_and_a2"] = a * a - b * b - 4 * a * b >= 0
    return GeneratorOutput(sched, par["idle"], meta)


# ---------------------------------------------------------------------------
# circle: harmonic speeds


def _harmonic6_waypoints() -> list[list[tuple[Fraction, Fraction]]]:
    """Unwrapped one-period (length 8) waypoints of the six harmonic agents."""
    h = F(1, 2)
    return [
        [(F(0), F(0)), (F(8), F(8))],                       # t mod 1
        [(F(0), F(0)), (F(8), F(4))],                       # t/2 mod 1
        # (t-1)/3 on [0, 5/2]; parked at 1/2; (t-2)/3; parked; t/3 on [15/2, 8]
        [(F(0), F(-1, 3)), (F(5, 2), h), (F(7, 2), h), (F(13, 2), F(3, 2)),
         (F(15, 2), F(3, 2)), (F(8), F(5, 3))],
        [(F(0), F(-3, 4)), (F(8), F(5, 4))],                # (t-3)/4 mod 1
        [(F(0), F(0)), (F(2), F(0)), (F(9, 2), h), (F(11, 2), h), (F(8), F(1))],
        [(F(0), F(-7, 12)), (h, -h), (F(3, 2), -h), (F(9, 2), F(0)), (F(11, 2), F(0)),
         (F(8), F(5, 12))],
    ]


HARMONIC6_CRITICAL_POINTS = tuple([(F(j), F(0)) for j in range(8)]
                                  + [(F(j) + F(1, 2), F(1, 2)) for j in (1, 3, 5, 7)])

# critical point -> group size; a7 and a8 are fixed by their own formulas
HARMONIC32_ASSIGNMENT = {
    (F(1), F(0)): 2, (F(3), F(0)): 2, (F(4), F(0)): 2, (F(5), F(0)): 2,
    (F(6), F(0)): 4, (F(7), F(0)): 4, (F(3, 2), F(1, 2)): 4, (F(15, 2), F(1, 2)): 4,
}


def gen_harmonic6() -> GeneratorOutput:
    fence = Fence(CIRCLE, F(1))
    agents = tuple(Agent(i, F(1, i), Trajectory.from_unwrapped(w, fence))
                   for i, w in enumerate(_harmonic6_waypoints(), start=1))
    sched = Schedule(fence, Periodic(F(8)), agents, UNIDIRECTIONAL)
    return GeneratorOutput(sched, F(1), {"algo": "harmonic6", "k": 6,
                                         "speed_sum": sum(a.max_speed for a in agents),
                                         "critical_points": list(HARMONIC6_CRITICAL_POINTS)})


def gen_harmonic32() -> GeneratorOutput:
    """32 harmonic agents on the unit circle; idle time strictly below 1.

    Agents 1-6 repeat the 6-agent schedule, agents 7 and 8 move at speed 1/8
    with the phases 1/3 and 7/3, and the remaining critical points are
    handled by pairs (speed 1/16) and quadruples (speed 1/32). Member ``m`` of
    a group of ``g`` assigned to critical point ``(t*, x*)`` follows
    ``(t - phi - 8m) / (8g) mod 1`` with ``phi = t* + 1/2 - 8g x*``, so some
    member passes ``x*`` at time ``t* + 1/2`` modulo 8.
    """
    fence = Fence(CIRCLE, F(1))
    period = F(32)
    agents = []
    for i, w in enumerate(_harmonic6_waypoints(), start=1):
        agents.append(Agent(i, F(1, i), Trajectory.from_unwrapped(_tile(w, 8, 4), fence)))
    for i, phase in ((7, F(1, 3)), (8, F(7, 3))):
        agents.append(Agent(i, F(1, i), Trajectory.from_unwrapped(_loop(F(1, 8), phase, period),
                                                                  fence)))
    groups = {}
    next_id = {2: 9, 4: 17}
    for point, g in HARMONIC32_ASSIGNMENT.items():
        t_star, x_star = point
        phi = (t_star + F(1, 2) - 8 * g * x_star) % (8 * g)
        ids = []
        for m in range(g):
            i = next_id[g]
            next_id[g] += 1
            pts = _loop(F(1, 8 * g), phi + 8 * m, period)
            agents.append(Agent(i, F(1, i), Trajectory.from_unwrapped(pts, fence)))
            ids.append(i)
        groups[point] = ids
    groups[(F(0), F(0))] = [7]
    groups[(F(7, 2), F(1, 2))] = [7]
    groups[(F(2), F(0))] = [8]
    groups[(F(11, 2), F(1, 2))] = [8]
    agents.sort(key=lambda a: a.id)
    sched = Schedule(fence, Periodic(period), tuple(agents), UNIDIRECTIONAL)
    return GeneratorOutput(sched, None, {
        "algo": "harmonic32", "k": 32, "speed_sum": sum(a.max_speed for a in agents),
        "period": period, "idle_bound": "<1",
        "critical_points": list(HARMONIC6_CRITICAL_POINTS), "assignment": groups})


# ---------------------------------------------------------------------------
# circle: finite-horizon greedy


def greedy_allocation(tau, subintervals: int) -> list[tuple[int, int]]:
    """Agent index ranges (i1, i2) used in each subinterval of length tau/2.

    ``i2`` is the smallest index with ``1 + sum_{i1}^{i2} 1/i >= 2/tau``. The
    running sum is tracked in floating point and every decision close to the
    threshold is settled with an exact rational sum.
    """
    tau = as_rational(tau)
    need = 2 / tau - 1
    need_f = float(need)
    out = []
    nxt = 2
    for _ in range(subintervals):
        i1 = i = nxt
        acc = 1.0 / i
        while True:
            tol = 1e-12 + 4e-16 * (i - i1 + 1) * max(need_f, 1.0)
            if acc >= need_f - tol:
                if acc > need_f + tol or harmonic_range_cmp(i1, i, need) >= 0:
                    break
            i += 1
            acc += 1.0 / i
        out.append((i1, i))
        nxt = i + 1
    return out


def greedy_plan(tau, t) -> dict:
    """Everything about the finite-horizon construction that does not need the schedule."""
    tau, t = as_rational(tau), as_rational(t)
    if not 0 < tau <= 1:
        raise PatrolError("BAD_TAU", "tau must lie in (0, 1]")
    if t < tau:
        raise PatrolError("BAD_HORIZON", "horizon must be at least tau")
    m = math.ceil(t / tau)
    horizon = m * tau
    alloc = greedy_allocation(tau, 2 * m)
    k = alloc[-1][1]
    bound = 4 * horizon / tau ** 2 + 1 - 8 * horizon / (5 * tau)
    bound_ok = harmonic_range_cmp(1, k, bound) <= 0
    return {"tau": tau, "m": m, "horizon": horizon, "padding": horizon - t,
            "allocation": alloc, "k": k, "harmonic_bound": bound, "harmonic_bound_holds": bound_ok,
            "log_k_bound_holds": math.log(k) <= float(4 * horizon / tau ** 2)}


def gen_greedy_finite(tau, t, max_agents: int = 20_000) -> GeneratorOutput:
    """Idle time at most tau on [0, t] with harmonic speeds, built greedily.

    Agent 1 loops at unit speed. In every subinterval of length tau/2 a fresh
    batch of agents, parked at their start points since time 0, each sweep
    the arc just ahead of the previous one at full speed and then stop for
    good; the batch together with agent 1 covers the whole circle. The last
    agent of a batch stops at the origin instead of overshooting it.
    """
    plan = greedy_plan(tau, t)
    tau, horizon, k = plan["tau"], plan["horizon"], plan["k"]
    if k > max_agents:
        raise PatrolError("SCHEDULE_TOO_LARGE",
                          f"the construction needs k={k} agents (limit {max_agents}); "
                          f"their exact start positions are not practical to materialize")
    fence = Fence(CIRCLE, F(1))
    half = tau / 2
    agents = [Agent(1, F(1), Trajectory.from_unwrapped([(F(0), F(0)), (horizon, horizon)], fence))]
    for j, (i1, i2) in enumerate(plan["allocation"]):
        t_start = j * half
        origin = t_start  # agent 1's unwrapped position
        pos = origin + half
        for i in range(i1, i2 + 1):
            end = min(pos + half / i, origin + 1)
            pts = [(F(0), pos)]
            if t_start > 0:
                pts.append((t_start, pos))
            t_stop = t_start + (end - pos) * i
            pts.append((t_stop, end))
            if t_stop < horizon:
                pts.append((horizon, end))
            agents.append(Agent(i, F(1, i), Trajectory.from_unwrapped(pts, fence)))
            pos = end
    sched = Schedule(fence, Horizon(horizon), tuple(agents), UNIDIRECTIONAL)
    meta = {"algo": "greedy", "speed_sum": harmonic_number(k), "idle_bound": tau, **plan}
    return GeneratorOutput(sched, None, meta)


# ---------------------------------------------------------------------------
# open fence: blocks of zig-zag agents


BLOCK_LENGTH = F(25, 3)
ZIGZAG_SPEED = F(5)
ZIGZAG_PERIOD = F(10, 3)
ZIGZAG_STARTS = ((F(0), True), (F(5), False), (F(20, 3), True))  # (start, moving right)
BLOCK_PHASE = F(1, 3)


def gen_zigzag(blocks: int = 1, phase=0) -> GeneratorOutput:
    """Three speed-5 agents per block bouncing across the block.

    ``phase`` advances every agent: the schedule at time s equals the
    reference motion at time ``s + phase``.
    """
    if blocks < 1:
        raise PatrolError("BAD_X", "need at least one block")
    phase = as_rational(phase)
    fence = Fence(SEGMENT, blocks * BLOCK_LENGTH)
    agents = []
    for j in range(blocks):
        off = j * BLOCK_LENGTH
        for start, right in ZIGZAG_STARTS:
            pts = _bounce(off, off + BLOCK_LENGTH, ZIGZAG_SPEED, off + start, right)
            assert pts[-1][0] == ZIGZAG_PERIOD
            pts = [(t - phase, x) for t, x in pts]
            traj = cyclic_trajectory(fence, pts, ZIGZAG_PERIOD)
            agents.append(Agent(len(agents) + 1, ZIGZAG_SPEED, traj))
    sched = Schedule(fence, Periodic(ZIGZAG_PERIOD), tuple(agents), NO_CONSTRAINT)
    return GeneratorOutput(sched, None, {"algo": "zigzag", "blocks": blocks, "phase": phase,
                                         "k": len(agents), "speed_sum": 5 * len(agents)})


def single_cover_speed(base, height) -> Fraction:
    """Speed needed to cover one uncovered isosceles triangle from its base line."""
    base, height = as_rational(base), as_rational(height)
    return height / (1 - base / 2)


def alternating_cover_speed(base, height, spacing) -> Fraction:
    """Speed needed to cover alternating congruent triangles sharing a base line."""
    base, height, spacing = as_rational(base), as_rational(height), as_rational(spacing)
    return height / (3 * base / 2 + spacing - 1)


@dataclass(frozen=True)
class Triangle:
    base_x: Fraction
    base_start: Fraction
    base: Fraction
    apex_x: Fraction
    apex_t: Fraction

    @property
    def height(self) -> Fraction:
        return abs(self.apex_x - self.base_x)

    @property
    def points_right(self) -> bool:
        return self.apex_x > self.base_x


def as_triangle(region) -> Triangle:
    """Read an uncovered region as a triangle with a vertical base."""
    v = region.vertices
    if len(v) != 3:
        raise PatrolError("CONSTRUCTION_FAILED", f"expected a triangle, got {len(v)} vertices")
    for i in range(3):
        p, q, r = v[i], v[(i + 1) % 3], v[(i + 2) % 3]
        if p[0] == q[0]:
            lo, hi = sorted((p[1], q[1]))
            return Triangle(p[0], lo, hi - lo, r[0], r[1])
    raise PatrolError("CONSTRUCTION_FAILED", "triangle has no vertical side")


def triangle_geometry(regions, period) -> dict:
    """Base, height and vertical spacing of the uncovered zig-zag triangles.

    Requires all triangles to be congruent and isosceles; the spacing is
    measured between consecutive triangles on the time axis, modulo the
    period, within each block boundary pair.
    """
    period = F(period)
    tris = [as_triangle(r) for r in regions]
    if not tris:
        raise PatrolError("CONSTRUCTION_FAILED", "no uncovered triangles")
    bases = {t.base for t in tris}
    heights = {t.height for t in tris}
    if len(bases) != 1 or len(heights) != 1:
        raise PatrolError("CONSTRUCTION_FAILED", "triangles are not congruent")
    b, h = bases.pop(), heights.pop()
    for t in tris:
        if t.apex_t != t.base_start + b / 2:
            raise PatrolError("CONSTRUCTION_FAILED", "triangle is not isosceles")
    starts = sorted({t.base_start % period for t in tris})
    gaps = {(nxt - (cur + b)) % period for cur, nxt in zip(starts, starts[1:] + [starts[0] + period])}
    if len(gaps) != 1:
        raise PatrolError("CONSTRUCTION_FAILED", f"uneven spacing {sorted(gaps)}")
    return {"base": b, "height": h, "spacing": gaps.pop(), "count": len(tris),
            "triangles": tris}


def gen_blocks(x: int) -> GeneratorOutput:
    """Segment of length 25x/3 guarded with idle time 1 by 3x speed-5 and x+1 unit agents.

    The unit agents are placed from the uncovered triangles that gap
    analysis finds in the speed-5 schedule, so the construction does not
    depend on reading coordinates off a picture.
    """
    from .verify import analyze_gaps

    if not isinstance(x, int) or x < 2:
        raise PatrolError("BAD_X", "need an integer x >= 2")
    zig = gen_zigzag(x, BLOCK_PHASE).schedule
    P = ZIGZAG_PERIOD
    L = zig.fence.length
    regions = analyze_gaps(zig, 1)
    geo = triangle_geometry(regions, P)
    b, h, delta = geo["base"], geo["height"], geo["spacing"]
    s1 = single_cover_speed(b, h)
    s2 = alternating_cover_speed(b, h, delta)
    tris = geo["triangles"]

    def first(pred) -> Triangle:
        hits = sorted((t for t in tris if pred(t)), key=lambda t: t.base_start)
        if not hits:
            raise PatrolError("CONSTRUCTION_FAILED", "missing triangle")
        return hits[0]

    fence = zig.fence
    agents = list(zig.agents)
    nid = len(agents) + 1

    # outer agents: reach the apex at the last useful moment, return, wait
    left = first(lambda t: t.base_x == 0)
    out_time = h / s1
    start = left.apex_t - out_time
    wps = [(start, F(0)), (left.apex_t, h), (left.apex_t + out_time, F(0)), (start + P, F(0))]
    agents.append(Agent(nid, s1, cyclic_trajectory(fence, wps, P)))
    nid += 1

    # shared agents: oscillate between the apexes on both sides of a boundary
    shared_speed = set()
    for j in range(1, x):
        xb = j * BLOCK_LENGTH
        t2 = first(lambda t: t.base_x == xb and not t.points_right)
        t1 = min((t for t in tris if t.base_x == xb and t.points_right),
                 key=lambda t: (t.base_start - t2.base_start) % P)
        t_left = t2.apex_t
        t_right = t_left + (t1.apex_t - t2.apex_t) % P
        shared_speed.add(2 * h / (t_right - t_left))
        shared_speed.add(2 * h / (t_left + P - t_right))
        wps = [(t_left, xb - h), (t_right, xb + h), (t_left + P, xb - h)]
        agents.append(Agent(nid, s2, cyclic_trajectory(fence, wps, P)))
        nid += 1
    if any(v > s2 for v in shared_speed):
        raise PatrolError("CONSTRUCTION_FAILED", "shared agent would exceed its speed")

    right = first(lambda t: t.base_x == L)
    start = right.apex_t - out_time
    wps = [(start, L), (right.apex_t, L - h), (right.apex_t + out_time, L), (start + P, L)]
    agents.append(Agent(nid, s1, cyclic_trajectory(fence, wps, P)))

    sched = Schedule(fence, Periodic(P), tuple(agents), NO_CONSTRAINT)
    total = sum(a.max_speed for a in agents)
    rho = F(48 * x + 3, 50 * x)
    meta = {"algo": "blocks", "x": x, "k": len(agents), "speed_sum": total, "length": L,
            "rho": rho, "triangle_base": b, "triangle_height": h, "triangle_spacing": delta,
            "period": P, "s1": s1, "s2": s2}
    return GeneratorOutput(sched, F(1), meta)
