"""Test-only oracle and random schedule builders.

The oracle recomputes idle times straight from the stored breakpoints
without touching the sweep code: every pairwise crossing is tried (no time
filtering), and limits at cell ends are taken by extrapolating each gap
linearly from two interior sample points.
"""

from __future__ import annotations

import random
from fractions import Fraction as F
from typing import Optional

from fencepatrol.model import (CIRCLE, NO_CONSTRAINT, SEGMENT, UNIDIRECTIONAL, Agent, Fence,
                               Horizon, Periodic, Schedule, Trajectory)


def _segments(s: Schedule):
    for a in s.agents:
        bp = a.trajectory.breakpoints
        for (t0, p0), (t1, p1) in zip(bp, bp[1:]):
            if t1 > t0:
                yield t0, p0, t1, p1


def visits(s: Schedule, x: F) -> list[tuple[F, F]]:
    L = s.fence.length
    targets = {x}
    if s.fence.closed and x in (0, L):
        targets = {F(0), L}
    out = []
    for t0, p0, t1, p1 in _segments(s):
        for y in targets:
            if p0 == p1:
                if y == p0:
                    out.append((t0, t1))
            elif min(p0, p1) <= y <= max(p0, p1):
                t = t0 + (y - p0) * (t1 - t0) / (p1 - p0)
                out.append((t, t))
    return sorted(out)


def gap_list(s: Schedule, x: F) -> Optional[list[F]]:
    """Gap lengths at x in time order; None when a periodic point is never visited."""
    span = s.span
    iv = visits(s, x)
    if s.periodic:
        if not iv:
            return None
        iv = [(F(0), F(0)) if a == span else (a, b) for a, b in iv]
        iv.sort()
        merged = []
        for a, b in iv:
            if merged and a <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], b)
            else:
                merged.append([a, b])
        gaps = [nxt[0] - cur[1] for cur, nxt in zip(merged, merged[1:])]
        gaps.append(merged[0][0] + span - merged[-1][1])
        return [max(g, F(0)) for g in gaps]
    if not iv:
        return [span]
    merged = []
    for a, b in iv:
        if merged and a <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])
    gaps = [merged[0][0]]
    gaps += [nxt[0] - cur[1] for cur, nxt in zip(merged, merged[1:])]
    gaps.append(span - merged[-1][1])
    return gaps


def point_gap(s: Schedule, x) -> Optional[F]:
    g = gap_list(s, F(x))
    return None if g is None else max(g)


def candidates(s: Schedule) -> list[F]:
    L = s.fence.length
    xs = {F(0), L}
    for a in s.agents:
        xs.update(x for _, x in a.trajectory.breakpoints)
    segs = [sg for sg in _segments(s) if sg[1] != sg[3]]
    if s.periodic:
        P = s.span
        segs = segs + [(t0 + k * P, p0, t1 + k * P, p1) for t0, p0, t1, p1 in segs for k in (-1, 1)]
    lines = []
    for t0, p0, t1, p1 in segs:
        w = (t1 - t0) / (p1 - p0)
        lines.append((t0 - p0 * w, w, min(p0, p1), max(p0, p1)))
    for i in range(len(lines)):
        a1, w1, lo1, hi1 = lines[i]
        for j in range(i + 1, len(lines)):
            a2, w2, lo2, hi2 = lines[j]
            if w1 == w2:
                continue
            x = (a2 - a1) / (w1 - w2)
            if max(lo1, lo2) <= x <= min(hi1, hi2):
                xs.add(x)
    return sorted(x for x in xs if 0 <= x <= L)


def brute_idle(s: Schedule) -> Optional[F]:
    xs = candidates(s)
    best = F(0)
    for x in xs:
        g = point_gap(s, x)
        if g is None:
            return None
        best = max(best, g)
    for lo, hi in zip(xs, xs[1:]):
        d = (hi - lo) / 4
        for near, far in ((lo + d, lo + 2 * d), (hi - d, hi - 2 * d)):
            g1, g2 = gap_list(s, near), gap_list(s, far)
            if g1 is None or g2 is None:
                return None
            assert len(g1) == len(g2)
            best = max(best, max(2 * a - b for a, b in zip(g1, g2)))
    return best


# ---------------------------------------------------------------------------
# random schedules


def _rat(rng: random.Random, lo: F, hi: F, den: int) -> F:
    n = rng.randint(0, den)
    return lo + (hi - lo) * F(n, den)


def random_schedule(rng: random.Random, k_max: int = 5, horizon: bool = False,
                    closed: Optional[bool] = None) -> Schedule:
    """A valid schedule with random breakpoints on a small rational grid."""
    if closed is None:
        closed = rng.random() < 0.5
    L = F(rng.choice([1, 2, 3, 5]), rng.choice([1, 2, 3]))
    fence = Fence(CIRCLE if closed else SEGMENT, L)
    span = F(rng.randint(1, 8), rng.choice([1, 2, 3]))
    k = rng.randint(1, k_max)
    unidirectional = closed and rng.random() < 0.3
    agents = []
    for i in range(1, k + 1):
        n = rng.randint(0, 4)
        inner = sorted({_rat(rng, F(0), span, 12) for _ in range(n)} - {F(0), span})
        times = [F(0)] + inner + [span]
        if closed:
            u = [_rat(rng, F(0), L, 6)]
            for _ in times[1:-1]:
                step = _rat(rng, -L, 2 * L, 6)
                if unidirectional:
                    step = abs(step)
                u.append(u[-1] + step)
            if horizon:
                last = u[-1] + (abs(_rat(rng, -L, L, 6)) if unidirectional else _rat(rng, -L, L, 6))
            else:
                # close the loop after a whole number of turns
                turns = rng.randint(0, 2) if unidirectional else rng.randint(-1, 2)
                last = u[0] + turns * L
                if unidirectional and last < u[-1]:
                    last += ((u[-1] - last) // L + 1) * L
            u.append(last)
            traj = Trajectory.from_unwrapped(list(zip(times, u)), fence)
            pts = list(zip(times, u))
        else:
            pos = [_rat(rng, F(0), L, 6) for _ in times[:-1]]
            pos.append(_rat(rng, F(0), L, 6) if horizon else pos[0])
            pts = list(zip(times, pos))
            traj = Trajectory(tuple(pts))
        slopes = [abs((x1 - x0) / (t1 - t0)) for (t0, x0), (t1, x1) in zip(pts, pts[1:])]
        vmax = max(slopes + [F(1, 10)])
        vmax = vmax * rng.choice([1, 1, F(3, 2)])
        agents.append(Agent(i, vmax, traj))
    tm = Horizon(span) if horizon else Periodic(span)
    return Schedule(fence, tm, tuple(agents), UNIDIRECTIONAL if unidirectional else NO_CONSTRAINT)


def scale_time(s: Schedule, c: F) -> Schedule:
    tm = Periodic(s.span * c) if s.periodic else Horizon(s.span * c)
    agents = tuple(Agent(a.id, a.max_speed / c,
                         Trajectory(tuple((t * c, x) for t, x in a.trajectory.breakpoints)))
                   for a in s.agents)
    return Schedule(s.fence, tm, agents, s.direction)


def scale_space(s: Schedule, c: F) -> Schedule:
    fence = Fence(s.fence.kind, s.fence.length * c)
    agents = tuple(Agent(a.id, a.max_speed * c,
                         Trajectory(tuple((t, x * c) for t, x in a.trajectory.breakpoints)))
                   for a in s.agents)
    return Schedule(fence, s.time_model, agents, s.direction)


def limit_step(s: Schedule, xs, x: F) -> F:
    """A step keeping ``x + d`` and ``x + 2d`` inside the open cells next to ``x``."""
    L = s.fence.length
    dists = []
    for y in xs:
        d = abs(y - x)
        if s.fence.closed:
            d = min(d % L, L - d % L)
        if d:
            dists.append(d)
    return min(dists + [L]) / 3
