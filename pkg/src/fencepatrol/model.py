"""Fences, trajectories and schedules, plus validation and the JSON file format."""

from __future__ import annotations

import bisect
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence, Union

from .errors import PatrolError
from .numeric import parse_rational, rational_lcm_all, render

SEGMENT = "segment"
CIRCLE = "circle"

NO_CONSTRAINT = "none"
UNIDIRECTIONAL = "unidirectional"

Point = tuple[Fraction, Fraction]  # (time, position)


@dataclass(frozen=True)
class Fence:
    kind: str
    length: Fraction

    def __post_init__(self) -> None:
        if self.kind not in (SEGMENT, CIRCLE):
            raise PatrolError("BAD_FENCE", f"unknown fence kind {self.kind!r}")
        object.__setattr__(self, "length", Fraction(self.length))
        if self.length <= 0:
            raise PatrolError("BAD_FENCE", "fence length must be positive")

    @property
    def closed(self) -> bool:
        return self.kind == CIRCLE


@dataclass(frozen=True)
class Periodic:
    period: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "period", Fraction(self.period))
        if self.period <= 0:
            raise PatrolError("BAD_TIME_MODEL", "period must be positive")

    @property
    def span(self) -> Fraction:
        return self.period


@dataclass(frozen=True)
class Horizon:
    end: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "end", Fraction(self.end))
        if self.end <= 0:
            raise PatrolError("BAD_TIME_MODEL", "horizon must be positive")

    @property
    def span(self) -> Fraction:
        return self.end


TimeModel = Union[Periodic, Horizon]


@dataclass(frozen=True)
class Piece:
    """One linear piece of a trajectory, ``t0 < t1``."""

    agent: int
    index: int
    t0: Fraction
    p0: Fraction
    t1: Fraction
    p1: Fraction

    @property
    def slope(self) -> Fraction:
        return (self.p1 - self.p0) / (self.t1 - self.t0)

    @property
    def stationary(self) -> bool:
        return self.p0 == self.p1


@dataclass(frozen=True)
class Trajectory:
    """Piecewise-linear position function given by its breakpoints.

    On a circle the stored positions lie in ``[0, length]``; crossing the
    origin is recorded as two breakpoints with the same time and positions
    ``length`` and ``0`` (or ``0`` and ``length`` when moving backwards).
    """

    breakpoints: tuple[Point, ...]

    def __post_init__(self) -> None:
        pts = tuple((Fraction(t), Fraction(x)) for t, x in self.breakpoints)
        object.__setattr__(self, "breakpoints", pts)

    @classmethod
    def from_unwrapped(cls, points: Iterable[Sequence], fence: Fence) -> "Trajectory":
        """Build a trajectory from breakpoints in unwrapped coordinates.

        Segment positions are taken as they are. Circle positions may be any
        rational; pieces are split wherever they cross a multiple of the fence
        length, so that every stored position lies in ``[0, length]``.
        """
        pts = [(Fraction(t), Fraction(x)) for t, x in points]
        if not pts:
            raise PatrolError("SCHEMA_VIOLATION", "trajectory needs at least one breakpoint")
        if not fence.closed:
            return cls(tuple(pts))
        L = fence.length
        t_prev, u_prev = pts[0]
        out: list[Point] = [(t_prev, u_prev % L)]
        for t, u in pts[1:]:
            if t <= t_prev:
                raise PatrolError("SCHEMA_VIOLATION", "unwrapped times must increase")
            if u == u_prev:
                out.append((t, out[-1][1]))
                t_prev = t
                continue
            # stored position of the current point, expressed in [0, L]
            pos = out[-1][1]
            base = u_prev - pos  # unwrapped value of stored position 0
            step = 1 if u > u_prev else -1
            rate = (t - t_prev) / (u - u_prev)
            while True:
                if step > 0:
                    if pos == L:
                        out.append((out[-1][0], Fraction(0)))
                        base += L
                        pos = Fraction(0)
                    edge = base + L
                    if u <= edge:
                        break
                    tw = t_prev + (edge - u_prev) * rate
                    out.append((tw, L))
                    pos = L
                else:
                    if pos == 0:
                        out.append((out[-1][0], L))
                        base -= L
                        pos = L
                    edge = base
                    if u >= edge:
                        break
                    tw = t_prev + (edge - u_prev) * rate
                    out.append((tw, Fraction(0)))
                    pos = Fraction(0)
            out.append((t, u - base))
            t_prev, u_prev = t, u
        return cls(tuple(out))

    def pieces(self, agent: int = 0) -> Iterator[Piece]:
        """Linear pieces with positive duration; wrap markers are skipped."""
        bp = self.breakpoints
        for i in range(len(bp) - 1):
            (t0, p0), (t1, p1) = bp[i], bp[i + 1]
            if t1 > t0:
                yield Piece(agent, i, t0, p0, t1, p1)

    @property
    def times(self) -> list[Fraction]:
        return [t for t, _ in self.breakpoints]


@dataclass(frozen=True)
class Agent:
    id: int
    max_speed: Fraction
    trajectory: Trajectory

    def __post_init__(self) -> None:
        object.__setattr__(self, "max_speed", Fraction(self.max_speed))


@dataclass(frozen=True)
class Schedule:
    fence: Fence
    time_model: TimeModel
    agents: tuple[Agent, ...]
    direction: str = NO_CONSTRAINT

    def __post_init__(self) -> None:
        object.__setattr__(self, "agents", tuple(self.agents))
        if self.direction not in (NO_CONSTRAINT, UNIDIRECTIONAL):
            raise PatrolError("SCHEMA_VIOLATION", f"unknown direction {self.direction!r}")

    @property
    def periodic(self) -> bool:
        return isinstance(self.time_model, Periodic)

    @property
    def span(self) -> Fraction:
        return self.time_model.span

    @property
    def speeds(self) -> list[Fraction]:
        return [a.max_speed for a in self.agents]

    def pieces(self) -> list[Piece]:
        return [p for a in self.agents for p in a.trajectory.pieces(a.id)]

    def without_agents(self, ids: Iterable[int]) -> "Schedule":
        drop = set(ids)
        return Schedule(self.fence, self.time_model,
                        tuple(a for a in self.agents if a.id not in drop), self.direction)


def eval_trajectory(traj: Trajectory, fence: Fence, time_model: TimeModel, t) -> Fraction:
    """Position of the agent at time ``t``.

    Periodic schedules reduce ``t`` modulo the period. On a circle the result
    is wrapped into ``[0, length)``.
    """
    t = Fraction(t)
    if t < 0:
        raise PatrolError("TIME_OUT_OF_RANGE", f"negative time {t}")
    if isinstance(time_model, Periodic):
        t = t % time_model.period
    elif t > time_model.end:
        raise PatrolError("TIME_OUT_OF_RANGE", f"time {t} beyond horizon {time_model.end}")
    bp = traj.breakpoints
    times = [b[0] for b in bp]
    i = bisect.bisect_right(times, t) - 1
    i = max(0, min(i, len(bp) - 1))
    if i == len(bp) - 1 or bp[i + 1][0] == bp[i][0]:
        pos = bp[i][1]
    else:
        (t0, p0), (t1, p1) = bp[i], bp[i + 1]
        pos = p0 + (p1 - p0) * (t - t0) / (t1 - t0)
    if fence.closed:
        pos %= fence.length
    return pos


def common_period(agent_periods: Iterable) -> Fraction:
    return rational_lcm_all(Fraction(p) for p in agent_periods)


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Finding:
    code: str
    agent: int
    piece: int | None = None
    detail: str = ""

    def __str__(self) -> str:
        where = f"agent={self.agent}"
        if self.piece is not None:
            where += f" piece={self.piece}"
        return f"{self.code} {where} {self.detail}".rstrip()


CHECKS = ("continuity", "speed", "closure", "direction")


@dataclass
class ValidationReport:
    findings: list[Finding] = field(default_factory=list)
    checks: dict[int, dict[str, bool]] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.findings

    def summary(self) -> str:
        if self.ok:
            return f"valid: {len(self.checks)} agents, all checks pass"
        return "\n".join(str(f) for f in self.findings)


def _is_wrap_marker(a: Point, b: Point, fence: Fence) -> bool:
    return fence.closed and a[0] == b[0] and {a[1], b[1]} == {Fraction(0), fence.length}


def validate_schedule(s: Schedule) -> ValidationReport:
    """Check every agent; all problems are collected rather than raised."""
    report = ValidationReport()
    L = s.fence.length
    span = s.span
    if not s.agents:
        report.findings.append(Finding("NO_AGENTS", -1))
    if s.direction == UNIDIRECTIONAL and not s.fence.closed:
        report.findings.append(Finding("DIRECTION_ON_SEGMENT", -1,
                                       detail="unidirectional needs a circle"))
    for agent in s.agents:
        aid = agent.id
        found: list[Finding] = []
        ok = dict.fromkeys(CHECKS, True)
        bp = agent.trajectory.breakpoints

        def fail(check: str, code: str, piece=None, detail="") -> None:
            ok[check] = False
            found.append(Finding(code, aid, piece, detail))

        if agent.max_speed <= 0:
            fail("speed", "NONPOSITIVE_SPEED", detail=f"max_speed={render(agent.max_speed)}")
        if not bp:
            fail("continuity", "EMPTY_TRAJECTORY")
            report.findings.extend(found)
            report.checks[aid] = ok
            continue
        if bp[0][0] != 0:
            fail("continuity", "FIRST_TIME_NOT_ZERO", detail=f"t={render(bp[0][0])}")
        for j, (t, x) in enumerate(bp):
            if not 0 <= x <= L:
                fail("continuity", "POSITION_OUT_OF_RANGE", j, f"x={render(x)}")
        for j in range(len(bp) - 1):
            a, b = bp[j], bp[j + 1]
            if b[0] < a[0]:
                fail("continuity", "NON_MONOTONE_TIME", j)
                continue
            if b[0] == a[0]:
                if not _is_wrap_marker(a, b, s.fence):
                    fail("continuity", "DISCONTINUITY", j,
                         f"jump {render(a[1])}->{render(b[1])} at t={render(a[0])}")
                elif j > 0 and bp[j - 1][0] == a[0]:
                    fail("continuity", "DISCONTINUITY", j, "stacked wrap markers")
                elif s.direction == UNIDIRECTIONAL and a[1] == 0:
                    fail("direction", "DIRECTION_VIOLATION", j, "backward wrap")
                continue
            slope = (b[1] - a[1]) / (b[0] - a[0])
            if abs(slope) > agent.max_speed:
                fail("speed", "SPEED_EXCEEDED", j,
                     f"|slope|={render(abs(slope))} > {render(agent.max_speed)}")
            if s.direction == UNIDIRECTIONAL and slope < 0:
                fail("direction", "DIRECTION_VIOLATION", j, f"slope={render(slope)}")
        t_last, x_last = bp[-1]
        if t_last != span:
            code = "PERIOD_CLOSURE" if s.periodic else "HORIZON_END"
            fail("closure", code, detail=f"last time {render(t_last)} != {render(span)}")
        elif s.periodic:
            x_first = bp[0][1]
            same = (x_last - x_first) % L == 0 if s.fence.closed else x_last == x_first
            if not same:
                fail("closure", "PERIOD_CLOSURE",
                     detail=f"position {render(x_last)} != {render(x_first)}")
        report.findings.extend(found)
        report.checks[aid] = ok
    return report


# ---------------------------------------------------------------------------
# file format


def _time_model_doc(tm: TimeModel) -> dict:
    if isinstance(tm, Periodic):
        return {"periodic": render(tm.period)}
    return {"horizon": render(tm.end)}


def schedule_to_doc(s: Schedule) -> dict:
    return {
        "fence": {"kind": s.fence.kind, "length": render(s.fence.length)},
        "time_model": _time_model_doc(s.time_model),
        "direction": s.direction,
        "agents": [
            {
                "id": a.id,
                "max_speed": render(a.max_speed),
                "breakpoints": [[render(t), render(x)] for t, x in a.trajectory.breakpoints],
            }
            for a in s.agents
        ],
    }


def serialize(s: Schedule) -> str:
    """Canonical JSON text: fixed key order, one agent per line."""
    doc = schedule_to_doc(s)
    head = json.dumps({k: doc[k] for k in ("fence", "time_model", "direction")},
                      separators=(", ", ": "))
    agents = ",\n  ".join(json.dumps(a, separators=(",", ":")) for a in doc["agents"])
    return head[:-1] + ', "agents": [\n  ' + agents + "\n]}\n"


def _violation(where: str, msg: str) -> PatrolError:
    return PatrolError("SCHEMA_VIOLATION", f"{where}: {msg}")


def _field_rational(value, where: str) -> Fraction:
    if not isinstance(value, str):
        raise _violation(where, "expected a rational string")
    try:
        return parse_rational(value)
    except PatrolError as exc:
        raise _violation(where, exc.message) from None


def _expect_keys(obj, keys: set[str], where: str) -> None:
    if not isinstance(obj, dict):
        raise _violation(where, "expected an object")
    missing = keys - obj.keys()
    extra = obj.keys() - keys
    if missing:
        raise _violation(where, f"missing field(s) {sorted(missing)}")
    if extra:
        raise _violation(where, f"unknown field(s) {sorted(extra)}")


def schedule_from_doc(doc) -> Schedule:
    _expect_keys(doc, {"fence", "time_model", "direction", "agents"}, "$")
    _expect_keys(doc["fence"], {"kind", "length"}, "fence")
    kind = doc["fence"]["kind"]
    if kind not in (SEGMENT, CIRCLE):
        raise _violation("fence.kind", f"unknown kind {kind!r}")
    length = _field_rational(doc["fence"]["length"], "fence.length")
    if length <= 0:
        raise _violation("fence.length", "must be positive")
    fence = Fence(kind, length)

    tm = doc["time_model"]
    if not isinstance(tm, dict) or len(tm) != 1 or next(iter(tm)) not in ("periodic", "horizon"):
        raise _violation("time_model", 'expected {"periodic": ...} or {"horizon": ...}')
    key = next(iter(tm))
    span = _field_rational(tm[key], f"time_model.{key}")
    if span <= 0:
        raise _violation(f"time_model.{key}", "must be positive")
    time_model: TimeModel = Periodic(span) if key == "periodic" else Horizon(span)

    direction = doc["direction"]
    if direction not in (NO_CONSTRAINT, UNIDIRECTIONAL):
        raise _violation("direction", f"unknown direction {direction!r}")

    agents_doc = doc["agents"]
    if not isinstance(agents_doc, list) or not agents_doc:
        raise _violation("agents", "expected a nonempty list")
    agents = []
    seen: set[int] = set()
    for i, ad in enumerate(agents_doc):
        where = f"agents[{i}]"
        _expect_keys(ad, {"id", "max_speed", "breakpoints"}, where)
        aid = ad["id"]
        if not isinstance(aid, int) or isinstance(aid, bool) or aid in seen:
            raise _violation(f"{where}.id", "expected a unique integer")
        seen.add(aid)
        speed = _field_rational(ad["max_speed"], f"{where}.max_speed")
        if speed <= 0:
            raise _violation(f"{where}.max_speed", "must be positive")
        bps = ad["breakpoints"]
        if not isinstance(bps, list) or len(bps) < 2:
            raise _violation(f"{where}.breakpoints", "expected at least two breakpoints")
        pts: list[Point] = []
        for j, pair in enumerate(bps):
            w = f"{where}.breakpoints[{j}]"
            if not isinstance(pair, list) or len(pair) != 2:
                raise _violation(w, "expected [time, position]")
            pts.append((_field_rational(pair[0], f"{w}[0]"), _field_rational(pair[1], f"{w}[1]")))
        if pts[0][0] != 0:
            raise _violation(f"{where}.breakpoints[0]", "first time must be 0")
        for j in range(1, len(pts)):
            if pts[j][0] < pts[j - 1][0]:
                raise _violation(f"{where}.breakpoints[{j}]", "non-monotone times")
            if pts[j][0] == pts[j - 1][0] and not _is_wrap_marker(pts[j - 1], pts[j], fence):
                raise _violation(f"{where}.breakpoints[{j}]",
                                 "repeated time outside a wrap marker")
        for j, (_, x) in enumerate(pts):
            if not 0 <= x <= length:
                raise _violation(f"{where}.breakpoints[{j}][1]", "position outside [0, length]")
        if pts[-1][0] != span:
            label = "period closure" if key == "periodic" else "horizon end"
            raise _violation(f"{where}.breakpoints[{len(pts) - 1}]",
                             f"{label}: last time {render(pts[-1][0])} != {render(span)}")
        if key == "periodic":
            d = pts[-1][1] - pts[0][1]
            if (d % length != 0) if fence.closed else d != 0:
                raise _violation(f"{where}.breakpoints[{len(pts) - 1}]",
                                 "period closure: last position differs from first")
        agents.append(Agent(aid, speed, Trajectory(tuple(pts))))
    return Schedule(fence, time_model, tuple(agents), direction)


def deserialize(text: str) -> Schedule:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PatrolError("SCHEMA_VIOLATION",
                          f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return schedule_from_doc(doc)
