"""Exact idle-time verification.

The verifier works on the position-time diagram. At a fixed fence position
``x`` every moving trajectory piece that spans ``x`` contributes one visit
time, and every stationary piece parked at ``x`` contributes a closed visit
interval. The gaps at ``x`` are the complement of those visits on the time
circle of one period (periodic schedules) or inside ``[0, end]`` (finite
horizons).

Between two consecutive *critical positions* the set of spanning pieces is
fixed and every visit time is a linear function of ``x`` whose relative order
cannot change, so every gap length is linear in ``x`` on the open cell. The
supremum over the fence is therefore the largest of

* the gaps at the critical positions themselves, and
* the one-sided limits of the per-cell linear gap functions at both cell
  ends.

The limits matter: at a turning point the touching agent is a visit at the
point itself but not just beside it, so the gap next to a critical position
can be strictly larger than the gap at it. In that case the supremum is not
attained and the witness is reported with ``approach`` ``"left"`` or
``"right"``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .errors import PatrolError
from .model import Fence, Periodic, Piece, Schedule, validate_schedule
from .numeric import render

UNBOUNDED = None

AT, LEFT, RIGHT = "at", "left", "right"
_APPROACH_ORDER = {AT: 0, LEFT: 1, RIGHT: 2}


@dataclass(frozen=True)
class Witness:
    position: Fraction
    gap_start: Fraction
    gap_end: Fraction
    approach: str = AT

    def to_doc(self) -> dict:
        return {"position": render(self.position), "gap_start": render(self.gap_start),
                "gap_end": render(self.gap_end), "approach": self.approach}


@dataclass
class IdleReport:
    idle: Optional[Fraction]
    witnesses: list[Witness] = field(default_factory=list)
    critical_position_count: int = 0

    @property
    def bounded(self) -> bool:
        return self.idle is not None

    def to_doc(self) -> dict:
        return {"idle": "unbounded" if self.idle is None else render(self.idle),
                "witnesses": [w.to_doc() for w in self.witnesses],
                "critical_position_count": self.critical_position_count}


@dataclass(frozen=True)
class GapRegion:
    """Uncovered convex polygon in (position, time) coordinates, counterclockwise."""

    vertices: tuple[tuple[Fraction, Fraction], ...]

    @property
    def area(self) -> Fraction:
        v = self.vertices
        twice = sum(v[i][0] * v[(i + 1) % len(v)][1] - v[(i + 1) % len(v)][0] * v[i][1]
                    for i in range(len(v)))
        return twice / 2

    def to_doc(self) -> dict:
        return {"vertices": [[render(x), render(t)] for x, t in self.vertices]}


@dataclass
class ComparisonReport:
    idle: Optional[Fraction]
    lower_bound: Fraction
    rho_vs_a1: Optional[Fraction] = None
    rho_vs_a2: Optional[Fraction] = None

    def lines(self) -> list[str]:
        out = [f"idle={'unbounded' if self.idle is None else render(self.idle)}",
               f"lower_bound={render(self.lower_bound)}"]
        if self.rho_vs_a1 is not None:
            out.append(f"rho_vs_A1={render(self.rho_vs_a1)}")
        if self.rho_vs_a2 is not None:
            out.append(f"rho_vs_A2={render(self.rho_vs_a2)}")
        return out


# ---------------------------------------------------------------------------
# visits at a single position (direct scan; also the basis of the oracle)


def _targets(fence: Fence, x: Fraction) -> tuple[Fraction, ...]:
    if fence.closed and x in (0, fence.length):
        return (Fraction(0), fence.length)
    return (x,)


def visit_timeline(s: Schedule, x) -> list[tuple[Fraction, Fraction]]:
    """Merged, sorted closed visit intervals at position ``x`` over one period/horizon."""
    x = Fraction(x)
    if not 0 <= x <= s.fence.length:
        raise PatrolError("POSITION_OUT_OF_RANGE", f"x={render(x)} outside [0, {render(s.fence.length)}]")
    targets = _targets(s.fence, x)
    raw: list[tuple[Fraction, Fraction]] = []
    for p in s.pieces():
        if p.stationary:
            if p.p0 in targets:
                raw.append((p.t0, p.t1))
            continue
        lo, hi = (p.p0, p.p1) if p.p0 < p.p1 else (p.p1, p.p0)
        for y in targets:
            if lo <= y <= hi:
                t = p.t0 + (y - p.p0) * (p.t1 - p.t0) / (p.p1 - p.p0)
                raw.append((t, t))
    return _merge(raw, s)


def _merge(raw: list[tuple[Fraction, Fraction]], s: Schedule) -> list[tuple[Fraction, Fraction]]:
    if s.periodic:
        P = s.span
        raw = [(Fraction(0), Fraction(0)) if a == P else (a, b) for a, b in raw]
    raw.sort()
    merged: list[list[Fraction]] = []
    for a, b in raw:
        if merged and a <= merged[-1][1]:
            if b > merged[-1][1]:
                merged[-1][1] = b
        else:
            merged.append([a, b])
    return [(a, b) for a, b in merged]


def _gaps(intervals: Sequence[tuple[Fraction, Fraction]], s: Schedule):
    """Open gaps between visits, as (start, end) pairs; None if never visited (periodic)."""
    span = s.span
    if not intervals:
        return None if s.periodic else [(Fraction(0), span)]
    out = []
    for (_, b), (a, _) in zip(intervals, intervals[1:]):
        if a > b:
            out.append((b, a))
    first, last = intervals[0][0], intervals[-1][1]
    if s.periodic:
        if first + span > last:
            out.append((last, first + span))
    else:
        if first > 0:
            out.insert(0, (Fraction(0), first))
        if span > last:
            out.append((last, span))
    return out


def max_gap_at(s: Schedule, x) -> tuple[Optional[Fraction], list[tuple[Fraction, Fraction]]]:
    """Largest gap at ``x`` and every gap attaining it. ``(None, [])`` means never visited."""
    gaps = _gaps(visit_timeline(s, x), s)
    if gaps is None:
        return UNBOUNDED, []
    if not gaps:
        return Fraction(0), []
    best = max(b - a for a, b in gaps)
    return best, [(a, b) for a, b in gaps if b - a == best]


def sampled_idle(s: Schedule, grid: int) -> Optional[Fraction]:
    """Max gap over the ``grid + 1`` evenly spaced positions ``j * length / grid``.

    Independent of the sweep; it can only under-estimate the true idle time.
    """
    if grid < 1:
        raise PatrolError("BAD_GRID", "grid must be a positive integer")
    L = s.fence.length
    best = Fraction(0)
    for j in range(grid + 1):
        if s.fence.closed and j == grid:
            break  # same point as j = 0
        g, _ = max_gap_at(s, L * j / grid)
        if g is UNBOUNDED:
            return UNBOUNDED
        best = max(best, g)
    return best


# ---------------------------------------------------------------------------
# critical positions


class _Line:
    """Visit time of a moving piece as a function of position: t = a + w*x."""

    __slots__ = ("a", "w", "lo", "hi", "t0", "t1", "piece")

    def __init__(self, p: Piece, shift: Fraction = Fraction(0)) -> None:
        self.w = (p.t1 - p.t0) / (p.p1 - p.p0)
        self.a = p.t0 + shift - p.p0 * self.w
        self.lo, self.hi = (p.p0, p.p1) if p.p0 < p.p1 else (p.p1, p.p0)
        self.t0, self.t1 = p.t0 + shift, p.t1 + shift
        self.piece = p


def _moving_lines(s: Schedule) -> list[_Line]:
    return [_Line(p) for p in s.pieces() if not p.stationary]


def critical_positions(s: Schedule) -> list[Fraction]:
    """Positions where the combinatorial structure of visits can change.

    The visit set at ``x`` changes only at breakpoint positions. Visit order
    changes only where two visit-time functions coincide, i.e. at crossings
    of two pieces in the diagram. On the time circle two visits can also
    coincide modulo the period; since every visit time lies in ``[0, P]``
    that needs one visit at ``0`` and the other at ``P``, which only happens
    at a breakpoint, but copies shifted by ``+P`` are intersected as well so
    the seam is covered without relying on that argument.
    """
    L = s.fence.length
    out = {Fraction(0), L}
    for a in s.agents:
        out.update(x for _, x in a.trajectory.breakpoints)
    lines = _moving_lines(s)
    if s.periodic:
        P = s.span
        lines = lines + [_Line(ln.piece, P) for ln in lines if ln.t0 == 0]
    out.update(_crossings(lines))
    return sorted(x for x in out if 0 <= x <= L)


def _crossings(lines: list[_Line]) -> set[Fraction]:
    # sweep over position; floats only prefilter pairs, every crossing is exact
    found: set[Fraction] = set()
    box = {}
    for ln in lines:
        lo, hi, t0, t1 = float(ln.lo), float(ln.hi), float(ln.t0), float(ln.t1)
        eps = 1e-9 * (1 + max(abs(hi), abs(t1)))
        box[id(ln)] = (lo - eps, hi + eps, t0 - eps, t1 + eps)
    order = sorted(lines, key=lambda ln: box[id(ln)][0])
    active: list[_Line] = []
    for ln in order:
        lo, _, t0, t1 = box[id(ln)]
        active = [o for o in active if box[id(o)][1] >= lo]
        for o in active:
            ob = box[id(o)]
            if ob[3] < t0 or t1 < ob[2] or o.w == ln.w:
                continue
            x = (ln.a - o.a) / (o.w - ln.w)
            if max(o.lo, ln.lo) <= x <= min(o.hi, ln.hi):
                t = ln.a + ln.w * x
                if max(o.t0, ln.t0) <= t <= min(o.t1, ln.t1):
                    found.add(x)
        active.append(ln)
    return found


# ---------------------------------------------------------------------------
# the sweep


@dataclass
class _Cell:
    lo: Fraction
    hi: Fraction
    # visit-time lines (a, w) sorted by time inside the open cell; for
    # periodic schedules the first line is repeated at the end shifted by P,
    # for horizons constant sentinels 0 and end bracket the list
    lines: list[tuple[Fraction, Fraction]]
    unbounded: bool = False


def _iter_structure(s: Schedule, xs: Sequence[Fraction]):
    """Yield ('point', x, intervals) and ('cell', _Cell) in position order."""
    L = s.fence.length
    span = s.span
    lines = sorted(_moving_lines(s), key=lambda ln: ln.lo)
    parked: dict[Fraction, list[tuple[Fraction, Fraction]]] = {}
    for p in s.pieces():
        if p.stationary:
            parked.setdefault(p.p0, []).append((p.t0, p.t1))
    ptr = 0
    active: list[_Line] = []
    for idx, x in enumerate(xs):
        while ptr < len(lines) and lines[ptr].lo <= x:
            active.append(lines[ptr])
            ptr += 1
        active = [ln for ln in active if ln.hi >= x]
        raw = [(ln.a + ln.w * x,) * 2 for ln in active] + parked.get(x, [])
        yield "point", x, raw
        active = [ln for ln in active if ln.hi > x]
        if idx + 1 == len(xs):
            break
        nxt = xs[idx + 1]
        mid = (x + nxt) / 2
        keyed = sorted(((ln.a + ln.w * mid, ln.a, ln.w) for ln in active))
        cell_lines = [(a, w) for _, a, w in keyed]
        if s.periodic:
            if not cell_lines:
                yield "cell", _Cell(x, nxt, [], unbounded=True)
                continue
            cell_lines.append((cell_lines[0][0] + span, cell_lines[0][1]))
        else:
            cell_lines = [(Fraction(0), Fraction(0))] + cell_lines + [(span, Fraction(0))]
        yield "cell", _Cell(x, nxt, cell_lines)


def exact_idle(s: Schedule, check: bool = True) -> IdleReport:
    """Exact supremum of the unvisited time over all fence points."""
    if check:
        report = validate_schedule(s)
        if not report.ok:
            raise PatrolError("INVALID_SCHEDULE", report.summary())
    xs = critical_positions(s)
    L = s.fence.length
    span = s.span
    best: Optional[Fraction] = Fraction(0)
    cands: list[tuple[Fraction, Witness]] = []
    unbounded = False
    seam_raw: list = []

    def offer(value: Fraction, w: Witness) -> None:
        nonlocal best
        if value > best:
            best = value
            cands.clear()
        if value == best:
            cands.append((value, w))

    def point(x: Fraction, raw) -> None:
        nonlocal unbounded
        gaps = _gaps(_merge(raw, s), s)
        if gaps is None:
            unbounded = True
            return
        for a, b in gaps:
            if b - a >= best:
                offer(b - a, _witness(x, a, b, AT, s))

    for kind, *rest in _iter_structure(s, xs):
        if kind == "point":
            x, raw = rest
            if s.fence.closed and x in (0, L):
                seam_raw.extend(raw)
                if x == L:
                    point(Fraction(0), seam_raw)
                continue
            point(x, raw)
            continue
        cell: _Cell = rest[0]
        if cell.unbounded:
            unbounded = True
            continue
        ln = cell.lines
        for (a0, w0), (a1, w1) in zip(ln, ln[1:]):
            for x, side in ((cell.lo, RIGHT), (cell.hi, LEFT)):
                t0 = a0 + w0 * x
                t1 = a1 + w1 * x
                if t1 - t0 >= best:
                    pos = Fraction(0) if (s.fence.closed and x == L) else x
                    offer(t1 - t0, _witness(pos, t0, t1, side, s))
    if unbounded:
        return IdleReport(UNBOUNDED, [], len(xs))
    # a limit witness adds nothing at a position whose own gap already attains the max
    attained = {w.position for _, w in cands if w.approach == AT}
    wits = sorted({w for _, w in cands if w.approach == AT or w.position not in attained},
                  key=lambda w: (w.position, _APPROACH_ORDER[w.approach], w.gap_start))
    return IdleReport(best, wits, len(xs))


def _witness(x: Fraction, a: Fraction, b: Fraction, side: str, s: Schedule) -> Witness:
    if s.periodic:
        P = s.span
        k = a // P
        a, b = a - k * P, b - k * P
    return Witness(x, a, b, side)


def one_sided_gap(s: Schedule, x, side: str, step) -> Optional[Fraction]:
    """Limit of the max gap as the position tends to ``x`` from one side.

    Samples the gap lists at ``x + d`` and ``x + 2d`` (``d = -step`` for the
    left side) and extrapolates every gap linearly before taking the max.
    This is exact as long as both sample points lie in the open cell next to
    ``x``; extrapolating the max itself is not, since the longest gap may
    change inside a cell.
    """
    x, step = Fraction(x), Fraction(step)
    d = step if side == RIGHT else -step
    L = s.fence.length

    def lengths(y: Fraction):
        if s.fence.closed:
            y %= L
        gaps = _gaps(visit_timeline(s, y), s)
        return None if gaps is None else [b - a for a, b in gaps]

    g1, g2 = lengths(x + d), lengths(x + 2 * d)
    if g1 is None or g2 is None:
        return UNBOUNDED
    if len(g1) != len(g2):
        raise PatrolError("BAD_STEP", f"step {render(step)} leaves the cell next to {render(x)}")
    return max((2 * a - b for a, b in zip(g1, g2)), default=Fraction(0))


# ---------------------------------------------------------------------------
# uncovered regions


def analyze_gaps(s: Schedule, candidate_idle, phase=0, check: bool = True) -> list[GapRegion]:
    """Uncovered parts of the diagram strip ``[0, L] x [phase, phase + P]``.

    Each trajectory piece covers the parallelogram obtained by sweeping it
    ``candidate_idle`` upward in time; a point ``(x, t)`` is covered iff ``x``
    is visited somewhere in ``[t - I, t]``. Inside a cell the uncovered part
    of one gap ``(e_k, e_k+1)`` is ``{e_k(x) + I < t < e_k+1(x)}``, a convex
    region. Regions bounded by the same two lines in adjacent cells are
    merged, then clipped to the strip modulo the period. Zero-area pieces are
    dropped (touching boundaries count as covered).
    """
    if not s.periodic:
        raise PatrolError("NOT_PERIODIC", "gap analysis needs a periodic schedule")
    if check:
        report = validate_schedule(s)
        if not report.ok:
            raise PatrolError("INVALID_SCHEDULE", report.summary())
    I = Fraction(candidate_idle)
    if I <= 0:
        raise PatrolError("BAD_PARAMS", "candidate idle time must be positive")
    phase = Fraction(phase)
    P = s.span
    xs = critical_positions(s)
    spans: list[list] = []  # [key, x_lo, x_hi]
    open_spans: dict = {}  # spans that reach the current cell's left end
    for kind, *rest in _iter_structure(s, xs):
        if kind != "cell":
            continue
        cell: _Cell = rest[0]
        keys = []
        if cell.unbounded:
            keys.append("all")
        else:
            ln = cell.lines
            for (a0, w0), (a1, w1) in zip(ln, ln[1:]):
                lo_d = (a1 - a0 - I) + (w1 - w0) * cell.lo
                hi_d = (a1 - a0 - I) + (w1 - w0) * cell.hi
                if lo_d > 0 or hi_d > 0:
                    keys.append((a0 + I, w0, a1, w1))
        still_open = {}
        for key in keys:
            sp = open_spans.get(key)
            if sp is not None and sp[2] == cell.lo:
                sp[2] = cell.hi
            else:
                sp = [key, cell.lo, cell.hi]
                spans.append(sp)
            still_open[key] = sp
        open_spans = still_open
    regions: list[GapRegion] = []
    for key, xa, xb in spans:
        if key == "all":
            polys = [[(xa, phase), (xb, phase), (xb, phase + P), (xa, phase + P)]]
        else:
            polys = [_band(key, xa, xb)]
        for poly in polys:
            if not poly:
                continue
            regions.extend(_wrap_into_strip(poly, phase, P))
    regions.sort(key=lambda r: r.vertices)
    return regions


def _band(key, xa: Fraction, xb: Fraction):
    la, lw, ua, uw = key
    # d(x) = upper - lower, linear; keep the part where d >= 0
    da, db = (ua - la) + (uw - lw) * xa, (ua - la) + (uw - lw) * xb
    if da < 0:
        xa = xa + (xb - xa) * (-da) / (db - da)
    elif db < 0:
        xb = xb - (xb - xa) * (-db) / (da - db)
    if xb <= xa:
        return []
    return [(xa, la + lw * xa), (xb, la + lw * xb), (xb, ua + uw * xb), (xa, ua + uw * xa)]


def _clip(poly, keep_above: bool, level: Fraction):
    """Sutherland-Hodgman against the half-plane t >= level (or t <= level)."""
    def inside(p):
        return p[1] >= level if keep_above else p[1] <= level

    out = []
    n = len(poly)
    for i in range(n):
        cur, nxt = poly[i], poly[(i + 1) % n]
        cin, nin = inside(cur), inside(nxt)
        if cin:
            out.append(cur)
        if cin != nin:
            r = (level - cur[1]) / (nxt[1] - cur[1])
            out.append((cur[0] + (nxt[0] - cur[0]) * r, level))
    return out


def _tidy(poly) -> tuple:
    pts: list = []
    for p in poly:
        if not pts or pts[-1] != p:
            pts.append(p)
    if len(pts) > 1 and pts[0] == pts[-1]:
        pts.pop()
    changed = True
    while changed and len(pts) >= 3:
        changed = False
        for i in range(len(pts)):
            a, b, c = pts[i - 1], pts[i], pts[(i + 1) % len(pts)]
            if (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]) == 0:
                del pts[i]
                changed = True
                break
    if len(pts) < 3:
        return ()
    start = min(range(len(pts)), key=lambda i: pts[i])
    return tuple(pts[start:] + pts[:start])


def _wrap_into_strip(poly, phase: Fraction, P: Fraction) -> list[GapRegion]:
    t_lo = min(p[1] for p in poly)
    t_hi = max(p[1] for p in poly)
    n_lo = (t_lo - phase) // P
    n_hi = (t_hi - phase) // P
    out = []
    n = n_lo
    while n <= n_hi:
        base = phase + n * P
        piece = _clip(_clip(poly, True, base), False, base + P)
        if piece:
            shifted = _tidy([(x, t - n * P) for x, t in piece])
            if shifted:
                reg = GapRegion(shifted)
                if reg.area > 0:
                    out.append(reg)
        n += 1
    return out


# ---------------------------------------------------------------------------
# bounds and ratios


def volume_lower_bound(fence: Fence, speeds: Iterable) -> Fraction:
    speeds = [Fraction(v) for v in speeds]
    if not speeds:
        raise PatrolError("EMPTY_SPEEDS", "need at least one speed")
    if any(v <= 0 for v in speeds):
        raise PatrolError("BAD_PARAMS", "speeds must be positive")
    return fence.length / sum(speeds)


def a1_idle(length, speeds) -> Fraction:
    return 2 * Fraction(length) / sum(Fraction(v) for v in speeds)


def a2_idle(speeds) -> Fraction:
    ordered = sorted((Fraction(v) for v in speeds), reverse=True)
    return 1 / max(i * v for i, v in enumerate(ordered, start=1))


def compare(s: Schedule, report: IdleReport | None = None) -> ComparisonReport:
    report = report or exact_idle(s)
    idle = report.idle
    out = ComparisonReport(idle, volume_lower_bound(s.fence, s.speeds))
    if idle is None:
        return out
    if s.fence.closed:
        out.rho_vs_a2 = idle / a2_idle(s.speeds)
    else:
        out.rho_vs_a1 = idle / a1_idle(s.fence.length, s.speeds)
    return out
