"""Position-time diagrams as SVG.

Position runs left to right, time runs downward. This is the only place
where rationals are turned into floats.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional

from .model import Schedule
from .numeric import render

MARGIN = 40
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2",
           "#17becf", "#7f7f7f", "#bcbd22")


def _num(v: float) -> str:
    text = f"{v:.3f}".rstrip("0").rstrip(".")
    return "0" if text in ("", "-0") else text


def render_svg(s: Schedule, periods: int = 1, idle: Optional[Fraction] = None,
               width: Optional[int] = None) -> str:
    """Draw every agent over ``periods`` periods (or the whole horizon).

    Each agent is one ``<path>``; a wrap across the circle seam starts a new
    subpath. With ``idle`` the coverage parallelogram of every moving piece
    is drawn translucent and, for periodic schedules, the uncovered regions
    are filled in red.
    """
    from .verify import analyze_gaps

    if periods < 1:
        raise ValueError("periods must be at least 1")
    L = s.fence.length
    reps = periods if s.periodic else 1
    span = s.span * reps
    scale = Fraction(width - 2 * MARGIN, 1) / L if width else Fraction(100)
    if scale <= 0:
        raise ValueError("width too small")

    def px(x) -> str:
        return _num(MARGIN + float(Fraction(x) * scale))

    def py(t) -> str:
        return _num(MARGIN + float(Fraction(t) * scale))

    w_px = 2 * MARGIN + float(L * scale)
    h_px = 2 * MARGIN + float(span * scale)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
           f'width="{_num(w_px)}" height="{_num(h_px)}" '
           f'viewBox="0 0 {_num(w_px)} {_num(h_px)}">',
           f'<rect x="{px(0)}" y="{py(0)}" width="{_num(float(L * scale))}" '
           f'height="{_num(float(span * scale))}" fill="none" stroke="#000" stroke-width="1"/>',
           f'<text x="{_num(w_px / 2)}" y="{MARGIN - 22}" text-anchor="middle" '
           f'font-size="12">position</text>',
           f'<text x="{MARGIN - 8}" y="{_num(h_px / 2)}" text-anchor="middle" font-size="12" '
           f'transform="rotate(-90 {MARGIN - 8} {_num(h_px / 2)})">time</text>',
           f'<text x="{px(0)}" y="{MARGIN - 6}" font-size="10">0</text>',
           f'<text x="{px(L)}" y="{MARGIN - 6}" font-size="10" text-anchor="end">{render(L)}</text>',
           f'<text x="{MARGIN - 4}" y="{py(span)}" font-size="10" '
           f'text-anchor="end">{render(span)}</text>']

    if idle is not None:
        idle = Fraction(idle)
        out.append(f'<clipPath id="frame"><rect x="{px(0)}" y="{py(0)}" '
                   f'width="{_num(float(L * scale))}" height="{_num(float(span * scale))}"/></clipPath>')
        out.append('<g class="coverage" clip-path="url(#frame)" fill="#888" fill-opacity="0.15" '
                   'stroke="none">')
        for r in range(reps):
            off = r * s.span
            for p in s.pieces():
                if p.stationary:
                    continue
                pts = [(p.p0, p.t0 + off), (p.p1, p.t1 + off),
                       (p.p1, p.t1 + off + idle), (p.p0, p.t0 + off + idle)]
                coords = " ".join(f"{px(x)},{py(t)}" for x, t in pts)
                out.append(f'<polygon points="{coords}"/>')
        out.append("</g>")
        if s.periodic:
            out.append('<g class="uncovered" fill="#e00" fill-opacity="0.6" stroke="none">')
            regions = analyze_gaps(s, idle)
            for r in range(reps):
                off = r * s.span
                for reg in regions:
                    coords = " ".join(f"{px(x)},{py(t + off)}" for x, t in reg.vertices)
                    out.append(f'<polygon points="{coords}"/>')
            out.append("</g>")

    for n, agent in enumerate(s.agents):
        color = PALETTE[n % len(PALETTE)]
        parts = []
        for r in range(reps):
            off = r * s.span
            prev = None
            for t, x in agent.trajectory.breakpoints:
                t = t + off
                jump = prev is None or prev[0] == t and prev[1] != x
                parts.append(f"{'M' if jump else 'L'}{px(x)} {py(t)}")
                prev = (t, x)
        out.append(f'<path class="agent" data-agent="{agent.id}" fill="none" '
                   f'stroke="{color}" stroke-width="1.5" d="{" ".join(parts)}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
