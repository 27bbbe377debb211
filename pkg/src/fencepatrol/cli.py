"""Command-line front end.

Exit codes: 0 success, 1 I/O failure, 2 invalid input, 3 expectation not met.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import generate as gen
from .errors import PatrolError
from .model import deserialize, serialize, validate_schedule
from .numeric import parse_rational, render
from .svg import render_svg
from .verify import a2_idle, analyze_gaps, compare, exact_idle

EXIT_OK, EXIT_IO, EXIT_INVALID, EXIT_EXPECT = 0, 1, 2, 3

ALGOS = ("a1", "a2", "train", "harmonic6", "harmonic32", "greedy", "blocks")


class _Usage(Exception):
    pass


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except PatrolError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _rational_list(text: str) -> list[Fraction]:
    return [_rational(part.strip()) for part in text.split(",")]


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise _Usage(f"--algo {args.algo} needs " + ", ".join(f"--{n}" for n in missing))


def _load(path: str):
    text = Path(path).read_text(encoding="utf-8")
    return deserialize(text)


def _write(path: str, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def _kv(key: str, value) -> str:
    if isinstance(value, Fraction):
        value = render(value)
    elif isinstance(value, bool):
        value = str(value).lower()
    return f"{key}={value}"


# ---------------------------------------------------------------------------


def cmd_generate(args) -> int:
    algo = args.algo
    if algo == "a1":
        _need(args, "speeds")
        out = gen.gen_partition_a1(args.length, args.speeds)
    elif algo == "a2":
        _need(args, "speeds")
        out = gen.gen_runners_a2(args.speeds)
    elif algo == "train":
        _need(args, "a", "b", "k")
        out = gen.gen_train_a3(args.a, args.b, args.k)
    elif algo == "harmonic6":
        out = gen.gen_harmonic6()
    elif algo == "harmonic32":
        out = gen.gen_harmonic32()
    elif algo == "greedy":
        _need(args, "tau", "t")
        plan = gen.greedy_plan(args.tau, args.t)
        for line in _greedy_lines(plan):
            print(line)
        out = gen.gen_greedy_finite(args.tau, args.t, max_agents=args.max_agents)
    else:
        _need(args, "x")
        out = gen.gen_blocks(args.x)

    s = out.schedule
    text = serialize(s)
    _write(args.out, text)
    if algo != "greedy":
        meta = out.metadata
        print(_kv("k", len(s.agents)))
        print(_kv("speed_sum", sum(s.speeds)))
        if out.predicted_idle is not None:
            print(_kv("predicted_idle", out.predicted_idle))
            rho = meta.get("rho")
            if rho is None:
                if s.fence.closed:
                    rho = out.predicted_idle / a2_idle(s.speeds)
                else:
                    rho = out.predicted_idle * sum(s.speeds) / (2 * s.fence.length)
            print(_kv("rho", rho))
        elif "idle_bound" in meta:
            print(_kv("predicted_idle", meta["idle_bound"]))
        if s.periodic:
            print(_kv("period", s.span))
    print(_kv("written", args.out))
    return EXIT_OK


def _greedy_lines(plan: dict) -> list[str]:
    lines = [_kv("k", plan["k"]), _kv("horizon", plan["horizon"]),
             _kv("padding", plan["padding"]), _kv("subintervals", len(plan["allocation"]))]
    for j, (i1, i2) in enumerate(plan["allocation"], start=1):
        lines.append(f"subinterval_{j}=a_1,a_{i1}..a_{i2}")
    lines.append(_kv("harmonic_bound_holds", plan["harmonic_bound_holds"]))
    lines.append(_kv("predicted_idle", f"<={render(plan['tau'])}"))
    return lines


def cmd_verify(args) -> int:
    s = _load(args.input)
    report = validate_schedule(s)
    if not report.ok:
        print(report.summary())
        return EXIT_INVALID
    idle = exact_idle(s, check=False)
    print("idle=" + ("unbounded" if idle.idle is None else render(idle.idle)))
    for w in idle.witnesses:
        print(f"witness position={render(w.position)} gap=[{render(w.gap_start)},"
              f"{render(w.gap_end)}] approach={w.approach}")
    below = idle.idle is not None and idle.idle < 1
    print(f"idle<1: {str(below).lower()}")
    print(_kv("critical_positions", idle.critical_position_count))
    print(report.summary())
    if args.expect is not None and idle.idle != args.expect:
        got = "unbounded" if idle.idle is None else render(idle.idle)
        print(f"expectation failed: expected {render(args.expect)}, got {got}", file=sys.stderr)
        return EXIT_EXPECT
    return EXIT_OK


def cmd_gaps(args) -> int:
    s = _load(args.input)
    regions = analyze_gaps(s, args.idle, phase=args.phase)
    total = sum((r.area for r in regions), Fraction(0))
    print(_kv("regions", len(regions)))
    print(_kv("total_area", total))
    if args.out:
        doc = {"candidate_idle": render(args.idle), "phase": render(args.phase),
               "regions": [r.to_doc() for r in regions]}
        _write(args.out, json.dumps(doc, indent=1) + "\n")
    return EXIT_OK


def cmd_compare(args) -> int:
    s = _load(args.input)
    for line in compare(s).lines():
        print(line)
    return EXIT_OK


def cmd_plot(args) -> int:
    s = _load(args.input)
    if args.periods < 1:
        raise _Usage("--periods must be at least 1")
    if args.width is not None and args.width <= 100:
        raise _Usage("--width must exceed 100")
    _write(args.out, render_svg(s, args.periods, args.idle, args.width))
    print(_kv("written", args.out))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fencepatrol",
                                description="Build and exactly verify fence-patrolling schedules.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="build a schedule file")
    g.add_argument("--algo", required=True, choices=ALGOS)
    g.add_argument("--length", type=_rational, default=Fraction(1), help="segment length (a1)")
    g.add_argument("--speeds", type=_rational_list, help="comma-separated speeds (a1, a2)")
    g.add_argument("--a", type=_rational, help="bouncing agent speed (train)")
    g.add_argument("--b", type=_rational, help="train speed (train)")
    g.add_argument("--k", type=int, help="number of agents (train)")
    g.add_argument("--tau", type=_rational, help="target idle time (greedy)")
    g.add_argument("--t", type=_rational, help="time horizon (greedy)")
    g.add_argument("--max-agents", type=int, default=20_000, help="greedy size limit")
    g.add_argument("--x", type=int, help="number of blocks (blocks)")
    g.add_argument("-o", "--out", required=True)
    g.set_defaults(func=cmd_generate)

    v = sub.add_parser("verify", help="exact idle time of a schedule file")
    v.add_argument("input")
    v.add_argument("--expect", type=_rational)
    v.set_defaults(func=cmd_verify)

    gp = sub.add_parser("gaps", help="uncovered regions at a candidate idle time")
    gp.add_argument("input")
    gp.add_argument("--idle", type=_rational, required=True)
    gp.add_argument("--phase", type=_rational, default=Fraction(0))
    gp.add_argument("--out")
    gp.set_defaults(func=cmd_gaps)

    c = sub.add_parser("compare", help="idle time against the lower bound and baselines")
    c.add_argument("input")
    c.set_defaults(func=cmd_compare)

    pl = sub.add_parser("plot", help="render a position-time diagram")
    pl.add_argument("input")
    pl.add_argument("--periods", type=int, default=1)
    pl.add_argument("--idle", type=_rational)
    pl.add_argument("--width", type=int)
    pl.add_argument("--out", required=True)
    pl.set_defaults(func=cmd_plot)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (PatrolError, _Usage) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
