"""Command-line front end.

    nucleation nucleus  --norm linf --alpha 3
    nucleation evolve   --norm linf --alpha 3 --steps 4 --out-dir run --render
    nucleation verify   [--norm linf --alpha 4]
    nucleation limit    --norm linf --alpha 3 --t 2
    nucleation singular --norm linf --alpha-min 0.5

Exit codes: 0 ok, 1 verification failure, 2 singular alpha, 3 solver error.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .errors import NucleationError, SingularAlpha
from .limit import (
    LimitMotion,
    fast_regime_limit,
    limit_set,
    nucleus,
)
from .norms import NormSpec, as_alpha, nearest_singular, parse_norm, singular_set
from .solver import DEFAULT_TOL, evolve

EXIT_OK, EXIT_VERIFY, EXIT_SINGULAR, EXIT_SOLVER = 0, 1, 2, 3
TRACE_HEADER = ["k", "cells", "perimeter", "dissipation", "total", "parity",
                "checkerboard", "monotone_edges_ok", "unique"]


@dataclass
class RunConfig:
    norm: NormSpec
    alpha: Fraction | None
    steps: int = 0
    engine: str = "auto"
    constrained: bool = True
    out_dir: Path | None = None
    tol: float = DEFAULT_TOL
    render: bool = False
    seed: int = 0


def fmt(x):
    """Fractions as "p/q" strings, integers as ints, floats as floats."""
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, bool):
        return x
    return x


def _csv_value(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(fmt(x))


def _alpha(text: str) -> Fraction:
    a = Fraction(text)
    if a <= 0:
        raise argparse.ArgumentTypeError("alpha must be positive")
    return a


def _config(args) -> RunConfig:
    norm = parse_norm(args.norm)
    alpha = getattr(args, "alpha", None)
    return RunConfig(
        norm=norm,
        alpha=as_alpha(norm, alpha) if alpha is not None else None,
        steps=getattr(args, "steps", 0),
        engine=getattr(args, "engine", "auto"),
        constrained=getattr(args, "constrained", True),
        out_dir=Path(args.out_dir) if getattr(args, "out_dir", None) else None,
        tol=args.tol,
        render=getattr(args, "render", False),
        seed=getattr(args, "seed", 0),
    )


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2))


def _nearest(cfg: RunConfig) -> dict:
    value, dist = nearest_singular(cfg.norm, cfg.alpha)
    return {"value": fmt(value), "distance": dist}


def cmd_nucleus(cfg: RunConfig) -> int:
    rep = nucleus(cfg.norm, cfg.alpha, cfg.tol)
    _emit({
        "norm": str(cfg.norm),
        "alpha": fmt(rep.alpha),
        "nucleus": [list(p) for p in sorted(rep.nucleus)],
        "pinned": rep.pinned,
        "max_i1": rep.max_i1,
        "velocity": fmt(rep.velocity),
        "kind": rep.kind,
        "polygon": [[fmt(x), fmt(y)] for x, y in rep.polygon],
        "hypotheses": rep.hypotheses,
        "nearest_singular": _nearest(cfg),
    })
    return EXIT_OK


def write_trace(trace, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_HEADER)
        for s in trace.steps:
            w.writerow([_csv_value(v) for v in (
                s.k, len(s.cells), s.energy.perimeter, s.energy.dissipation, s.energy.total,
                s.parity, s.checkerboard, s.monotone_edges_ok, s.unique,
            )])


def cmd_evolve(cfg: RunConfig) -> int:
    trace = evolve(cfg.norm, cfg.alpha, cfg.steps, cfg.engine, cfg.constrained, tol=cfg.tol)
    out = cfg.out_dir or Path(".")
    out.mkdir(parents=True, exist_ok=True)
    write_trace(trace, out / "trace.csv")
    files = ["trace.csv"]
    if cfg.render:
        from .render import plot_trace, write_frames

        frames = write_frames([s.cells for s in trace.steps], out)
        plot_trace(trace, out / "summary.png")
        files += [p.name for p in frames] + ["summary.png"]
    _emit({
        "norm": str(cfg.norm),
        "alpha": fmt(trace.alpha),
        "constrained": cfg.constrained,
        "engine": cfg.engine,
        "cells": [len(s.cells) for s in trace.steps],
        "events": [[e[0], e[1], [list(p) if isinstance(p, tuple) else p for p in e[2]]]
                   for e in trace.events],
        "out_dir": str(out),
        "files": files,
    })
    return EXIT_OK


def cmd_verify(cfg: RunConfig, norms: list[NormSpec] | None, instances: int) -> int:
    from .verify import run_all

    checks = run_all(norms, cfg.alpha, cfg.seed, instances, cfg.tol)
    passed = all(c.passed for c in checks)
    _emit({
        "passed": passed,
        "checks": [c.as_dict() for c in checks],
    })
    return EXIT_OK if passed else EXIT_VERIFY


def cmd_limit(cfg: RunConfig, t: Fraction, regime: str) -> int:
    out: dict = {"norm": str(cfg.norm), "t": fmt(t), "regime": regime}
    if regime == "fast":
        ball = fast_regime_limit(cfg.norm, t)
        out.update(kind=ball.kind, radius=fmt(ball.radius))
        verts, boundary = None, ball.boundary()
    else:
        rep = nucleus(cfg.norm, cfg.alpha, cfg.tol)
        motion = LimitMotion.from_report(rep)
        verts = limit_set(motion, t)
        boundary = None
        out.update(
            alpha=fmt(rep.alpha), kind=motion.kind, velocity=fmt(rep.velocity),
            vertices=[[fmt(x), fmt(y)] for x, y in verts],
        )
    if cfg.render and cfg.out_dir:
        from .render import plot_limit

        cfg.out_dir.mkdir(parents=True, exist_ok=True)
        plot_limit(verts or [], cfg.out_dir / "limit.png", boundary=boundary)
        out["files"] = ["limit.png"]
    _emit(out)
    return EXIT_OK


def cmd_singular(cfg: RunConfig, alpha_min: Fraction) -> int:
    lam = singular_set(cfg.norm, alpha_min)
    _emit({"norm": str(cfg.norm), "alpha_min": fmt(as_alpha(cfg.norm, alpha_min)),
           "values": [fmt(v) for v in lam.values]})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    env_tol = float(os.environ.get("CRYSTAL_TOL", DEFAULT_TOL))
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--norm", default="linf",
                        help="linf | l1 | lp:<p> | elliptic:<a11>,<a12> | wl1:<w1>,<w2> | rectmax")
    common.add_argument("--tol", type=float, default=env_tol)
    common.add_argument("--out-dir")
    common.add_argument("--render", action="store_true")

    p = argparse.ArgumentParser(prog="nucleation", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("nucleus", parents=[common])
    s.add_argument("--alpha", type=_alpha, required=True)

    s = sub.add_parser("evolve", parents=[common])
    s.add_argument("--alpha", type=_alpha, required=True)
    s.add_argument("--steps", type=int, default=5)
    s.add_argument("--engine", choices=["auto", "closed_form", "mincut", "brute"], default="auto")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--constrained", dest="constrained", action="store_true", default=True)
    g.add_argument("--unconstrained", dest="constrained", action="store_false")

    s = sub.add_parser("verify", parents=[common])
    s.set_defaults(norm=None)
    s.add_argument("--alpha", type=_alpha)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--instances", type=int, default=30)

    s = sub.add_parser("limit", parents=[common])
    s.add_argument("--alpha", type=_alpha)
    s.add_argument("--t", type=Fraction, required=True)
    s.add_argument("--regime", choices=["scaled", "fast"], default="scaled")

    s = sub.add_parser("singular", parents=[common])
    s.add_argument("--alpha-min", type=_alpha, required=True)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            norms = [parse_norm(args.norm)] if args.norm else None
            if args.norm is None:
                args.norm = "linf"
            return cmd_verify(_config(args), norms, args.instances)
        cfg = _config(args)
        if args.command == "nucleus":
            return cmd_nucleus(cfg)
        if args.command == "evolve":
            if cfg.steps < 0:
                raise SystemExit("steps must be nonnegative")
            return cmd_evolve(cfg)
        if args.command == "limit":
            if args.t < 0:
                raise SystemExit("t must be nonnegative")
            if args.regime == "scaled" and cfg.alpha is None:
                raise SystemExit("--alpha is required unless --regime fast")
            return cmd_limit(cfg, args.t, args.regime)
        return cmd_singular(cfg, args.alpha_min)
    except SingularAlpha as e:
        print(f"error: alpha {fmt(e.alpha)} is singular; nearest singular value {fmt(e.nearest)}",
              file=sys.stderr)
        return EXIT_SINGULAR
    except NucleationError as e:
        step = getattr(e, "step", None)
        where = f" at step {step}" if step is not None else ""
        print(f"error{where}: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
