"""Command line front end: ``riskgeom compute | axioms | svg``.

Exit codes: 0 success, 1 unexpected axiom outcome, 2 configuration error,
3 data error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _jsonio
from . import univariate_risk as ur
from .axiom_harness import REGION_FAMILIES, RISK_SUBJECTS, check_region_axioms, check_risk_axioms
from .cone_algebra import ConeError, RieszCone
from .convex_region import DirectionGrid, GridError, SupportRegion, polygon_2d
from .depth_regions import FAMILIES, RegionSpec
from .empirical import DataError, EmpiricalDist, load
from .risk_engine import region_report

EXIT_OK, EXIT_VIOLATION, EXIT_CONFIG, EXIT_DATA = 0, 1, 2, 3
SCALAR_RISKS = ("es", "var", "em", "em_alpha", "entropic", "neg_mean")
RISK_CHOICES = ("vector",) + SCALAR_RISKS


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    input: str
    cone: str | None = None
    family: str = "zonoid"
    levels: list = field(default_factory=lambda: [0.5])
    directions: int = 64
    risks: list = field(default_factory=lambda: ["vector"])
    gamma: float = 1.0
    output: str | None = None
    svg: str | None = None
    seed: int = 0

    def validate(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"--family: unknown family {self.family!r}")
        if not self.levels:
            raise ConfigError("--alpha/--n: at least one level is required")
        for lev in self.levels:
            try:
                RegionSpec(self.family, lev, RieszCone.identity(1))
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"level {lev!r}: {exc}") from None
        if self.directions < 0:
            raise ConfigError(f"--directions must be nonnegative, got {self.directions}")
        for r in self.risks:
            if r not in RISK_CHOICES:
                raise ConfigError(f"--risk: unknown measure {r!r}; choose from {', '.join(RISK_CHOICES)}")
        if "entropic" in self.risks and not self.gamma > 0:
            raise ConfigError(f"--gamma must be positive, got {self.gamma}")


def _env_seed(seed: int) -> int:
    env = os.environ.get("RISKGEOM_SEED")
    if env is None or env == "":
        return seed
    try:
        return int(env)
    except ValueError:
        raise ConfigError(f"RISKGEOM_SEED must be an integer, got {env!r}") from None


def _grid(d: int, K: RieszCone, directions: int, seed: int) -> DirectionGrid:
    if d == 2:
        return DirectionGrid.build(2, K, n_angles=directions)
    extra = None
    if d >= 3 and directions:
        # no canonical fan above 2D: seeded random directions, closed under negation
        g = np.random.default_rng(seed).normal(size=(directions, d))
        extra = np.vstack([g, -g])
    return DirectionGrid.build(d, K, extra=extra)


def _scalar_block(D: EmpiricalDist, cfg: RunConfig, spec: RegionSpec) -> dict:
    alpha = spec.alpha
    out = {}
    for r in cfg.risks:
        if r == "vector":
            continue
        vals = []
        for i in range(D.dim):
            M = D.marginal(i)
            if r == "es":
                vals.append(ur.es(M, alpha))
            elif r == "var":
                vals.append(ur.var(M, alpha) if alpha < 1 else None)
            elif r == "em":
                n = 1.0 / alpha
                vals.append(ur.em(M, int(round(n))) if abs(n - round(n)) < 1e-12 else None)
            elif r == "em_alpha":
                vals.append(ur.em_alpha(M, alpha))
            elif r == "entropic":
                vals.append(ur.entropic(M, cfg.gamma))
            elif r == "neg_mean":
                vals.append(ur.neg_mean(M))
        out[r] = vals
    return out


def compute_report(cfg: RunConfig) -> dict:
    cfg.validate()
    try:
        D = load(cfg.input)
    except FileNotFoundError:
        raise DataError(f"--input: no such file {cfg.input}") from None
    raw = Path(cfg.input).read_bytes()
    if cfg.cone is None:
        K = RieszCone.identity(D.dim)
    else:
        try:
            K = RieszCone.from_json(Path(cfg.cone), D.dim)
        except FileNotFoundError:
            raise ConfigError(f"--cone: no such file {cfg.cone}") from None
        except (json.JSONDecodeError, ConeError, TypeError, ValueError) as exc:
            raise ConfigError(f"--cone {cfg.cone}: {exc}") from None
    grid = _grid(D.dim, K, cfg.directions, cfg.seed)
    levels = []
    for lev in cfg.levels:
        spec = RegionSpec(cfg.family, lev, K)
        entry = region_report(D, spec, grid)
        if "vector" not in cfg.risks:
            entry.pop("risk_point")
            entry.pop("acceptable")
        scalars = _scalar_block(D, cfg, spec)
        if scalars:
            entry["marginal_risks"] = scalars
        levels.append(entry)
    return {
        "schema": 1,
        "input": {"path": str(cfg.input), "sha256": hashlib.sha256(raw).hexdigest(), "m": D.m, "d": D.dim},
        "family": cfg.family,
        "cone": K.to_json(),
        "directions": len(grid),
        "seed": cfg.seed,
        "gamma": cfg.gamma if "entropic" in cfg.risks else None,
        "levels": levels,
    }


# ---------------------------------------------------------------------------
# svg
# ---------------------------------------------------------------------------


def _clip(poly, u, q):
    """Sutherland-Hodgman: keep the part of ``poly`` with ``<x, u> >= q``."""
    out = []
    n = len(poly)
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        fa, fb = a @ u - q, b @ u - q
        if fa >= 0:
            out.append(a)
        if (fa >= 0) != (fb >= 0):
            out.append(a + (b - a) * (fa / (fa - fb)))
    return out


def _constraint_polygon(dirs, q, corner):
    """Visible window of an upper-set region: clip a box anchored at its corner."""
    span = max(1.0, float(np.ptp(q)) if len(q) > 1 else 1.0)
    lo = corner - 0.5 * span
    hi = corner + 2.0 * span
    poly = [np.array(p) for p in ([lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]])]
    for u, t in zip(dirs, q):
        poly = _clip(poly, np.asarray(u), t)
        if not poly:
            break
    out = []
    for p in poly:
        if not out or np.linalg.norm(p - out[-1]) > 1e-9 * span:
            out.append(p)
    if len(out) > 1 and np.linalg.norm(out[0] - out[-1]) <= 1e-9 * span:
        out.pop()
    return np.array(out)


def _shapes_from_json(obj):
    """``[(vertices, marker or None)]`` from a region or report JSON object."""
    if "levels" in obj:
        entries = obj["levels"]
    elif "region" in obj:
        entries = [obj]
    else:
        entries = [{"region": obj}]
    shapes = []
    for e in entries:
        reg = e["region"]
        marker = None if e.get("risk_point") is None else -np.asarray(e["risk_point"], dtype=float)
        if "support" in reg:
            R = SupportRegion.from_json(reg)
            if R.dim != 2:
                raise GridError(f"svg needs a 2D region, got d={R.dim}")
            shapes.append((polygon_2d(R), marker))
        elif "q" in reg:
            dirs = np.asarray(reg["dirs"], dtype=float)
            if dirs.ndim != 2 or dirs.shape[1] != 2:
                raise GridError(f"svg needs a 2D region, got d={dirs.shape[-1]}")
            q = np.asarray(reg["q"], dtype=float)
            A = np.asarray(e.get("cone", {}).get("A", np.eye(2)), dtype=float)
            unit = A / np.linalg.norm(A, axis=1, keepdims=True)
            # corner: all generator constraints tight
            qg = [q[int(np.argmin(np.linalg.norm(dirs - a, axis=1)))] for a in unit]
            corner = np.linalg.solve(unit, qg)
            shapes.append((_constraint_polygon(dirs, q, corner), marker))
        else:
            raise ConfigError("svg input is neither a region nor a report")
    return shapes


def _fmt(x: float) -> str:
    return format(float(x) + 0.0, ".6g")


def render_svg(shapes, min_extent: float = 0.1, dot_radius: float = 1e-2) -> str:
    pts = [v for verts, _ in shapes for v in verts] + [m for _, m in shapes if m is not None]
    pts = np.array(pts + [[0.0, 0.0]])
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    ext = np.maximum(hi - lo, min_extent)
    mid = 0.5 * (lo + hi)
    lo, hi = mid - 0.5 * ext, mid + 0.5 * ext
    margin = 0.1 * ext
    lo, hi = lo - margin, hi + margin
    w, h = hi - lo
    # y grows downwards in svg: flip the vertical axis
    view = f"{_fmt(lo[0])} {_fmt(-hi[1])} {_fmt(w)} {_fmt(h)}"
    sw = _fmt(0.004 * max(w, h))
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{view}" width="480" height="{_fmt(480 * h / w)}">',
        '<g transform="scale(1,-1)">',
        f'<line class="axis" x1="{_fmt(lo[0])}" y1="0" x2="{_fmt(hi[0])}" y2="0" stroke="#888" stroke-width="{sw}"/>',
        f'<line class="axis" x1="0" y1="{_fmt(lo[1])}" x2="0" y2="{_fmt(hi[1])}" stroke="#888" stroke-width="{sw}"/>',
    ]
    for verts, marker in shapes:
        span = float(np.max(np.ptp(verts, axis=0))) if len(verts) > 1 else 0.0
        if span <= 1e-9:
            c = verts.mean(axis=0)
            lines.append(
                f'<circle class="region" cx="{_fmt(c[0])}" cy="{_fmt(c[1])}" r="{_fmt(dot_radius)}" fill="#1f77b4"/>'
            )
        else:
            d = "M " + " L ".join(f"{_fmt(x)} {_fmt(y)}" for x, y in verts) + " Z"
            lines.append(
                f'<path class="region" d="{d}" fill="#1f77b4" fill-opacity="0.25" stroke="#1f77b4" stroke-width="{sw}"/>'
            )
        if marker is not None:
            r = _fmt(0.012 * max(w, h))
            lines.append(f'<circle class="risk" cx="{_fmt(marker[0])}" cy="{_fmt(marker[1])}" r="{r}" fill="#d62728"/>')
    lines += ["</g>", "</svg>", ""]
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# verbs
# ---------------------------------------------------------------------------


def _levels(args) -> list:
    levels = []
    if args.alpha:
        levels += [float(a) for a in args.alpha]
    if args.n:
        if args.family != "ech":
            raise ConfigError("--n is only meaningful with --family ech")
        levels += [int(n) for n in args.n]
    return levels or [0.5]


def cmd_compute(args) -> int:
    cfg = RunConfig(
        input=args.input,
        cone=args.cone,
        family=args.family,
        levels=_levels(args),
        directions=args.directions,
        risks=args.risk or ["vector"],
        gamma=args.gamma,
        output=args.output,
        svg=args.svg,
        seed=_env_seed(args.seed),
    )
    report = compute_report(cfg)
    if cfg.svg and report["input"]["d"] != 2:
        raise GridError(f"--svg needs 2D data, got d={report['input']['d']}")
    text = _jsonio.dumps(report)
    if cfg.output:
        _jsonio.write_atomic(cfg.output, text)
    else:
        sys.stdout.write(text)
    if cfg.svg:
        _jsonio.write_atomic(cfg.svg, render_svg(_shapes_from_json(report)))
    return EXIT_OK


def cmd_axioms(args) -> int:
    seed = _env_seed(args.seed)
    if args.trials < 1:
        raise ConfigError(f"--trials must be at least 1, got {args.trials}")
    if args.risk is None and args.family is None:
        risks, families = list(RISK_SUBJECTS), list(REGION_FAMILIES)
    else:
        risks, families = args.risk or [], args.family or []
    for r in risks:
        if r not in RISK_SUBJECTS:
            raise ConfigError(f"--risk: unknown measure {r!r}; registered: {', '.join(RISK_SUBJECTS)}")
    for f in families:
        if f not in REGION_FAMILIES:
            raise ConfigError(f"--family: unknown family {f!r}")
    suites = [check_risk_axioms(r, seed, args.trials) for r in risks]
    suites += [check_region_axioms(f, seed, args.trials) for f in families]
    for s in suites:
        status = "ok" if s.ok else "UNEXPECTED"
        detail = ", ".join(f"{a.axiom}:{a.violation_count}/{a.trials}" for a in s.axioms)
        print(f"{s.subject:18s} {status:10s} {detail}", file=sys.stderr)
    report = {"schema": 1, "seed": seed, "trials": args.trials, "ok": all(s.ok for s in suites),
              "suites": [s.to_json() for s in suites]}
    text = _jsonio.dumps(report)
    if args.output:
        _jsonio.write_atomic(args.output, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if report["ok"] else EXIT_VIOLATION


def cmd_svg(args) -> int:
    try:
        obj = json.loads(Path(args.region).read_text())
    except FileNotFoundError:
        raise ConfigError(f"--region: no such file {args.region}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"--region {args.region}: invalid JSON ({exc})") from None
    _jsonio.write_atomic(args.output, render_svg(_shapes_from_json(obj)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="riskgeom", description="Set-valued risk of scenario portfolios.")
    sub = p.add_subparsers(dest="verb", required=True)

    c = sub.add_parser("compute", help="trimmed regions and risk points for a scenario file")
    c.add_argument("--input", required=True, help="scenario CSV (optional 'weight' column) or JSON")
    c.add_argument("--cone", help='JSON file {"A": [[...]]}; default is the nonnegative orthant')
    c.add_argument("--family", default="zonoid", choices=FAMILIES)
    c.add_argument("--alpha", nargs="+", type=float, help="trimming levels")
    c.add_argument("--n", nargs="+", type=int, help="number of copies (ech only)")
    c.add_argument("--directions", type=int, default=64, help="angles in 2D; random extra directions above 2D")
    c.add_argument("--risk", nargs="+", help=f"any of {', '.join(RISK_CHOICES)}")
    c.add_argument("--gamma", type=float, default=1.0, help="entropic risk tolerance")
    c.add_argument("--output", help="report path (default stdout)")
    c.add_argument("--svg", help="also render the 2D regions")
    c.add_argument("--seed", type=int, default=0)
    c.set_defaults(func=cmd_compute)

    a = sub.add_parser("axioms", help="randomised axiom checks")
    a.add_argument("--risk", nargs="+", help=f"any of {', '.join(RISK_SUBJECTS)}")
    a.add_argument("--family", nargs="+", help=f"any of {', '.join(REGION_FAMILIES)}")
    a.add_argument("--trials", type=int, default=100)
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--output")
    a.set_defaults(func=cmd_axioms)

    s = sub.add_parser("svg", help="render a 2D region or report JSON")
    s.add_argument("--region", required=True)
    s.add_argument("--output", required=True)
    s.set_defaults(func=cmd_svg)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DataError as exc:
        print(f"riskgeom: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ConfigError, ConeError, GridError, KeyError, ValueError, TypeError) as exc:
        print(f"riskgeom: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
