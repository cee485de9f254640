"""The ``hilbertlab`` command-line front end.

Every command prints one JSON report (with ``--json``) or ``key = value``
lines.  Reports carry the command name, the library version and a content
hash of the inputs; wall time goes to stderr so stdout depends only on the
inputs and the seed.  Exit codes: 0 ok, 2 precondition, 3 budget,
4 invariant trap.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .domain import PolytopeDomain, QuadricDomain
from .errors import DegenerateConfiguration, EmptyFamily, HilbertLabError
from .examples import (benzecri_rescale, core_face_samples, orbit_sample, parallel_family,
                       product_domain, thicken)
from .projections import (SampleSpec, build_projection, closest_point, coarse_gap, project,
                          supporting_sets)
from .projective import HPoint
from .relhyp import (aps_check, isolation_diameter, morse_check, perturbed_geodesic,
                     projection_constants, thin_certify, transverse_measure)
from .sampling import random_interior
from .scene import Scene, content_hash, parse_point
from .simplices import (SimplexFamily, canonicalize, enumerate_max_simplices, recognize)

# flags that never change the report
_NEUTRAL = {"threads", "csv", "json", "scene", "func"}


class Runner:
    """Order-preserving map over a thread pool of fixed size."""

    def __init__(self, threads: int):
        self.threads = max(1, int(threads))

    def map(self, fn: Callable, items: Sequence) -> list:
        items = list(items)
        if self.threads == 1 or len(items) < 2:
            return [fn(x) for x in items]
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            return list(pool.map(fn, items))


class Context:
    def __init__(self, args):
        self.args = args
        if args.scene:
            self.scene = Scene.from_file(args.scene)
        else:
            self.scene = Scene.from_base(args.base)
        self.domain = self.scene.domain
        seed = args.seed if args.seed is not None else self.scene.seed
        self.seed = int(seed) if seed is not None else 0
        self.runner = Runner(args.threads)

    def points(self, names: Sequence[str], count: int | None = None) -> list[HPoint]:
        """Points from --points, else named scene points."""
        if self.args.points:
            pts = [parse_point(s) for s in self.args.points.split(";") if s.strip()]
        else:
            missing = [n for n in names if n not in self.scene.points]
            if missing:
                raise DegenerateConfiguration(f"missing points {missing}; pass --points")
            pts = [self.scene.points[n] for n in names]
        if count is not None and len(pts) != count:
            raise DegenerateConfiguration(f"expected {count} points, got {len(pts)}")
        return pts

    def polytope(self) -> PolytopeDomain:
        if not isinstance(self.domain, PolytopeDomain):
            raise DegenerateConfiguration("this command needs a polytope domain")
        return self.domain

    def simplex(self, index: int = 0):
        spec = getattr(self.args, "simplex", None)
        if spec and not spec.lstrip("-").isdigit():
            verts = [parse_point(s) for s in spec.split(";") if s.strip()]
        else:
            i = int(spec) if spec else index
            if i >= len(self.scene.simplices):
                raise DegenerateConfiguration(f"scene has no simplex {i}; pass --simplex")
            verts = [parse_point(v) for v in self.scene.simplices[i]]
        return recognize(self.polytope(), verts)

    def family(self) -> list:
        if isinstance(self.domain, QuadricDomain):
            return []
        if self.scene.simplices:
            return [recognize(self.domain, [parse_point(v) for v in s])
                    for s in self.scene.simplices]
        return list(enumerate_max_simplices(self.domain, self.args.budget or 200000))

    def inputs_hash(self) -> str:
        args = {k: v for k, v in vars(self.args).items() if k not in _NEUTRAL}
        args["seed"] = self.seed
        return content_hash({"scene": self.scene.data, "args": args})


# ---------------------------------------------------------------------------
# commands


def _sample_points(ctx: Context, n: int) -> list[HPoint]:
    if ctx.args.points or "x" in ctx.scene.points:
        return ctx.points(["x"])
    return random_interior(ctx.polytope(), np.random.default_rng(ctx.seed), n)


def cmd_dist(ctx: Context) -> dict:
    pts = [parse_point(p) for p in ctx.args.xy] if ctx.args.xy else ctx.points(["x", "y"])
    if len(pts) != 2:
        raise DegenerateConfiguration("dist needs exactly two points")
    return ctx.domain.hilbert_distance(pts[0], pts[1]).to_json()


def _canonical_json(domain, S, core) -> dict | None:
    try:
        return canonicalize(domain, S, core).to_json()
    except HilbertLabError:
        return None


def cmd_simplices(ctx: Context) -> dict:
    a = ctx.args
    if isinstance(ctx.domain, QuadricDomain):
        fam = SimplexFamily([])
        fam.coverage = "strictly convex domain: no simplices of positive dimension"
        out = fam.to_json()
        out["canonical"] = []
        return out
    fam = enumerate_max_simplices(ctx.domain, a.budget or 200000, a.max_dim, a.max_candidates)
    out = fam.to_json()
    cp = ctx.scene.product
    if cp is not None:
        core = core_face_samples(cp, cp.base.vertices, 0.5)
        out["canonical"] = ctx.runner.map(lambda S: _canonical_json(ctx.domain, S, core),
                                          fam.members)
    else:
        out["canonical"] = [S.to_json() for S in fam.members]
    return out


def cmd_project(ctx: Context) -> dict:
    a = ctx.args
    dom = ctx.polytope()
    S = ctx.simplex()
    if a.mode == "linear":
        sets = supporting_sets(dom, S)
        projs = ctx.runner.map(lambda H: build_projection(dom, S, H), sets)
        pts = _sample_points(ctx, a.samples or 5)
        rows = []
        for L in projs:
            rows.append({"projection": L.to_json(),
                         "images": [project(L, x).to_json() for x in pts]})
        return {"simplex": S.to_json(), "points": [x.to_json() for x in pts],
                "projections": rows}
    if a.mode == "closest":
        pts = _sample_points(ctx, a.samples or 5)
        res = ctx.runner.map(lambda x: closest_point(dom, S, x), pts)
        return {"simplex": S.to_json(),
                "results": [{"x": x.to_json(), "point": c.point.to_json(), "radius": c.radius,
                             "flat_diameter": c.flat_diameter} for x, c in zip(pts, res)]}
    spec = SampleSpec(n=a.samples or 200, seed=ctx.seed)
    rep = coarse_gap(dom, S, spec, method="grid", step=a.resolution or 1e-3)
    if a.constants:
        pc = projection_constants(dom, S, n=min(spec.n, 50), seed=ctx.seed)
        rep.delta2, rep.delta4 = pc["delta2"], pc["delta4"]
    out = rep.to_json()
    out["simplex"] = S.to_json()
    return out


def _isolation_pair(ctx: Context):
    cp = ctx.scene.product
    if not ctx.scene.simplices and cp is not None:
        fam = parallel_family(cp, cp.base.vertices, ctx.args.R)
        return fam[0], fam[len(fam) - 1]
    if len(ctx.scene.simplices) < 2:
        raise DegenerateConfiguration("isolation needs two scene simplices or a product scene")
    return ctx.simplex(0), recognize(ctx.polytope(),
                                     [parse_point(v) for v in ctx.scene.simplices[1]])


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def cmd_certify(ctx: Context) -> dict:
    a = ctx.args
    dom = ctx.domain
    res = a.resolution or 1e-2
    which = a.which
    if which == "thin":
        x, y, z = ctx.points(["x", "y", "z"], 3)
        return thin_certify(dom, x, y, z, res, a.method).to_json()
    if which == "aps":
        fam = ctx.family()
        if not fam:
            raise EmptyFamily("the domain has no simplices to project to")
        return aps_check(dom, fam, a.projection, a.samples or 20, seed=ctx.seed).to_json()
    if which == "isolation":
        S1, S2 = _isolation_pair(ctx)
        rep = isolation_diameter(ctx.polytope(), S1, S2, _floats(a.radii), _floats(a.budgets),
                                 a.samples or 100, ctx.seed)
        if a.csv:
            with open(a.csv, "w", newline="") as fh:
                fh.write(rep.to_csv())
        return rep.to_json()
    if which == "transverse":
        tri = ctx.points(["x", "y", "z"], 3)
        return transverse_measure(ctx.polytope(), ctx.family(), tri, a.kappa, res).to_json()
    # morse
    pts = ctx.points(["x", "y"])
    if len(pts) not in (2, 3):
        raise DegenerateConfiguration("morse needs x, y and optionally z")
    x, y = pts[0], pts[1]
    delta = a.delta
    if delta is None:
        delta = thin_certify(dom, x, y, pts[2], res, "exhaustive").delta if len(pts) == 3 else 0.0
    rng = np.random.default_rng(ctx.seed)
    path, times = perturbed_geodesic(dom, x, y, a.c, a.samples or 50, rng)
    return morse_check(dom, path, times, a.c, delta, res).to_json()


def _product(ctx: Context):
    if ctx.scene.product is not None:
        return ctx.scene.product
    return product_domain(ctx.polytope())


def cmd_example(ctx: Context) -> dict:
    a = ctx.args
    which = a.which
    if which == "product":
        cp = _product(ctx)
        return {"base": cp.base.to_json(), "domain": cp.domain.to_json(),
                "core_generators": [[str(c) for c in v] for v in cp.core_generators()]}
    if which == "thicken":
        cp = _product(ctx)
        return thicken(cp, a.R, a.samples or 60, ctx.seed).to_json()
    if which == "parallel":
        cp = _product(ctx)
        fam = parallel_family(cp, cp.base.vertices, a.R)
        core = core_face_samples(cp, cp.base.vertices, 0.5)
        canon = ctx.runner.map(lambda S: _canonical_json(cp.domain, S, core), fam.members)
        keys = {json.dumps(c, sort_keys=True) for c in canon if c is not None}
        out = fam.to_json()
        out["canonical"] = canon
        out["distinct_canonical"] = len(keys)
        return out
    if which == "rescale":
        dom = ctx.polytope()
        a_, b_, c_ = ctx.points(["a", "b", "c"], 3) if (a.points or "a" in ctx.scene.points) \
            else (HPoint([1, 1, 0]), HPoint([1, 0, 0]), HPoint([1, 0, 1]))
        steps = ctx.runner.map(lambda n: benzecri_rescale(dom, a_, b_, c_, n, a.samples or 100),
                               range(a.steps + 1))
        return {"steps": [s.to_json() for s in steps]}
    # orbit
    dom = ctx.polytope()
    gens = ctx.scene.default_group()
    if gens is None:
        raise DegenerateConfiguration("the scene has no group")
    base = ctx.points(["basepoint"], 1)[0] if (a.points or "basepoint" in ctx.scene.points) \
        else None
    return orbit_sample(dom, gens, base, a.words, a.eps).to_json()


# ---------------------------------------------------------------------------
# argument parsing and output


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--scene", help="scene JSON file")
    p.add_argument("--base", default="triangle",
                   help="standard domain when no scene is given (triangle, square, "
                        "interval, simplexN, kleinN, NAME_star)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--resolution", type=float, default=None)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--points", help="points separated by ';', e.g. '1:1:1;1:2:4'")
    p.add_argument("--json", action="store_true", help="print the JSON report")
    p.add_argument("--csv", help="write table-shaped reports to this CSV file")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="hilbertlab",
                                     description="Exact Hilbert geometry of convex domains.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dist", parents=[common], help="Hilbert distance of two points")
    p.add_argument("xy", nargs="*", help="two points such as 1:1:1 1:2:4")
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("simplices", parents=[common], help="maximal embedded simplices")
    p.add_argument("--max-dim", type=int, default=None)
    p.add_argument("--max-candidates", type=int, default=None)
    p.set_defaults(func=cmd_simplices)

    p = sub.add_parser("project", parents=[common], help="projections to a simplex")
    p.add_argument("--simplex", help="scene simplex index or vertices separated by ';'")
    p.add_argument("--mode", choices=["linear", "closest", "gap"], default="linear")
    p.add_argument("--constants", action="store_true",
                   help="also estimate delta2 and delta4 in gap mode")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("certify", parents=[common], help="coarse geometry certificates")
    p.add_argument("which", choices=["thin", "aps", "isolation", "transverse", "morse"])
    p.add_argument("--method", choices=["one_side", "exhaustive"], default="one_side")
    p.add_argument("--projection", choices=["closest", "linear"], default="closest")
    p.add_argument("--simplex", help="scene simplex index or vertices separated by ';'")
    p.add_argument("--radii", default="0.5,1,2")
    p.add_argument("--budgets", default="2,4,8")
    p.add_argument("--R", type=float, default=1.0)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=None)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("example", parents=[common], help="worked examples")
    p.add_argument("which", choices=["product", "thicken", "parallel", "rescale", "orbit"])
    p.add_argument("--R", type=float, default=1.0)
    p.add_argument("--words", type=int, default=8)
    p.add_argument("--steps", type=int, default=6)
    p.add_argument("--eps", type=float, default=1e-3)
    p.set_defaults(func=cmd_example)
    return parser


def _scalar(v) -> bool:
    return v is None or isinstance(v, (str, int, float, bool))


def render(report: dict, as_json: bool) -> str:
    if as_json:
        return json.dumps(report, sort_keys=True, indent=2)
    lines = []
    for k in sorted(report):
        v = report[k]
        lines.append(f"{k} = {v if _scalar(v) else json.dumps(v, sort_keys=True)}")
    return "\n".join(lines)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        ctx = Context(args)
        result = args.func(ctx)
        report = {"command": args.command if not hasattr(args, "which")
                  else f"{args.command} {args.which}",
                  "version": __version__, "inputs_hash": ctx.inputs_hash(), "seed": ctx.seed}
        report.update(result)
        code = 0
    except HilbertLabError as exc:
        report = {"error": exc.code, "message": str(exc), "exit_code": exc.exit_code}
        code = exc.exit_code
    except (OSError, ValueError, KeyError) as exc:
        report = {"error": "InvalidInput", "message": f"{type(exc).__name__}: {exc}",
                  "exit_code": 2}
        code = 2
    print(render(report, args.json or code != 0))
    print(f"wall_time = {time.perf_counter() - t0:.3f} s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
