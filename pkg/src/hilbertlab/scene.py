"""Scene files, domain specs and the face-lattice sidecar cache."""

from __future__ import annotations

import hashlib
import json
import os
from fractions import Fraction
from pathlib import Path
from typing import Any

from .domain import PolytopeDomain, QuadricDomain
from .errors import DegenerateConfiguration
from .examples import GroupGens, make_standard, product_domain, triangle_group
from .projective import HPoint, ProjMap

CACHE_ENV = "HILBERTLAB_CACHE"


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def content_hash(obj: Any) -> str:
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()[:16]


def parse_point(text) -> HPoint:
    """Parse ``"1:2:4"``, ``"1/2,3,1"`` or a JSON list into a point."""
    if isinstance(text, (list, tuple)):
        return HPoint([Fraction(str(c)) for c in text])
    s = str(text).strip()
    if s.startswith("["):
        return HPoint([Fraction(str(c)) for c in json.loads(s)])
    sep = ":" if ":" in s else ","
    return HPoint([Fraction(c.strip()) for c in s.split(sep)])


def _vertices(spec) -> list[HPoint]:
    return [parse_point(v) for v in spec]


def load_polytope(vertices: list[HPoint], cache_dir: str | None = None) -> PolytopeDomain:
    """Build a polytope, reusing a cached face lattice when one exists."""
    cache_dir = cache_dir if cache_dir is not None else os.environ.get(CACHE_ENV)
    if not cache_dir:
        return PolytopeDomain(vertices)
    key = content_hash([v.key() for v in vertices])
    path = Path(cache_dir) / f"{key}.faces.json"
    if path.exists():
        try:
            data = json.loads(path.read_text())
            return PolytopeDomain(vertices, facet_data=(data["facets"], data["incidence"]))
        except (DegenerateConfiguration, KeyError, ValueError):
            pass
    dom = PolytopeDomain(vertices)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(f".{os.getpid()}.tmp")
        tmp.write_text(canonical_json(dom.facet_data()))
        tmp.replace(path)
    except OSError:
        pass
    return dom


BASES = {
    "triangle": ("simplex", 3),
    "interval": ("interval", None),
    "square": ("square", None),
    "simplex3": ("simplex", 4),
    "tetrahedron": ("simplex", 4),
}


def standard_domain(name: str):
    """Domain for a base name (``triangle``, ``square``, ``simplexN``, ``kleinN``...)."""
    if name in BASES:
        kind, d = BASES[name]
        dom = make_standard(kind, d)
    elif name.startswith("simplex") and name[7:].isdigit():
        dom = make_standard("simplex", int(name[7:]) + 1)
    elif name.startswith("klein") and name[5:].isdigit():
        dom = make_standard("klein_ball", int(name[5:]))
    else:
        raise DegenerateConfiguration(f"unknown base {name!r}")
    return dom


def resolve_domain(spec: dict, cache_dir: str | None = None):
    """(domain, cone product or None) from a JSON domain spec.

    Accepted forms: ``{"vertices": [...], "dim": k}``, ``{"kind": "klein_ball",
    "d": n}``, ``{"kind": "quadric", "matrix": [[...]]}``, ``{"kind":
    "standard", "name": "square"}`` and ``{"kind": "product", "base": spec}``.
    A base name ending in ``_star`` is the product over that base.
    """
    kind = spec.get("kind")
    if kind == "klein_ball":
        return QuadricDomain.klein_ball(int(spec["d"])), None
    if kind == "quadric":
        return QuadricDomain([[float(c) for c in row] for row in spec["matrix"]]), None
    if kind == "standard":
        name = spec["name"]
        if name.endswith("_star"):
            return resolve_domain({"kind": "product", "base": {"kind": "standard",
                                                               "name": name[:-5]}}, cache_dir)
        return standard_domain(name), None
    if kind == "product":
        base, _ = resolve_domain(spec["base"], cache_dir)
        cp = product_domain(base)
        return cp.domain, cp
    if spec.get("mode") == "float":
        raise DegenerateConfiguration("float mode needs a quadric domain")
    if "vertices" not in spec:
        raise DegenerateConfiguration("domain spec needs vertices or a kind")
    dom = load_polytope(_vertices(spec["vertices"]), cache_dir)
    if "dim" in spec and int(spec["dim"]) != dom.dim:
        raise DegenerateConfiguration(
            f"scene claims dimension {spec['dim']} but vertices span {dom.dim}")
    return dom, None


def domain_from_spec(spec: dict, cache_dir: str | None = None):
    """Domain from its JSON spec."""
    return resolve_domain(spec, cache_dir)[0]


class Scene:
    """A loaded scene: domain, optional group, simplices and named points."""

    def __init__(self, data: dict, cache_dir: str | None = None):
        self.data = data
        if "domain" not in data:
            raise DegenerateConfiguration("scene needs a domain")
        self.domain, self.product = resolve_domain(data["domain"], cache_dir)
        grp = data.get("group")
        self.group = GroupGens([ProjMap.from_json(m) for m in grp]) if grp else None
        self.simplices = [s["vertices"] if isinstance(s, dict) else s
                          for s in data.get("simplices", [])]
        self.points = {k: parse_point(v) for k, v in data.get("points", {}).items()}
        self.seed = data.get("seed")
        if self.group is not None and isinstance(self.domain, PolytopeDomain):
            self.group.check(self.domain)

    @classmethod
    def from_file(cls, path: str, cache_dir: str | None = None) -> "Scene":
        with open(path) as fh:
            return cls(json.load(fh), cache_dir)

    @classmethod
    def from_base(cls, name: str, cache_dir: str | None = None) -> "Scene":
        return cls({"domain": {"kind": "standard", "name": name}}, cache_dir)

    def default_group(self) -> GroupGens | None:
        if self.group is not None:
            return self.group
        dom = self.domain
        if isinstance(dom, PolytopeDomain) and dom.ambient == 3 and \
                {v.key() for v in dom.vertices} == {(1, 0, 0), (0, 1, 0), (0, 0, 1)}:
            return triangle_group()
        return None
