"""Acceptance suite: fifteen criteria, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v`` or directly with
``python tests/test_acceptance.py``.  Every criterion runs at its stated
sample size and tolerance.
"""

from __future__ import annotations

import contextlib
import io
import itertools
import json
import math
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest

from hilbertlab import (HPoint, HilbertLength, ProjMap, build_projection,
                        canonicalize, flat_coords, flat_distance, join_opposite, make_standard,
                        parallel_family, product_domain, project, recognize, simplex_distance,
                        slide, stabilizer_lattice, supporting_sets, thicken, thin_certify,
                        isolation_diameter, morse_check)
from hilbertlab.cli import main as cli_main
from hilbertlab.examples import core_face_samples
from hilbertlab.projections import SampleSpec, coarse_gap
from hilbertlab.relhyp import perturbed_geodesic
from hilbertlab.sampling import random_in_face, random_in_simplex, random_interior
from hilbertlab.simplices import sampled_hausdorff

SEED = 20240601


def _triangle():
    return make_standard("simplex", 3)


def _simplex3():
    return make_standard("simplex", 4)


def _flat3(dom):
    return recognize(dom, [HPoint([1, 0, 0, 0]), HPoint([0, 1, 0, 0]), HPoint([0, 0, 1, 1])])


def _length(face, a, b) -> HilbertLength:
    return HilbertLength.zero() if a == b else face.domain.hilbert_distance(a, b)


def _random_partition(items, rng, blocks=None):
    """Random partition of a list into nonempty blocks."""
    items = list(items)
    rng.shuffle(items)
    k = blocks if blocks is not None else int(rng.integers(1, len(items) + 1))
    cuts = sorted(rng.choice(np.arange(1, len(items)), size=k - 1, replace=False).tolist())
    return [frozenset(items[a:b]) for a, b in zip([0] + cuts, cuts + [len(items)])]


def _simplex_in(domain, vertex_set, rng):
    """A random properly embedded simplex of the face with the given vertices.

    Faces of a simplex domain are simplices, so one point per block of a
    partition of the vertices spans a properly embedded simplex.
    """
    face = domain.face(vertex_set)
    pts = [random_in_face(domain.face(block), rng, 1)[0]
           for block in _random_partition(sorted(vertex_set), rng)]
    return recognize(face.domain, pts)


# ---------------------------------------------------------------------------
# criteria


def crit_metric_axioms():
    domains = {"interval": make_standard("interval"), "triangle": _triangle(),
               "square": make_standard("square"), "3-simplex": _simplex3(),
               "product": product_domain(_triangle()).domain}
    t0 = time.perf_counter()
    violations = 0
    rng = np.random.default_rng(SEED)
    for dom in domains.values():
        pts = random_interior(dom, rng, 30000)
        for x, y, z in zip(pts[0::3], pts[1::3], pts[2::3]):
            dxy = dom.hilbert_distance(x, y)
            if dxy != dom.hilbert_distance(y, x):
                violations += 1
            if dom.hilbert_distance(x, z) > dxy + dom.hilbert_distance(y, z):
                violations += 1
    elapsed = time.perf_counter() - t0
    return violations == 0 and elapsed < 60.0, \
        f"5 domains x 10^4 triples, violations={violations}, time={elapsed:.1f}s (< 60s)"


def crit_closed_form():
    T = _triangle()
    worked = T.hilbert_distance(HPoint([1, 1, 1]), HPoint([1, 2, 4]))
    ok = worked.q == 4
    mismatches = 0
    rng = np.random.default_rng(SEED + 2)
    d3 = _simplex3()
    cases = [(make_standard("interval"), None), (T, None), (d3, None), (d3, _flat3(d3))]
    for dom, S in cases:
        S = S or recognize(dom, dom.vertices)
        pts = random_in_simplex(S, rng, 2000)
        for x, y in zip(pts[:1000], pts[1000:]):
            if simplex_distance(S, x, y) != dom.hilbert_distance(x, y):
                mismatches += 1
    return ok and mismatches == 0, \
        f"worked q={worked.q} (H={worked.value:.6f}), 4 simplices x 10^3 pairs, " \
        f"mismatches={mismatches}"


def crit_flat_isometry():
    rng = np.random.default_rng(SEED + 3)
    d3 = _simplex3()
    bad = 0
    for S in (recognize(_triangle(), _triangle().vertices), _flat3(d3)):
        pts = random_in_simplex(S, rng, 2000)
        for x, y in zip(pts[:1000], pts[1000:]):
            if flat_distance(flat_coords(S, x), flat_coords(S, y)) != simplex_distance(S, x, y):
                bad += 1
    return bad == 0, f"2 simplices x 10^3 pairs, mismatches={bad}"


def crit_aut_invariance():
    T = _triangle()
    rng = np.random.default_rng(SEED + 4)
    letters = [ProjMap.diagonal([4, 2, 1]), ProjMap.diagonal([1, 4, 2]),
               ProjMap.permutation([1, 2, 0]), ProjMap.permutation([1, 0, 2])]
    letters += [g.inverse() for g in letters]
    bad = 0
    for _ in range(100):
        g = ProjMap.identity(3)
        for i in rng.integers(0, len(letters), size=int(rng.integers(1, 9))):
            g = letters[int(i)] @ g
        pts = random_interior(T, rng, 200)
        for x, y in zip(pts[:100], pts[100:]):
            if T.hilbert_distance(g(x), g(y)) != T.hilbert_distance(x, y):
                bad += 1
    return bad == 0, f"10^2 words x 10^2 pairs, violations={bad}"


def crit_projection_soundness():
    d3 = _simplex3()
    S = _flat3(d3)
    rng = np.random.default_rng(SEED + 5)
    sets = supporting_sets(d3, S)
    projs = [build_projection(d3, S, H) for H in sets]  # raises on a failed direct sum
    outside = 0
    for x in random_interior(d3, rng, 10000):
        for L in projs:
            if not S.contains(project(L, x)):
                outside += 1
    wrong_face = 0
    nb = 0
    faces = [J for r in (1, 2) for J in itertools.combinations(range(3), r)]
    per = math.ceil(100 / len(faces))
    for J in faces:
        G = d3.face_containing(S.point([1 if j in J else 0 for j in range(3)]))
        for x in random_in_face(G, rng, per):
            nb += 1
            for L in projs:
                if d3.locate(project(L, x)).face != G:
                    wrong_face += 1
    ok = len(sets) == 2 and outside == 0 and wrong_face == 0
    return ok, f"{len(sets)} supporting sets pass the direct-sum check, " \
        f"L(x) outside S: {outside}/10^4 per set, boundary face errors: {wrong_face}/{nb}"


def crit_coarse_equivalence():
    d3 = _simplex3()
    S = _flat3(d3)
    n = 1000
    step = 1e-3
    pts = random_interior(d3, np.random.default_rng(SEED + 6), 2 * n)
    first = coarse_gap(d3, S, SampleSpec(n=n), method="grid", step=step, points=pts[:n]).delta1
    second = coarse_gap(d3, S, SampleSpec(n=n), method="grid", step=step, points=pts[n:]).delta1
    d_n, d_2n = first, max(first, second)
    # values below the grid step are indistinguishable from zero at this resolution
    scale = max(d_n, d_2n, step)
    change = abs(d_2n - d_n) / scale
    ok = math.isfinite(d_2n) and change < 0.05
    return ok, f"delta1(n={n})={d_n:.3e}, delta1(2n)={d_2n:.3e}, relative change={change:.2%} " \
        f"(grid step {step})"


def crit_crampons():
    cp = product_domain(_triangle())
    dom = cp.domain
    rng = np.random.default_rng(SEED + 7)
    worst = -math.inf
    viol = 0
    for k in range(1000):
        size = int(rng.integers(1, 6))
        A = frozenset(rng.choice(6, size=size, replace=False).tolist())
        B = frozenset(range(6)) - A
        FA, FB = dom.face(A), dom.face(B)
        p1, p2 = random_in_face(FA, rng, 2)
        q1, q2 = random_in_face(FB, rng, 2)
        S1, S2 = recognize(dom, [p1, q1]), recognize(dom, [p2, q2])
        bound = (_length(FA, p1, p2) + _length(FB, q1, q2)).value
        slack = sampled_hausdorff(S1, S2, n=50, seed=k) - bound
        worst = max(worst, slack)
        viol += slack > 1e-6
    return viol == 0, f"10^3 quadruples, violations={viol}, worst excess={worst:.2e} (<= 1e-6)"


def crit_slide_bound():
    cp = product_domain(_triangle())
    dom = cp.domain
    rng = np.random.default_rng(SEED + 8)
    viol = 0
    worst = -math.inf
    for k in range(100):
        blocks = _random_partition(range(6), rng, int(rng.integers(2, 7)))
        S = recognize(dom, [random_in_face(dom.face(b), rng, 1)[0] for b in blocks])
        repl = {j: random_in_face(F, rng, 1)[0] for j, F in enumerate(S.faces)}
        res = slide(S, repl, hausdorff_samples=100, seed=k)
        excess = res.hausdorff_estimate - res.bound.value
        worst = max(worst, excess)
        viol += excess > 1e-9
    return viol == 0, f"10^2 slides, violations={viol}, worst excess={worst:.2e}"


def crit_thickening():
    cp = product_domain(_triangle())
    lines = []
    ok = True
    for R in (0.5, 1.0, 2.0):
        th = thicken(cp, R, seed=SEED)
        ok = ok and th.inner_ok and th.outer_ok and th.outer_bound == 4 * R
        lines.append(f"R={R}: inner max H={0.5 * math.log(th.inner_max_q):.4f} "
                     f"outer max={th.outer_max:.3f}/{th.outer_bound}")
    return ok, "; ".join(lines)


def crit_parallel_family():
    cp = product_domain(_triangle())
    fam = parallel_family(cp, cp.base.vertices, 1.0)
    distinct = len({S.key() for S in fam}) == 8
    parallel = fam.flags["parallel"] == "verified"
    growth = []
    for i, j in itertools.combinations(range(8), 2):
        rep = isolation_diameter(cp.domain, fam[i], fam[j], budgets=(2, 4, 8), n=60,
                                 seed=SEED + 8 * i + j)
        growth.append(rep.growth)
    core = core_face_samples(cp, cp.base.vertices, 0.5)
    canon = [canonicalize(cp.domain, S, core) for S in fam]
    spread = 0.0
    for C in canon[1:]:
        for j, F in enumerate(canon[0].faces):
            w = next(v for v, G in zip(C.vertices, C.faces) if G == F)
            spread = max(spread, _length(F, canon[0].vertices[j], w).value)
    ok = distinct and parallel and all(growth) and spread <= 1e-6
    return ok, f"8 distinct={distinct}, parallel={parallel}, growth on " \
        f"{sum(growth)}/28 pairs, canonical spread={spread:.1e} (<= 1e-6)"


def crit_join_dimension():
    rng = np.random.default_rng(SEED + 10)
    doms = [product_domain(_triangle()).domain, _simplex3()]
    bad = 0
    for k in range(100):
        dom = doms[k % 2]
        n = len(dom.vertices)
        A = frozenset(rng.choice(n, size=int(rng.integers(1, n)), replace=False).tolist())
        B = frozenset(range(n)) - A
        S1, S2 = _simplex_in(dom, A, rng), _simplex_in(dom, B, rng)
        J = join_opposite(dom, S1, S2)
        bad += J.dim != S1.dim + S2.dim + 1
    return bad == 0, f"10^2 joins, exceptions={bad}"


def _klein_triangle(R):
    r = math.tanh(R)
    return [[1, r * math.cos(a), r * math.sin(a)] for a in (0, 2 * math.pi / 3, 4 * math.pi / 3)]


def _flat_triangle(R):
    e = math.exp(2 * R)
    return [[1, e, 1], [1, 1, e], [1, 1 / e, 1 / e]]


def _klein_deltas():
    K = make_standard("klein_ball", 3)
    return [thin_certify(K, *_klein_triangle(R)).delta for R in (2, 4, 8)]


def crit_thinness():
    kd = _klein_deltas()
    T = _triangle()
    td = [thin_certify(T, *_flat_triangle(R)).delta for R in (2, 4, 8)]
    klein_ok = max(kd) - min(kd) <= 0.1 * max(kd)
    flat_ok = td[0] < td[1] < td[2]
    return klein_ok and flat_ok, \
        f"Klein deltas {[round(d, 3) for d in kd]} within 10%: {klein_ok}; " \
        f"triangle deltas {[round(d, 3) for d in td]} increasing: {flat_ok}"


def crit_morse():
    K = make_standard("klein_ball", 3)
    delta = max(_klein_deltas())
    rng = np.random.default_rng(SEED + 13)
    fails = 0
    worst = 0.0
    for k in range(1000):
        c = (0.5, 1.0, 2.0)[k % 3]
        ends = []
        for _ in range(2):
            th = rng.uniform(0, 2 * math.pi)
            r = math.tanh(rng.uniform(0, 3))
            ends.append([1.0, r * math.cos(th), r * math.sin(th)])
        P, T = perturbed_geodesic(K, ends[0], ends[1], c, 40, rng)
        res = morse_check(K, P, T, c, delta)
        fails += not res.passed
        worst = max(worst, res.gap / res.bound)
    return fails == 0, f"10^3 paths, delta={delta:.3f}, failures={fails}, " \
        f"worst gap/bound={worst:.3f}"


def crit_stabilizer():
    rep = stabilizer_lattice([ProjMap.diagonal([4, 2, 1]), ProjMap.diagonal([1, 2, 4])],
                             _triangle().vertices)
    return rep.rank == 2, f"rank={rep.rank} (expected 2), log vectors={rep.log_vectors}"


_SCENE3 = {"domain": {"vertices": [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]},
           "simplices": [[[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 1]]],
           "points": {"x": [1, 2, 3, 5]}}


def _commands(scene):
    return [
        ["dist", "1:1:1", "1:2:4"],
        ["simplices", "--base", "square"],
        ["project", "--scene", scene, "--mode", "linear", "--samples", "5"],
        ["project", "--scene", scene, "--mode", "closest", "--samples", "5"],
        ["project", "--scene", scene, "--mode", "gap", "--samples", "10"],
        ["certify", "thin", "--base", "klein3", "--points", "1:0:0;1:1/2:0;1:0:1/2"],
        ["certify", "aps", "--base", "triangle", "--samples", "10"],
        ["certify", "isolation", "--base", "triangle_star", "--samples", "40"],
        ["certify", "transverse", "--base", "square", "--points", "1:0:0;1:1/2:0;1:0:1/2"],
        ["certify", "morse", "--points", "1:1:1;1:2:4", "--c", "0.5"],
        ["example", "product"],
        ["example", "thicken", "--R", "0.5", "--samples", "15"],
        ["example", "parallel"],
        ["example", "rescale", "--steps", "3", "--samples", "40"],
        ["example", "orbit", "--words", "6"],
    ]


def _run_cli(argv):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf), contextlib.redirect_stderr(io.StringIO()):
        code = cli_main(argv)
    return code, buf.getvalue()


def crit_determinism():
    with tempfile.TemporaryDirectory() as tmp:
        scene = str(Path(tmp) / "scene.json")
        Path(scene).write_text(json.dumps(_SCENE3))
        differ = []
        failed = []
        cmds = _commands(scene)
        for argv in cmds:
            base = argv + ["--seed", "7", "--json"]
            c1, o1 = _run_cli(base + ["--threads", "1"])
            c8, o8 = _run_cli(base + ["--threads", "8"])
            if c1 != 0:
                failed.append(" ".join(argv[:2]))
            if (c1, o1) != (c8, o8):
                differ.append(" ".join(argv[:2]))
    return not differ and not failed, \
        f"{len(cmds)} commands, differing={differ}, nonzero exit={failed}"


CRITERIA = [
    (1, "exact metric axioms", crit_metric_axioms),
    (2, "closed-form distance", crit_closed_form),
    (3, "flat isometry", crit_flat_isometry),
    (4, "automorphism invariance", crit_aut_invariance),
    (5, "projection soundness", crit_projection_soundness),
    (6, "coarse equivalence", crit_coarse_equivalence),
    (7, "segment Hausdorff bound", crit_crampons),
    (8, "slide bound", crit_slide_bound),
    (9, "thickening sandwich", crit_thickening),
    (10, "parallel family", crit_parallel_family),
    (11, "join dimension", crit_join_dimension),
    (12, "hyperbolic vs flat thinness", crit_thinness),
    (13, "quasi-geodesic stability", crit_morse),
    (14, "stabilizer lattice rank", crit_stabilizer),
    (15, "CLI determinism", crit_determinism),
]


def _line(num, name, ok, detail):
    return f"[{'PASS' if ok else 'FAIL'}] criterion {num:2d} {name}: {detail}"


@pytest.mark.parametrize("num,name,fn", CRITERIA, ids=[f"c{n:02d}" for n, _, _ in CRITERIA])
def test_criterion(num, name, fn, capsys):
    ok, detail = fn()
    with capsys.disabled():
        print("\n" + _line(num, name, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    failures = 0
    for num, name, fn in CRITERIA:
        ok, detail = fn()
        failures += not ok
        print(_line(num, name, ok, detail), flush=True)
    sys.exit(1 if failures else 0)
