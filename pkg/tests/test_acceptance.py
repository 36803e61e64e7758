"""Acceptance criteria 1-9, one test each.  Every test records a pass/fail
line (printed, and repeated in the terminal summary) before asserting."""

import json
import os
import random
import subprocess
import sys
import time
from collections import Counter

from cdsite.abelian import AbGroup
from cdsite.chunky import chunky_verdict, compare_with_sheafification, p_add
from cdsite.cli import Options, bundled_sites, read_site, run, suite_commands
from cdsite.cohomology import Inapplicable, cech_h, cohdim_vanishing_check, cohomology, mv_long_exact_check
from cdsite.density import dimension, is_bounded, isomorphism_density
from cdsite.fincat import initial_objects
from cdsite.fixtures import (chunky_fixtures, circle_space, random_cd_structure, random_point_functor,
                             sphere_space, term_category, term_projection, toy_cd, toy_density,
                             toy_disjoint_cd, toy_sheaf_family, toy_space, two_points_space)
from cdsite.presheaves import random_presheaf, representable
from cdsite.sheaves import (cd_sheaf_criterion, is_sheaf, rho, sheafify, square_is_pullback_of_sets,
                            verify_mv_short_exact)
from cdsite.simplicial import (build_KQ, cech_nerve, check_homotopy, check_simplicial_identities,
                               section_homotopy_witness, wp_pi0_check)
from cdsite.siteformat import parse, serialize
from cdsite.spaces import constant_point_functor, realize_as_space, sheaf_from_points
from cdsite.topology import cd_topology, complete_criterion, is_complete, is_regular


def chunky_witnesses():
    out = {}
    for key, fx in chunky_fixtures().items():
        w, reason = chunky_verdict(fx.cat, fx.sums)
        assert w is not None, reason
        out[key] = w
    return out


def regular_sites():
    """Every complete and regular fixture site."""
    sites = {"toy": toy_cd()}
    for make in (circle_space, sphere_space, two_points_space, toy_space):
        sp = make()
        sites[sp.name] = sp.site()[0]
    for key, w in chunky_witnesses().items():
        sites[key] = p_add(w)
    return sites


def test_criterion_1_toy_conformance(verdict):
    t = time.perf_counter()
    P = toy_cd()
    D = toy_density(P.cat)
    facts = {"complete": bool(is_complete(P)), "regular": bool(is_regular(P)),
             "bounded": bool(is_bounded(P, D)), "dim X = 1": dimension(D, "X") == 1}
    elapsed = time.perf_counter() - t
    ok = all(facts.values()) and elapsed < 1.0
    verdict(1, ok, f"{', '.join(k for k, v in facts.items() if v)} in {elapsed:.2f} s")
    assert ok, facts


def test_criterion_2_completeness_criterion(verdict):
    t = time.perf_counter()
    rng = random.Random(2024)
    kinds = Counter()
    n = 500
    for _ in range(n):
        P = random_cd_structure(rng)
        assert len(P.cat.objects) <= 6
        a, b = bool(is_complete(P)), bool(complete_criterion(P))
        if a != b:
            top = cd_topology(P)
            init = set(initial_objects(P.cat))
            empty = any(not s.members for x in P.cat.objects if x not in init for s in top.covering[x])
            kinds[(f"complete={a}", f"criterion={b}", "empty sieve covers a non-initial object" if empty else "other")] += 1
    elapsed = time.perf_counter() - t
    bad = sum(kinds.values())
    detail = f"{bad}/{n} discrepancies in {elapsed:.1f} s"
    if kinds:
        detail += "; " + "; ".join(f"{c} with {', '.join(k)}" for k, c in sorted(kinds.items()))
    ok = bad == 0 and elapsed < 300
    verdict(2, ok, detail)
    assert ok, detail


def test_criterion_3_sheaf_criterion(verdict):
    per_site = 200
    rows = []
    bad = 0
    for name, P in regular_sites().items():
        assert is_complete(P) and is_regular(P), name
        top = cd_topology(P)
        rng = random.Random(name)
        for _ in range(per_site):
            F = random_presheaf(P.cat, rng)
            bad += bool(is_sheaf(F, top)) != bool(cd_sheaf_criterion(F, P))
        rows.append(name)
    P = toy_disjoint_cd()
    assert is_complete(P) and not is_regular(P)
    top = cd_topology(P)
    rng = random.Random("disjoint")
    one_way = 0
    for _ in range(per_site):
        F = random_presheaf(P.cat, rng)
        if cd_sheaf_criterion(F, P):
            one_way += not is_sheaf(F, top)
    ok = bad == 0 and one_way == 0
    verdict(3, ok, f"{bad} discrepancies over {per_site} presheaves on each of {len(rows)} sites; "
                   f"{one_way} failures of criterion => sheaf on the complete non-regular site")
    assert ok


def test_criterion_4_regular_consequences(verdict):
    checked = squares = 0
    failures = []
    for name, P in regular_sites().items():
        top = cd_topology(P)
        sheaves = [rho(P, x)[0] for x in P.cat.objects]
        rng = random.Random(name)
        sheaves += [sheafify(random_presheaf(P.cat, rng), top)[0] for _ in range(5)]
        for q in P.squares:
            squares += 1
            for F in sheaves:
                checked += 1
                if not square_is_pullback_of_sets(F, q):
                    failures.append(f"{name}: F({q.label()})")
            if not wp_pi0_check(q, P):
                failures.append(f"{name}: pi0 at {q.label()}")
    ok = not failures
    verdict(4, ok, f"{checked} square-sheaf pull-back checks and {squares} pi0 checks, {len(failures)} failures")
    assert ok, failures[:5]


def test_criterion_5_mayer_vietoris(verdict):
    t = time.perf_counter()
    short, failures = 0, []
    for name, P in regular_sites().items():
        for q in P.squares:
            short += 1
            if not verify_mv_short_exact(q, P):
                failures.append(f"{name}: {q.label()}")
    sp = circle_space()
    P, names = sp.site()
    real = realize_as_space(P)
    F = sheaf_from_points(constant_point_functor(real.space, AbGroup.free(1)), real)
    long_ok = all(mv_long_exact_check(q, F, P, top=2) for q in P.squares)
    total = names[frozenset(sp.points)]
    h1_poset, backend = cohomology(total, F, 1, P)
    h1_cech = cech_h(total, F, 1, P)
    h1_ok = backend == "poset" and str(h1_poset) == str(h1_cech) == "Z"
    elapsed = time.perf_counter() - t
    ok = not failures and long_ok and h1_ok and elapsed < 30
    verdict(5, ok, f"{short} short exact sequences, {len(failures)} failures; long exact sequence on the circle "
                   f"{'holds' if long_ok else 'fails'}; H^1 = {h1_poset} (poset) and {h1_cech} (Cech); {elapsed:.1f} s")
    assert ok, failures[:5]


def test_criterion_6_cohomological_dimension(verdict):
    P = toy_cd()
    sheaves = toy_sheaf_family(P)
    assert len(sheaves) >= 10
    toy = cohdim_vanishing_check(P, toy_density(P.cat), sheaves, "X", extra=2)
    toy_ok = bool(toy) and [r["degree"] for r in toy.details["rows"][:2]] == [2, 3]
    spaces = []
    for make in (circle_space, sphere_space, toy_space, two_points_space):
        sp = make()
        Ps, names = sp.site()
        real = realize_as_space(Ps)
        rng = random.Random(sp.name)
        F = [sheaf_from_points(constant_point_functor(real.space, g), real)
             for g in (AbGroup.free(1), AbGroup.cyclic(2))]
        F += [sheaf_from_points(random_point_functor(real.space, rng), real) for _ in range(4)]
        D = sp.height_density()
        v = cohdim_vanishing_check(Ps, D, F, names[frozenset(sp.points)], extra=2)
        spaces.append((sp.name, bool(v) and v.details["backend"] == "poset", v.details.get("dimension")))
    ok = toy_ok and all(s[1] for s in spaces)
    verdict(6, ok, f"toy: H^2, H^3 of X vanish on {len(sheaves)} sheaves; "
                   + ", ".join(f"{n} (dim {d}) {'ok' if g else 'fails'}" for n, g, d in spaces))
    assert ok


def section_fixtures():
    """``(category, f, s)`` with ``f s = id`` whose fiber powers exist up to level 3."""
    out = []
    for arity, constants in ((4, 1), (4, 2), (4, 3), (5, 1)):
        cat = term_category(arity, constants)
        for src, dst in (("X", "Y"), ("X2", "X")):
            for f in cat.hom(src, dst):
                for s in cat.hom(dst, src):
                    if cat.compose(f, s) == cat.identity(dst):
                        out.append((cat, f, s))
    # an isomorphism is a section of its inverse
    for w in chunky_witnesses().values():
        cat = w.cat
        for f in cat.morphisms:
            if cat.source(f) == cat.target(f) and not cat.is_identity(f):
                inv = [g for g in cat.hom(cat.target(f), cat.source(f)) if cat.compose(f, g) == cat.identity(cat.target(f))]
                if inv and cat.compose(inv[0], f) == cat.identity(cat.source(f)):
                    out.append((cat, f, inv[0]))
    return out


def test_criterion_7_simplicial_identities(verdict):
    built = bad = 0
    for name, P in regular_sites().items():
        for q in P.squares:
            built += 1
            bad += bool(check_simplicial_identities(build_KQ(q, P.cat, 3).obj))
        for f in P.cat.morphisms:
            try:
                C = cech_nerve(P.cat, f, 3)
            except Inapplicable:
                continue
            built += 1
            bad += bool(check_simplicial_identities(C.obj))
    witnesses = good = 0
    usable = []
    for cat, f, s in section_fixtures():
        try:
            sigma, H, C = section_homotopy_witness(cat, f, s, 3)
        except Inapplicable:
            continue
        usable.append((cat.name, f))
        witnesses += 1
        good += not check_homotopy(H) and not sigma.check() and not check_simplicial_identities(C.obj)
    ok = bad == 0 and witnesses >= 20 and good == witnesses
    verdict(7, ok, f"{built - bad}/{built} objects pass at truncation 3; {good}/{witnesses} section witnesses pass "
                   f"across {len({c for c, _ in usable})} categories")
    assert ok


def test_criterion_8_chunky(verdict):
    per_fixture = 100
    rows, bad = [], 0
    structural = []
    for key, w in chunky_witnesses().items():
        P = p_add(w)
        structural.append(bool(is_complete(P)) and bool(is_regular(P)) and bool(is_bounded(P, isomorphism_density(w.cat))))
        if key == "degenerate":
            continue
        rng = random.Random(key)
        for _ in range(per_fixture):
            bad += not compare_with_sheafification(random_presheaf(w.cat, rng), w)
        rows.append(key)
    ok = len(rows) >= 5 and bad == 0 and all(structural)
    verdict(8, ok, f"{bad} discrepancies over {per_fixture} presheaves on each of {len(rows)} chunky fixtures; "
                   f"p_add complete, regular and bounded on {sum(structural)}/{len(structural)}")
    assert ok


def run_cli(args, hashseed):
    env = dict(os.environ, PYTHONHASHSEED=str(hashseed))
    return subprocess.run([sys.executable, "-m", "cdsite.cli", *args], capture_output=True, env=env).stdout


def test_criterion_9_determinism(verdict):
    mismatches = []
    commands = 0
    opts = Options()
    for name in bundled_sites():
        text = read_site(name)[0]
        doc = parse(text)
        again = parse(serialize(doc))
        if again.canonical() != doc.canonical() or serialize(again) != serialize(doc):
            mismatches.append(f"{name}: round trip")
        for cmd in suite_commands(doc):
            commands += 1
            a, b = run(doc, cmd, opts), run(parse(text), cmd, opts)
            if a.render_text() != b.render_text() or a.render_json() != b.render_json():
                mismatches.append(f"{name}: {' '.join(cmd)}")
        # across processes with different hash seeds
        first = run_cli([name, "suite", "--format", "json"], 1)
        if run_cli([name, "suite", "--format", "json"], 2) != first or not json.loads(first):
            mismatches.append(f"{name}: suite across processes")
    ok = not mismatches
    verdict(9, ok, f"{commands} commands on {len(bundled_sites())} bundled sites, {len(mismatches)} mismatches; "
                   "round trips hold" if ok else f"mismatches: {mismatches[:5]}")
    assert ok, mismatches[:5]
