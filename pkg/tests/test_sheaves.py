import random

from cdsite.fincat import Square
from cdsite.fixtures import parallel_pair_category, toy_category, toy_disjoint_cd
from cdsite.presheaves import (SetMorphism, SetPresheaf, constant_presheaf,
                               natural_transformations, random_presheaf, representable, terminal_presheaf)
from cdsite.sheaves import (BGFunctor, PointedPresheaf, bg_check, cd_sheaf_criterion, compactness_check,
                            factor_through_unit, free_abelian, is_separated, is_sheaf, pushout_check,
                            regularity_epi_check, rho, sheafify, square_is_pullback_of_sets,
                            verify_mv_short_exact, z_rho, z_rho_map)
from cdsite.topology import CdStructure, cd_topology

import oracle


def covering_pairs(top):
    return {(x, s.members) for x in top.cat.objects for s in top.covering[x]}


def toy_presheaf(fx, fa, fy="*", fb="*"):
    """``X`` and ``A`` sections from lists, ``e`` restricts by position (clamped) and
    every other restriction lands on the single section below."""
    cat = toy_category()
    at = {"0": ["*"], "A": fa, "B": [fb], "Y": [fy], "X": fx}

    def restrict(f, s):
        if f == "e":
            return fa[min(fx.index(s), len(fa) - 1)]
        return at[cat.source(f)][0]

    return SetPresheaf(cat, at, restrict)


def test_sheaf_decider_matches_brute_force(toy_p):
    top = cd_topology(toy_p)
    cov = covering_pairs(top)
    rng = random.Random(4)
    for _ in range(60):
        F = random_presheaf(toy_p.cat, rng)
        assert bool(is_sheaf(F, top)) == oracle.is_sheaf(F, cov, toy_p.cat)


def test_representable_of_x_is_a_sheaf(toy, toy_p):
    F = representable(toy, "X")
    assert is_sheaf(F, cd_topology(toy_p))
    assert cd_sheaf_criterion(F, toy_p)


def test_two_point_constant_presheaf_is_not_a_sheaf(toy, toy_p):
    F = constant_presheaf(toy, ["u", "v"])
    assert not is_sheaf(F, cd_topology(toy_p))
    v = cd_sheaf_criterion(F, toy_p)
    assert not v and v.witness == "0"
    assert is_separated(terminal_presheaf(toy), cd_topology(toy_p))


def test_criterion_on_hand_built_presheaves(toy_p):
    good = toy_presheaf(["1", "2"], ["1", "2"])
    assert good.validate() == []
    assert cd_sheaf_criterion(good, toy_p) and is_sheaf(good, cd_topology(toy_p))
    small = toy_presheaf(["1"], ["1", "2"])
    v = cd_sheaf_criterion(small, toy_p)
    assert not v and v.witness.name == "main"
    assert not is_sheaf(small, cd_topology(toy_p))


def test_square_pullback_of_sets(toy, toy_p):
    main = toy_p.square("main")
    assert square_is_pullback_of_sets(representable(toy, "X"), main)
    assert square_is_pullback_of_sets(constant_presheaf(toy, ["u", "v"]), main)
    assert not square_is_pullback_of_sets(toy_presheaf(["1"], ["1", "2"]), main)


def test_sheafification_of_a_sheaf_is_isomorphic(toy, toy_p):
    top = cd_topology(toy_p)
    for F in (representable(toy, "X"), representable(toy, "0"), toy_presheaf(["1", "2"], ["1", "2"])):
        aF, unit = sheafify(F, top)
        assert unit.is_iso()


def test_sheafification_kills_extra_initial_sections(toy, toy_p):
    top = cd_topology(toy_p)
    aF, unit = sheafify(constant_presheaf(toy, ["u", "v"]), top)
    assert aF.size("0") == 1
    assert is_sheaf(aF, top)
    assert unit.validate() == []


def test_sheafification_is_idempotent_and_universal(toy_p):
    top = cd_topology(toy_p)
    rng = random.Random(9)
    targets = [representable(toy_p.cat, "X"), toy_presheaf(["1", "2"], ["1", "2"])]
    for _ in range(12):
        F = random_presheaf(toy_p.cat, rng, max_gens=2)
        aF, unit = sheafify(F, top)
        assert is_sheaf(aF, top)
        assert unit.validate() == []
        aaF, unit2 = sheafify(aF, top)
        assert unit2.is_iso()
        for G in targets:
            for phi in natural_transformations(F, G):
                psi = factor_through_unit(unit, phi)
                assert psi is not None and psi.validate() == []


def test_sheafified_random_presheaves_satisfy_the_criterion(toy_p):
    top = cd_topology(toy_p)
    rng = random.Random(12)
    for _ in range(20):
        aF, _ = sheafify(random_presheaf(toy_p.cat, rng), top)
        assert cd_sheaf_criterion(aF, toy_p)
        assert all(square_is_pullback_of_sets(aF, q) for q in toy_p.squares)


def test_criterion_implies_sheaf_on_a_complete_structure():
    P = toy_disjoint_cd()
    top = cd_topology(P)
    rng = random.Random(2)
    for _ in range(40):
        F = random_presheaf(P.cat, rng)
        if cd_sheaf_criterion(F, P):
            assert is_sheaf(F, top)


def test_rho_of_initial_object(toy_p):
    r0, _ = rho(toy_p, "0")
    assert all(r0.size(x) == 0 for x in toy_p.cat.objects if x != "0")
    assert r0.size("0") == 1


def test_free_abelian_sheaf_on_rho(toy_p):
    zx = z_rho(toy_p, "X").sheaf
    assert zx("X").invariants() == (1, ())
    assert zx("0").is_trivial() and zx("A").invariants() == (1, ())
    z0 = z_rho(toy_p, "0").sheaf
    assert all(z0(x).invariants() == (0, ()) for x in toy_p.cat.objects if x != "0")
    assert z_rho_map(toy_p, "e").validate() == []


def test_free_abelian_on_the_point_is_not_constant_on_initial(toy, toy_p):
    z = free_abelian(terminal_presheaf(toy), cd_topology(toy_p)).sheaf
    assert z("0").is_trivial()
    assert z("X").invariants() == (1, ())


def test_mayer_vietoris_on_toy_squares(toy_p):
    for q in toy_p.squares:
        assert verify_mv_short_exact(q, toy_p)


def test_mayer_vietoris_needs_regularity():
    cat, q = parallel_pair_category()
    v = verify_mv_short_exact(q, CdStructure(cat, [q]))
    assert not v and v.reason.startswith("precondition violated")


def test_regularity_epi_check(toy_p):
    for q in toy_p.squares:
        assert regularity_epi_check(toy_p, q)


def test_squares_become_pushouts_of_sheaves(toy_p):
    for q in toy_p.squares:
        assert pushout_check(toy_p, q)


def test_compactness_of_rho(toy, toy_p):
    stages = [toy_presheaf(["1"], ["1"]), toy_presheaf(["1", "2"], ["1", "2"]),
              toy_presheaf(["1", "2", "3"], ["1", "2", "3"])]
    top = cd_topology(toy_p)
    assert all(is_sheaf(F, top) for F in stages)
    chain = [SetMorphism(F, G, {x: {s: s for s in F(x)} for x in toy.objects})
             for F, G in zip(stages, stages[1:])]
    assert all(m.validate() == [] for m in chain)
    for u in toy.objects:
        assert compactness_check(toy_p, u, chain)


def pointed(F, base=None):
    return PointedPresheaf(F, base or {x: F(x)[0] for x in F.cat.objects})


def boundaries(P, levels, image):
    """``image[q]`` maps every level-``q+1`` section over ``B`` to a section over ``X``."""
    out = {}
    for sq in P.squares:
        out[sq.label()] = {}
        for q in range(len(levels) - 1):
            T1, T0 = levels[q + 1], levels[q]
            out[sq.label()][q] = {s: image(q, sq, s, T0) for s in T1.presheaf(sq.b)}
    return out


def test_bg_functor_with_locally_trivial_top_level(toy, toy_p):
    top_level = toy_presheaf(["*", "t"], ["*"])
    levels = [pointed(terminal_presheaf(toy)), pointed(top_level)]
    T = BGFunctor(levels, boundaries(toy_p, levels, lambda q, sq, s, T0: T0.base[sq.x]))
    assert not is_sheaf(top_level, cd_topology(toy_p))
    assert bg_check(T, toy_p)


def test_bg_functor_exactness_violation_is_reported(toy, toy_p):
    bottom = toy_presheaf(["*", "t"], ["*"])
    levels = [pointed(bottom), pointed(terminal_presheaf(toy))]
    T = BGFunctor(levels, boundaries(toy_p, levels, lambda q, sq, s, T0: T0.base[sq.x]))
    v = bg_check(T, toy_p)
    assert not v and "exactness" in v.reason
