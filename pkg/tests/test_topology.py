import pytest

from cdsite.chunky import chunky_verdict, p_add
from cdsite.fincat import CategoryError, Square, thin_category
from cdsite.fixtures import (chunky_fixtures, parallel_pair_category, toy_cd, toy_disjoint_cd,
                             toy_with_nonstrict_initial, two_points_space)
from cdsite.topology import (CdStructure, Sieve, all_sieves, cd_topology, check_topology_axioms,
                             complete_criterion, derived_square, empty_sieve, is_complete, is_regular,
                             is_sieve, maximal_sieve, minimal_simple_sieves, pullback_sieve,
                             regular_criterion_derived_square, sieve_generated_by, simple_coverings,
                             slice_cd, smallest_topology, squares_isomorphic, union_cd)

import oracle


def members(s):
    return set(s.members)


def test_generated_sieves(toy):
    assert sieve_generated_by(toy, "X", toy.morphisms_into("X")) == maximal_sieve(toy, "X")
    assert members(sieve_generated_by(toy, "X", ["e", "p"])) == {"e", "p", "d", "0X"}
    assert members(sieve_generated_by(toy, "X", [])) == set()


def test_generated_sieve_rejects_wrong_target(toy):
    with pytest.raises(CategoryError):
        sieve_generated_by(toy, "X", ["a"])


def test_pullback_sieves(toy):
    ep = sieve_generated_by(toy, "X", ["e", "p"])
    assert pullback_sieve(toy, "id_X", ep) == ep
    assert pullback_sieve(toy, "d", ep) == maximal_sieve(toy, "B")
    for f in toy.morphisms:
        top = maximal_sieve(toy, toy.target(f))
        assert pullback_sieve(toy, f, top) == maximal_sieve(toy, toy.source(f))


def test_pullback_sieve_is_functorial(toy):
    for x in toy.objects:
        for s in all_sieves(toy, x):
            for f in toy.morphisms_into(x):
                for g in toy.morphisms_into(toy.source(f)):
                    lhs = pullback_sieve(toy, g, pullback_sieve(toy, f, s))
                    assert lhs == pullback_sieve(toy, toy.compose(f, g), s)


def test_all_sieves_matches_brute_force(toy):
    for x in toy.objects:
        assert {s.members for s in all_sieves(toy, x)} == set(oracle.all_sieves(toy, x))
        assert all(is_sieve(toy, s) for s in all_sieves(toy, x))


def covering_pairs(top):
    return {(x, s.members) for x in top.cat.objects for s in top.covering[x]}


def test_no_generators_gives_maximal_sieves(toy):
    top = smallest_topology(toy, [])
    assert covering_pairs(top) == {(x, frozenset(toy.morphisms_into(x))) for x in toy.objects}


def test_maximal_generator_is_trivial(toy):
    top = smallest_topology(toy, [("X", maximal_sieve(toy, "X"))])
    assert top.count() == len(toy.objects)


def test_toy_topology_has_seven_sieves(toy, toy_p):
    top = cd_topology(toy_p)
    assert top.count() == 7
    gens = [("X", frozenset({"e", "p", "d", "0X"})), ("0", frozenset())]
    assert covering_pairs(top) == oracle.topology_fixed_point(toy, gens)
    assert {x: len(top.covering[x]) for x in toy.objects} == {"0": 2, "A": 1, "B": 1, "X": 2, "Y": 1}
    assert check_topology_axioms(top) == []


def test_empty_structure_covers_only_the_initial_object_emptily(toy):
    top = cd_topology(CdStructure(toy, []))
    assert empty_sieve("0") in top.covering["0"]
    assert top.count() == len(toy.objects) + 1


def test_cd_topology_needs_an_initial_object():
    cat = thin_category("ab", [])
    with pytest.raises(CategoryError):
        cd_topology(CdStructure(cat, []))


def test_two_point_space_covering(toy):
    P, names = two_points_space().site()
    top = cd_topology(P)
    total = names[frozenset({"p", "q"})]
    legs = [names[frozenset({"p"})], names[frozenset({"q"})]]
    cat = P.cat
    s = sieve_generated_by(cat, total, [cat.hom(u, total)[0] for u in legs])
    assert top.is_covering(s)
    gens = [(q.x, sieve_generated_by(cat, q.x, [q.e, q.p]).members) for q in P.squares]
    gens.append((names[frozenset()], frozenset()))
    assert covering_pairs(top) == oracle.topology_fixed_point(cat, gens)


def test_simple_coverings(toy, toy_p):
    fams = simple_coverings(toy_p)
    for x in toy.objects:
        assert any(f.legs == frozenset({toy.identity(x)}) for f in fams[x])
    assert any(f.legs == frozenset({"e", "p"}) for f in fams["X"])
    assert any(f.legs == frozenset({"id_A", "0A"}) for f in fams["A"])


def test_simple_coverings_generate_covering_sieves(toy_p):
    top = cd_topology(toy_p)
    cat = toy_p.cat
    for x, fams in simple_coverings(toy_p).items():
        for f in fams:
            assert top.is_covering(f.sieve(cat))


def test_minimal_simple_sieves_are_minimal(toy_p):
    cat = toy_p.cat
    for x, mins in minimal_simple_sieves(toy_p).items():
        simple = {f.sieve(cat).members for f in simple_coverings(toy_p)[x]}
        for m in mins:
            assert m in simple
            assert not any(s < m for s in simple)


def test_toy_is_complete(toy_p):
    assert is_complete(toy_p)
    assert complete_criterion(toy_p)


def test_nonstrict_initial_breaks_completeness():
    cat = toy_with_nonstrict_initial()
    P = CdStructure(cat, toy_cd(cat).squares)
    v = is_complete(P)
    assert not v
    assert v.witness.target == "U" and not v.witness.members
    c = complete_criterion(P)
    assert not c and "initial" in c.reason


def test_identity_square_structure_is_complete(toy):
    P = CdStructure(toy, [Square("A", "A", "A", "A", "id_A", "id_A", "id_A", "id_A")])
    assert is_complete(P) and complete_criterion(P)


def test_toy_is_regular(toy_p):
    assert is_regular(toy_p)


def test_parallel_pair_is_not_regular():
    cat, q = parallel_pair_category()
    v = is_regular(CdStructure(cat, [q]))
    assert not v and v.reason.startswith("condition 2")


def test_disjoint_square_is_complete_but_not_regular():
    P = toy_disjoint_cd()
    assert is_complete(P)
    v = is_regular(P)
    assert not v and v.reason.startswith("condition 1")
    assert not regular_criterion_derived_square(P)


def test_additive_structures_are_regular():
    for key in ("finset3", "fam-z2"):
        fx = chunky_fixtures()[key]
        w, _ = chunky_verdict(fx.cat, fx.sums)
        assert is_regular(p_add(w))


def test_derived_square_criterion_implies_regularity(toy, toy_p):
    c = regular_criterion_derived_square(toy_p)
    assert not c or is_regular(toy_p)
    ident = CdStructure(toy, [Square("A", "A", "A", "A", "id_A", "id_A", "id_A", "id_A")])
    assert regular_criterion_derived_square(ident)
    assert is_regular(ident)
    d = derived_square(toy, ident.squares[0])
    assert d is not None and squares_isomorphic(toy, d, ident.squares[0])


def test_membership_is_up_to_isomorphism():
    fx = chunky_fixtures()["fam-z2"]
    w, _ = chunky_verdict(fx.cat, fx.sums)
    P = p_add(w)
    orbit = P.orbit()
    assert len(orbit) > len(P.squares)
    assert all(P.contains(q) for q in orbit)


def test_slices_and_unions_stay_complete(toy, toy_p):
    assert is_complete(slice_cd(toy_p, "X"))
    assert is_complete(slice_cd(toy_p, "0"))
    ident = CdStructure(toy, [Square("A", "A", "A", "A", "id_A", "id_A", "id_A", "id_A")])
    assert is_complete(union_cd(toy_p, ident))


def test_topology_axioms_recheck_on_random_structures():
    import random

    from cdsite.fixtures import random_cd_structure

    rng = random.Random(3)
    for _ in range(30):
        P = random_cd_structure(rng)
        assert check_topology_axioms(cd_topology(P)) == []
