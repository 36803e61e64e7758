from cdsite.chunky import chunky_verdict, p_add
from cdsite.density import (DensityStructure, dimension, is_bounded, is_reducing_square, isomorphism_density,
                            reducing_squares, validate_density)
from cdsite.fincat import is_isomorphism
from cdsite.fixtures import chunky_fixtures, circle_space, sphere_space, toy_density
from cdsite.topology import cd_topology


def covering_pairs(top):
    return {(x, s.members) for x in top.cat.objects for s in top.covering[x]}


def edited(D, changes):
    levels = dict(D.levels)
    levels.update({k: frozenset(v) for k, v in changes.items()})
    return DensityStructure(D.cat, levels, D.stabilization)


def test_toy_density_is_valid(toy_d):
    assert validate_density(toy_d) == []


def test_levels_stabilize_at_isomorphisms(toy, toy_d):
    for x in toy.objects:
        for n in (toy_d.stabilization, toy_d.stabilization + 3):
            assert toy_d.level(x, n) == {f for f in toy.morphisms_into(x) if is_isomorphism(toy, f)}


def test_planted_decreasing_violation(toy_d):
    D = edited(toy_d, {("X", 0): {"id_X", "0X"}})
    assert any(v.startswith("(4) e in D_1(X)") for v in validate_density(D))


def test_planted_initial_violation(toy_d):
    D = edited(toy_d, {("A", 0): {"id_A"}})
    assert "(2) 0A missing from D_0(A)" in validate_density(D)


def test_planted_composition_violation(toy_d):
    D = edited(toy_d, {("X", 0): {"id_X", "e"}, ("X", 1): {"id_X"}})
    bad = validate_density(D)
    assert any(v.startswith("(5) e∘0A") for v in bad)


def test_planted_missing_identity(toy_d):
    D = edited(toy_d, {("B", 0): {"0B"}})
    assert any(v.startswith("(3)") for v in validate_density(D))


def test_toy_dimensions(toy, toy_d):
    assert {x: dimension(toy_d, x) for x in toy.objects} == {"0": 0, "A": 0, "B": 0, "X": 1, "Y": 0}


def test_height_density_dimensions():
    for sp, top in ((circle_space(), 1), (sphere_space(), 2)):
        P, names = sp.site()
        D = sp.height_density()
        assert validate_density(D) == []
        assert dimension(D, names[frozenset(sp.points)]) == top
        assert dimension(D, names[frozenset()]) == 0


def test_toy_squares_are_reducing(toy_p, toy_d):
    for q in toy_p.squares:
        rep = is_reducing_square(q, toy_d, toy_p)
        assert rep and rep.levels_checked == toy_d.stabilization + 2
        assert rep.witnesses


def test_reducing_witnesses_repeat_after_stabilization(toy_p, toy_d):
    s = toy_d.stabilization
    for q in toy_p.squares:
        rep = is_reducing_square(q, toy_d, toy_p)
        by_level = {}
        for w in rep.witnesses:
            by_level.setdefault(w["level"], []).append({k: v for k, v in w.items() if k != "level"})
        for i in range(s, s + 3):
            assert by_level[i] == by_level[s]


def test_reducing_squares_generate_the_same_topology(toy_p, toy_d):
    red = reducing_squares(toy_p, toy_d)
    assert covering_pairs(cd_topology(red)) == covering_pairs(cd_topology(toy_p))


def test_toy_is_bounded(toy_p, toy_d):
    v = is_bounded(toy_p, toy_d)
    assert v and v.details["dimensions"]["X"] == 1


def test_toy_is_not_bounded_by_isomorphisms(toy_p):
    v = is_bounded(toy_p, isomorphism_density(toy_p.cat))
    assert not v and v.witness.name == "main"


def test_invalid_density_is_not_bounded(toy_p, toy_d):
    v = is_bounded(toy_p, edited(toy_d, {("A", 0): {"id_A"}}))
    assert not v and v.reason.startswith("invalid density")


def test_additive_structures_are_bounded_by_isomorphisms():
    for fx in chunky_fixtures().values():
        w, _ = chunky_verdict(fx.cat, fx.sums)
        D = isomorphism_density(fx.cat)
        assert validate_density(D) == []
        assert is_bounded(p_add(w), D)
        assert all(dimension(D, x) == 0 for x in fx.cat.objects)


def test_spaces_are_bounded_by_height():
    for sp in (circle_space(), sphere_space()):
        P, _ = sp.site()
        assert is_bounded(P, sp.height_density())
