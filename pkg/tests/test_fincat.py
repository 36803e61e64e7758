import pytest

from cdsite.fincat import (CategoryError, FiniteCategory, FormalCoproduct, Square, coproduct, initial_object,
                           is_coproduct_cocone, is_initial, is_monomorphism, is_pullback_square, is_terminal,
                           mediating, pullback, terminal_category, thin_category, validate_category,
                           wide_pullback)
from cdsite.fixtures import TOY_ARROWS, chunky_fixtures, parallel_pair_category

import oracle


def test_toy_has_fourteen_morphisms(toy):
    arrows = oracle.close_under_composition("0ABXY", TOY_ARROWS.keys())
    assert len(arrows) == 14
    assert len(toy.morphisms) == 14
    assert {(toy.source(m), toy.target(m)) for m in toy.morphisms} == arrows


def test_toy_is_valid(toy):
    assert validate_category(toy) == []


def test_terminal_category_is_valid():
    cat = terminal_category()
    assert validate_category(cat) == []
    assert is_initial(cat, "*") and is_terminal(cat, "*")


def test_planted_associativity_failure_is_reported():
    # End(x) = {1, a, b} with a*a = b, a*b = a, b*a = b, b*b = b: (a*a)*b != a*(a*b)
    table = {("a", "a"): "b", ("a", "b"): "a", ("b", "a"): "b", ("b", "b"): "b"}
    cat = FiniteCategory(["x"], {"a": ("x", "x"), "b": ("x", "x")}, {"x": "1"}, table)
    report = validate_category(cat)
    assert any("a" in line and "b" in line for line in report)


def test_missing_composite_raises():
    cat = FiniteCategory(["x", "y", "z"], {"f": ("x", "y"), "g": ("y", "z")},
                         {"x": "1x", "y": "1y", "z": "1z"}, {})
    with pytest.raises(CategoryError):
        cat.compose("g", "f")


def test_initial_objects(toy):
    assert is_initial(toy, "0")
    assert not is_initial(toy, "X")
    assert initial_object(toy) == "0"
    assert is_initial(terminal_category(), "*")


def test_monomorphisms(toy):
    assert all(is_monomorphism(toy, toy.identity(x)) for x in toy.objects)
    assert is_monomorphism(toy, "e")
    cat, _ = parallel_pair_category()
    assert not is_monomorphism(cat, "f")


def test_monomorphism_agrees_with_brute_force():
    for fx in chunky_fixtures().values():
        cat = fx.cat
        for f in cat.morphisms[:40]:
            assert is_monomorphism(cat, f) == oracle.is_mono(cat, f)


def test_toy_main_square_is_a_pullback(toy, toy_p):
    main = toy_p.square("main")
    assert is_pullback_square(toy, main)
    swapped = Square(main.b, main.y, main.a, main.x, main.b_to_y, main.b_to_a, main.p, main.e)
    assert is_pullback_square(toy, swapped)


def test_identity_square_is_a_pullback(toy):
    q = Square("A", "A", "A", "A", "id_A", "id_A", "id_A", "id_A")
    assert is_pullback_square(toy, q)


def test_duplicated_cone_is_not_a_pullback():
    # B2 has two maps to B that nothing distinguishes: cones through B2 do not mediate uniquely.
    objects = ["B2", "A", "Y", "X"]
    morphisms = {"a": ("B2", "A"), "y": ("B2", "Y"), "e": ("A", "X"), "p": ("Y", "X"),
                 "d": ("B2", "X"), "t": ("B2", "B2")}
    table = {("e", "a"): "d", ("p", "y"): "d", ("a", "t"): "a", ("y", "t"): "y", ("d", "t"): "d",
             ("t", "t"): "1B2"}
    cat = FiniteCategory(objects, morphisms, {x: f"1{x}" for x in objects}, table)
    assert validate_category(cat) == []
    assert not is_pullback_square(cat, Square("B2", "A", "Y", "X", "a", "y", "e", "p"))


def test_pullback_in_toy(toy):
    c = pullback(toy, "e", "p")
    assert c is not None and c.apex == "B"
    assert [(w, a, b) for w, a, b in oracle.pullback_objects(toy, "e", "p")] == [("B", "a", "b")]
    c = pullback(toy, "id_X", "id_X")
    assert c.apex == "X" and c.legs == ("id_X", "id_X")


def test_missing_pullback():
    cat = thin_category("aby", [("a", "y"), ("b", "y")])
    assert pullback(cat, cat.hom("a", "y")[0], cat.hom("b", "y")[0]) is None
    assert oracle.pullback_objects(cat, cat.hom("a", "y")[0], cat.hom("b", "y")[0]) == []


def test_pullback_legs_commute_and_mediate_uniquely():
    fx = chunky_fixtures()["finset3"]
    cat = fx.cat
    for f in cat.morphisms_into("1+1"):
        for g in cat.morphisms_into("1+1"):
            c = pullback(cat, f, g)
            brute = oracle.pullback_objects(cat, f, g)
            assert (c is None) == (not brute)
            if c is not None:
                assert cat.compose(f, c.legs[0]) == cat.compose(g, c.legs[1])


def test_wide_pullback_of_identity(toy):
    c = wide_pullback(toy, ["id_X"] * 3)
    assert c.apex == "X"
    assert mediating(toy, c, ["e", "e", "e"]) == "e"


def test_coproducts(toy):
    assert coproduct(toy, []).apex == "0"
    c = coproduct(toy, ["A"])
    assert c.apex == "A" and c.legs == ("id_A",)
    fx = chunky_fixtures()["fam-two-points"]
    c = coproduct(fx.cat, ["p", "q"])
    assert c is not None and c.apex == "p+q"
    assert is_coproduct_cocone(fx.cat, fx.sums[("p", "q")])


def test_formal_coproduct_canonical_form_ignores_order():
    assert FormalCoproduct(("Y", "A")).canonical() == FormalCoproduct(("A", "Y")).canonical()
    assert FormalCoproduct(()).summands == ()
