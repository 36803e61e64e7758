import pytest

from cdsite.chunky import chunky_verdict, p_add
from cdsite.fincat import CategoryError
from cdsite.fixtures import chunky_fixtures, circle_space, term_category, term_projection, toy_disjoint_cd
from cdsite.simplicial import (SimplicialHomotopy, build_KQ, build_WP, cech_nerve,
                               check_homotopy, check_simplicial_identities, constant_object,
                               identity_simplicial_map, kq_homotopy_inverse, pi0,
                               section_homotopy_witness, wp_pi0_check)


def fixture_squares():
    out = []
    from cdsite.fixtures import toy_cd

    P = toy_cd()
    out += [(P.cat, q) for q in P.squares]
    Pc, _ = circle_space().site()
    out += [(Pc.cat, q) for q in Pc.squares[:12]]
    fx = chunky_fixtures()["fam-z2"]
    w, _ = chunky_verdict(fx.cat, fx.sums)
    out += [(fx.cat, q) for q in p_add(w).squares[:8]]
    return out


def test_kq_levels(toy_p):
    K = build_KQ(toy_p.square("main"), toy_p.cat, 4)
    assert K.obj.N == 4
    for n, lv in enumerate(K.obj.levels):
        assert lv == ("A", "Y") + ("B",) * n


@pytest.mark.parametrize("N", [1, 2, 3])
def test_kq_satisfies_simplicial_identities(N):
    for cat, q in fixture_squares():
        K = build_KQ(q, cat, N)
        assert check_simplicial_identities(K.obj) == []
        assert K.to_constant().check() == []


def test_wp_collects_every_square(toy_p):
    W = build_WP(toy_p)
    assert len(W.maps) == len(toy_p.squares) and W.empty_to_initial == "0"


def test_kq_homotopy_inverse_on_a_degenerate_square(toy_p):
    K = build_KQ(toy_p.square("side"), toy_p.cat, 3)
    g, H = kq_homotopy_inverse(K)
    assert g.check() == []
    assert check_homotopy(H) == []
    back = g.then(K.to_constant())
    assert [m.parts for m in back.comp] == [m.parts for m in identity_simplicial_map(back.src).comp]


def test_kq_homotopy_inverse_needs_isomorphisms(toy_p):
    with pytest.raises(CategoryError):
        kq_homotopy_inverse(build_KQ(toy_p.square("main"), toy_p.cat, 2))


def test_broken_homotopy_is_reported(toy_p):
    K = build_KQ(toy_p.square("side"), toy_p.cat, 2)
    _, H = kq_homotopy_inverse(K)
    assert H.h[(1, 0)] != H.h[(1, 1)]
    broken = SimplicialHomotopy(H.f, H.g, {**H.h, (1, 0): H.h[(1, 1)]})
    assert check_homotopy(broken) != []


def test_cech_nerve_of_an_identity(toy):
    C = cech_nerve(toy, "id_X", 3)
    assert all(lv == ("X",) for lv in C.obj.levels)
    assert check_simplicial_identities(C.obj) == []
    assert C.augmentation().check() == []


def test_cech_nerve_of_a_monomorphism(toy):
    C = cech_nerve(toy, "p", 3)
    assert all(lv == ("Y",) for lv in C.obj.levels)
    assert check_simplicial_identities(C.obj) == []


@pytest.mark.parametrize("arity,constants", [(4, 1), (4, 2), (5, 1)])
def test_section_witness_in_term_categories(arity, constants):
    cat = term_category(arity, constants)
    f = term_projection(cat)
    sections = [s for s in cat.hom("Y", "X") if cat.compose(f, s) == cat.identity("Y")]
    assert len(sections) == constants
    for s in sections:
        sigma, H, C = section_homotopy_witness(cat, f, s, 3)
        assert [lv[0] for lv in C.obj.levels] == ["X", "X2", "X3", "X4"]
        assert check_simplicial_identities(C.obj) == []
        assert sigma.check() == [] and C.augmentation().check() == []
        assert check_homotopy(H) == []
        eta_sigma = sigma.then(C.augmentation())
        Y = constant_object(cat, "Y", 3)
        assert [m.parts for m in eta_sigma.comp] == [m.parts for m in identity_simplicial_map(Y).comp]


def test_section_witness_rejects_non_sections():
    cat = term_category(4, 1)
    f = term_projection(cat)
    with pytest.raises(CategoryError):
        section_homotopy_witness(cat, cat.identity("X"), f)


def test_pi0_of_kq(toy_p):
    K = build_KQ(toy_p.square("main"), toy_p.cat, 1)
    P0, _ = pi0(K.obj)
    assert P0.sizes() == {"0": 1, "A": 1, "B": 1, "X": 0, "Y": 1}


def test_sheafified_pi0_of_kq_is_rho(toy_p):
    for q in toy_p.squares:
        assert wp_pi0_check(q, toy_p)


def test_pi0_check_fails_without_a_pullback_square():
    P = toy_disjoint_cd()
    v = wp_pi0_check(P.square("disjoint"), P)
    assert not v and "not an isomorphism" in v.reason
