import random

import pytest

from cdsite.chunky import (chunky_verdict, compare_with_sheafification, coprojections_are_monic, decompositions,
                           is_filtered, is_radditive, p_add, radditivize, t_add)
from cdsite.fixtures import chunky_fixtures, toy_category
from cdsite.presheaves import constant_presheaf, product_presheaf, random_presheaf, representable
from cdsite.sheaves import is_sheaf
from cdsite.topology import is_complete, is_regular

FIXTURES = chunky_fixtures()


def witness(key):
    fx = FIXTURES[key]
    w, reason = chunky_verdict(fx.cat, fx.sums)
    assert w is not None, reason
    return w


@pytest.mark.parametrize("key", sorted(FIXTURES))
def test_fixtures_are_chunky(key):
    w = witness(key)
    assert w.cap == FIXTURES[key].cap or key == "degenerate"
    assert coprojections_are_monic(w)


def test_finset_sizes():
    w = witness("finset3")
    assert w.sizes == {"0": 0, "1": 1, "1+1": 2, "1+1+1": 3}
    assert len(w.sums) == 10


def test_toy_is_not_chunky():
    w, reason = chunky_verdict(toy_category())
    assert w is None and reason.startswith("condition (2)")


def test_bad_designated_sum_is_rejected():
    fx = FIXTURES["finset3"]
    sums = dict(fx.sums)
    legs = sums[("1", "1")]
    sums[("1", "1")] = (legs[0], legs[0])
    w, reason = chunky_verdict(fx.cat, sums)
    assert w is None and "not a coproduct" in reason


def test_missing_sum_below_the_cap_is_rejected():
    fx = FIXTURES["finset3"]
    sums = {k: v for k, v in fx.sums.items() if k != ("1", "1+1")}
    w, reason = chunky_verdict(fx.cat, sums)
    assert w is None and reason == "1 ⊔ 1+1 does not exist"


@pytest.mark.parametrize("key", sorted(FIXTURES))
def test_additive_structure_is_complete_and_regular(key):
    P = p_add(witness(key))
    assert is_complete(P) and is_regular(P)


@pytest.mark.parametrize("key", sorted(FIXTURES))
def test_decomposition_posets_are_filtered(key):
    w = witness(key)
    for u in w.cat.objects:
        D = decompositions(w, u)
        assert is_filtered(D)
        assert len(D.seqs[D.finest]) == w.sizes[u]


def test_decompositions_of_three_points():
    D = decompositions(witness("finset3"), "1+1+1")
    by_length = {}
    for s in D.seqs:
        by_length[len(s)] = by_length.get(len(s), 0) + 1
    # parts are monomorphisms, not subsets: 3! automorphisms, then a point and
    # an injection of two points onto its complement (3·2) in either order, then 3!
    assert by_length == {1: 6, 2: 12, 3: 6}


def test_representables_are_radditive():
    for key in ("finset3", "fam-z2", "fam-arrow"):
        w = witness(key)
        for x in w.cat.objects:
            assert is_radditive(representable(w.cat, x), w)


def test_constant_presheaf_is_not_radditive():
    w = witness("finset3")
    assert not is_radditive(constant_presheaf(w.cat, ["u", "v"]), w)


def test_radditive_means_sheaf():
    w = witness("fam-z2")
    top = t_add(w)
    rng = random.Random(6)
    for _ in range(30):
        F = random_presheaf(w.cat, rng, max_gens=2)
        assert is_radditive(F, w) == bool(is_sheaf(F, top))


def test_radditivization_on_finite_sets():
    w = witness("finset3")
    rng = random.Random(8)
    for _ in range(10):
        F = random_presheaf(w.cat, rng, max_gens=2)
        R, unit = radditivize(F, w)
        n = F.size("1")
        assert R.sizes() == {"0": 1, "1": n, "1+1": n ** 2, "1+1+1": n ** 3}
        assert unit.validate() == []


def test_radditivization_is_idempotent():
    w = witness("fam-z2")
    rng = random.Random(10)
    for _ in range(10):
        R, _ = radditivize(random_presheaf(w.cat, rng, max_gens=2), w)
        assert is_radditive(R, w)
        RR, unit = radditivize(R, w)
        assert unit.is_iso()


def test_radditivization_preserves_products():
    w = witness("fam-arrow")
    rng = random.Random(13)
    for _ in range(6):
        F = random_presheaf(w.cat, rng, max_gens=1)
        G = random_presheaf(w.cat, rng, max_gens=1)
        RF, RG = radditivize(F, w)[0], radditivize(G, w)[0]
        RP = radditivize(product_presheaf(F, G), w)[0]
        assert RP.sizes() == {x: RF.size(x) * RG.size(x) for x in w.cat.objects}


@pytest.mark.parametrize("key", ["finset3", "fam-z2", "fam-two-points", "fam-arrow"])
def test_radditivization_is_sheafification(key):
    w = witness(key)
    rng = random.Random(21)
    for _ in range(8):
        v = compare_with_sheafification(random_presheaf(w.cat, rng, max_gens=2), w)
        assert v, v.reason
