import random

import numpy as np
import pytest

from cdsite.abelian import (AbGroup, CochainComplex, direct_sum, exact_at, image_contains, int_kernel, int_solve,
                            is_injective, is_isomorphism, is_surjective, kernel, mat, smith_normal_form)

import oracle


def unimodular(m):
    return abs(round(np.linalg.det(m.astype(float)))) == 1


def random_matrix(rng, m, n):
    return mat([[rng.randint(-4, 4) for _ in range(n)] for _ in range(m)], (m, n))


def test_smith_form_on_random_matrices():
    rng = random.Random(1)
    for _ in range(60):
        a = random_matrix(rng, rng.randint(1, 4), rng.randint(1, 4))
        s = smith_normal_form(a)
        assert np.array_equal(s.U.dot(a).dot(s.V), s.D)
        assert unimodular(s.U) and unimodular(s.V)
        assert all(d > 0 for d in s.diagonal)
        assert all(s.diagonal[i + 1] % s.diagonal[i] == 0 for i in range(len(s.diagonal) - 1))
        assert s.rank == oracle.rational_rank(a.tolist())
        off = s.D.copy()
        for i, d in enumerate(s.diagonal):
            assert off[i, i] == d
            off[i, i] = 0
        assert not off.any()


def test_smith_form_of_a_known_matrix():
    assert smith_normal_form(mat([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])).diagonal == [2, 6, 12]
    assert smith_normal_form(mat([[0, 0], [0, 0]])).diagonal == []


def test_group_invariants():
    assert AbGroup.free(3).invariants() == (3, ())
    assert AbGroup(2, ((2, 0), (0, 3))).invariants() == (0, (6,))
    assert AbGroup(2, ((2, 2),)).invariants() == (1, (2,))
    assert AbGroup(1, ((1,),)).is_trivial()
    assert AbGroup.cyclic(0).invariants() == (1, ())
    assert AbGroup.from_invariants(1, [2, 4]).order() is None
    assert AbGroup.from_invariants(0, [2, 4]).order() == 8
    assert str(AbGroup.from_invariants(2, [3])) == "Z^2 + Z/3"
    assert str(AbGroup(0)) == "0"


def test_direct_sum_invariants():
    g = direct_sum([AbGroup.cyclic(2), AbGroup.cyclic(3), AbGroup.free(1)])
    assert g.invariants() == (1, (6,))


def test_zero_and_equality_in_quotients():
    g = AbGroup.cyclic(4)
    assert g.is_zero([8]) and not g.is_zero([2])
    assert g.equal([1], [5])


def test_integer_kernel_and_solve():
    a = mat([[1, 2, 3], [2, 4, 6]])
    k = int_kernel(a)
    assert k.shape[1] == 2 and not a.dot(k).any()
    assert int_solve(mat([[2, 0], [0, 3]]), np.array([4, 9], dtype=object)).tolist() == [2, 3]
    assert int_solve(mat([[2]]), np.array([1], dtype=object)) is None


def test_maps_between_groups():
    z, z2 = AbGroup.free(1), AbGroup.cyclic(2)
    double = mat([[2]])
    assert is_injective(z, z, double) and not is_surjective(double, z)
    assert is_surjective(mat([[1]]), z2) and not is_injective(z, z2, mat([[1]]))
    assert kernel(z, z2, mat([[1]])).group.invariants() == (1, ())
    assert is_isomorphism(z2, z2, mat([[3]]))
    assert image_contains(double, z, [4]) and not image_contains(double, z, [3])


def test_short_exact_sequence_of_integers():
    z, z2 = AbGroup.free(1), AbGroup.cyclic(2)
    assert exact_at(z, z, z2, mat([[2]]), mat([[1]]))
    assert not exact_at(z, z, z2, mat([[4]]), mat([[1]]))


def test_cohomology_of_a_small_complex():
    # Z --(1,1)--> Z^2 --(1,-1)--> Z: H^0 = 0, H^1 = 0, H^2 = 0
    c = CochainComplex([AbGroup.free(1), AbGroup.free(2), AbGroup.free(1)],
                       [mat([[1], [1]]), mat([[1, -1]])])
    assert c.is_complex()
    assert [c.cohomology(n).group.invariants() for n in range(3)] == [(0, ()), (0, ()), (0, ())]
    # Z --2--> Z: H^1 = Z/2
    c = CochainComplex([AbGroup.free(1), AbGroup.free(1)], [mat([[2]])])
    assert c.cohomology(1).group.invariants() == (0, (2,))
    assert c.cohomology(0).group.invariants() == (0, ())


def test_non_complex_is_detected():
    c = CochainComplex([AbGroup.free(1)] * 3, [mat([[1]]), mat([[1]])])
    assert not c.is_complex()


@pytest.mark.parametrize("rows", [[[3]], [[2, 0], [0, 4]], [[1, 1], [1, -1]]])
def test_invariants_do_not_depend_on_presentation(rows):
    a = mat(rows)
    g = AbGroup(a.shape[0], tuple(tuple(int(x) for x in a[:, j]) for j in range(a.shape[1])))
    s = smith_normal_form(a)
    assert g.invariants()[1] == tuple(d for d in s.diagonal if d != 1)
