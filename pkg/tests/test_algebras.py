import itertools
from fractions import Fraction

import pytest

from subrank.algebras import (
    Algebra,
    build_apolar_quadric,
    build_diagonal,
    build_matrix_algebra,
    build_null,
    build_sl,
    build_sl2_hab,
    build_triangular,
    build_truncated_poly,
    family_limit,
    socle_degree,
    structure_tensor,
    validate,
    vandermonde_family,
)

BUILDERS = [
    build_truncated_poly(4), build_null(3), build_apolar_quadric(3), build_diagonal(3),
    build_matrix_algebra(2), build_triangular(3), build_sl(2), build_sl(3), build_sl2_hab(),
]


@pytest.mark.parametrize("A", BUILDERS, ids=lambda A: A.name)
def test_builders_validate(A):
    assert validate(A).ok


def brute_force_structure_tensor(A, k):
    """Evaluate the left-nested k-fold product on all basis tuples directly."""
    n = A.dim
    entries = {}
    for idx in itertools.product(range(n), repeat=k):
        v = [Fraction(int(t == idx[0])) for t in range(n)]
        for j in idx[1:]:
            w = [Fraction(0)] * n
            for i, c in enumerate(v):
                if c:
                    for h, x in A.products.get((i, j), {}).items():
                        w[h] += c * x
            v = w
        for h, c in enumerate(v):
            if c:
                entries[(h,) + idx] = c
    return entries


@pytest.mark.parametrize("A", BUILDERS, ids=lambda A: A.name)
@pytest.mark.parametrize("k", [1, 2, 3])
def test_structure_tensor_matches_direct_products(A, k):
    assert structure_tensor(A, k).entries == brute_force_structure_tensor(A, k)


def test_dimensions_and_support_sizes():
    assert structure_tensor(build_truncated_poly(3), 2).dims == (3, 3, 3)
    assert len(structure_tensor(build_truncated_poly(3), 2)) == 6
    assert len(structure_tensor(build_truncated_poly(5), 2)) == 15
    assert build_triangular(4).dim == 10
    assert build_sl(3).dim == 8


def test_socle_degrees():
    assert socle_degree(build_truncated_poly(5)) == (4, 1)
    assert socle_degree(build_null(3)) == (1, 3)
    assert socle_degree(build_apolar_quadric(4)) == (2, 1)


def test_sl2_brackets_in_hab_basis():
    A = build_sl2_hab()
    h, a, b = range(3)
    # [h, a] = 2b, [h, b] = 2a, [a, b] = -2h  for a = e + f, b = e - f
    assert A.products[(h, a)] == {b: 2}
    assert A.products[(h, b)] == {a: 2}
    assert A.products[(a, b)] == {h: -2}


def test_vandermonde_family_limit_is_truncated_polynomials():
    for d in (2, 3, 4):
        assert structure_tensor(family_limit(vandermonde_family(d)), 2) == \
            structure_tensor(build_truncated_poly(d), 2)


def test_validation_catches_non_associative():
    # y*y = x and x*y = x: (y*y)*y = x*y = x but y*(y*y) = y*x = 0
    with pytest.raises(ValueError, match="associat"):
        Algebra(2, {(1, 1): {0: Fraction(1)}, (0, 1): {0: Fraction(1)}}, ["x", "y"],
                associative=True, name="bad")


def test_validation_catches_broken_jacobi():
    # [x, y] = x, [x, z] = y, [y, z] = 0: the Jacobi sum on (x, y, z) is -y
    prods = {(0, 1): {0: 1}, (1, 0): {0: -1}, (0, 2): {1: 1}, (2, 0): {1: -1}}
    with pytest.raises(ValueError):
        Algebra(3, {k: {h: Fraction(c) for h, c in v.items()} for k, v in prods.items()},
                ["x", "y", "z"], lie=True, name="bad-lie")
