import itertools
import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from subrank import bounds
from subrank.algebras import (
    build_apolar_quadric,
    build_matrix_algebra,
    build_null,
    build_sl2_hab,
    build_truncated_poly,
    change_basis,
    structure_tensor,
)
from subrank.degeneration import best_certificate, family_tensor, verify_unit_certificate
from subrank.linalg import det
from subrank.tensor_core import Tensor, build_unit


def lp_data(T):
    keys = sorted({(j, i) for s in T.entries for j, i in enumerate(s)})
    col = {key: t for t, key in enumerate(keys)}
    rows = [[0] * len(keys) for _ in T.entries]
    for r, s in enumerate(sorted(T.entries)):
        for j, i in enumerate(s):
            rows[r][col[(j, i)]] += 1
    return rows, len(keys)


def scipy_lp(T):
    rows, m = lp_data(T)
    res = linprog(np.ones(m), A_ub=-np.array(rows, dtype=float), b_ub=-np.ones(len(rows)),
                  bounds=[(0, None)] * m, method="highs")
    assert res.status == 0
    return res.fun


def vertex_enumeration_lp(T):
    """min sum x over A x >= 1, x >= 0 by trying every basis of tight constraints."""
    rows, m = lp_data(T)
    cons = [(r, 1) for r in rows] + [([int(i == j) for i in range(m)], 0) for j in range(m)]
    best = None
    for choice in itertools.combinations(range(len(cons)), m):
        M = [[Fraction(x) for x in cons[c][0]] for c in choice]
        if det(M) == 0:
            continue
        # solve M x = b by Cramer's rule
        b = [Fraction(cons[c][1]) for c in choice]
        D = det(M)
        x = []
        for t in range(m):
            Mt = [row[:t] + [b[i]] + row[t + 1:] for i, row in enumerate(M)]
            x.append(det(Mt) / D)
        if all(v >= 0 for v in x) and all(sum(a * v for a, v in zip(r, x)) >= 1 for r in rows):
            val = sum(x)
            best = val if best is None else min(best, val)
    return best


def full_support(m):
    return Tensor((2,) * m, {i: 1 for i in itertools.product(range(2), repeat=m)})


@pytest.mark.parametrize("m,r", [(m, r) for m in range(1, 5) for r in range(1, 4)])
def test_lp_unit_tensors(m, r):
    T = build_unit(m, r)
    assert bounds.gstable_lp(T) == r
    if m * r <= 9:
        assert vertex_enumeration_lp(T) == r


def test_lp_full_support_and_truncated_polynomials():
    for m in (2, 3):
        assert bounds.gstable_lp(full_support(m)) == 2 == vertex_enumeration_lp(full_support(m))
    assert bounds.gstable_lp(full_support(4)) == 2
    assert bounds.gstable_lp(structure_tensor(build_truncated_poly(4), 2)) == 3
    assert vertex_enumeration_lp(structure_tensor(build_truncated_poly(3), 2)) == \
        bounds.gstable_lp(structure_tensor(build_truncated_poly(3), 2))


@pytest.mark.parametrize("T", [
    structure_tensor(build_truncated_poly(5), 3),
    structure_tensor(build_apolar_quadric(3), 3),
    structure_tensor(build_null(3), 2),
    structure_tensor(build_sl2_hab(), 3),
    structure_tensor(build_matrix_algebra(2), 2),
], ids=["trd", "cw", "null", "sl2", "mat2"])
def test_lp_matches_float_solver(T):
    sol = bounds.solve_gstable_lp(T)
    assert abs(float(sol.value) - scipy_lp(T)) < 1e-7
    assert sum(sol.primal.values()) == sol.value == sum(sol.dual.values())


@st.composite
def supports(draw):
    dims = tuple(draw(st.integers(1, 3)) for _ in range(3))
    pts = draw(st.sets(st.tuples(*[st.integers(0, d - 1) for d in dims]), min_size=1, max_size=8))
    return Tensor(dims, {p: 1 for p in pts})


@given(supports(), st.randoms(use_true_random=False))
@settings(max_examples=40, deadline=None)
def test_lp_invariant_under_relabeling(T, rnd):
    base = bounds.gstable_lp(T)
    perm = list(range(3))
    rnd.shuffle(perm)
    assert bounds.gstable_lp(T.permute_modes(perm)) == base
    relabels = []
    for d in T.dims:
        p = list(range(d))
        rnd.shuffle(p)
        relabels.append(p)
    moved = Tensor(T.dims, {tuple(relabels[j][i] for j, i in enumerate(idx)): c
                            for idx, c in T.entries.items()})
    assert bounds.gstable_lp(moved) == base


def test_trd_bound_values():
    assert bounds.gstable_trd_bound(2, 4) == 3
    assert bounds.gstable_trd_bound(3, 3) == 2
    for k in range(1, 13):
        for d in range(1, 13):
            assert math.floor(bounds.gstable_trd_bound(k, d)) == 2 * (d - 1) // (k + 1) + 1


def test_lp_below_trd_bound_small_grid():
    for k in range(1, 5):
        for d in range(2, 8):
            T = structure_tensor(build_truncated_poly(d), k)
            assert bounds.gstable_lp(T) <= bounds.gstable_trd_bound(k, d)


def test_gr_closed_forms():
    assert bounds.gr_closed_form("mamu", {"n": 6, "k": 3}) == 24
    assert bounds.gr_closed_form("trd", {"d": 7, "k": 4}) == 7
    assert bounds.gr_closed_form("sl", {"n": 3, "k": 2}) == 6
    assert bounds.gr_closed_form("mamu", {"n": 5, "k": 2}) == math.ceil(3 * 25 / 4)
    assert bounds.gr_closed_form("mamu", {"n": 5, "k": 1}) == 25
    for fam, params in [("trd", {"d": 5}), ("null", {"n": 3}), ("cw", {"n": 4}),
                        ("mamu", {"n": 5}), ("tri", {"n": 6}), ("sl2", {"n": 2})]:
        vals = [bounds.gr_closed_form(fam, dict(params, k=k)) for k in range(1, 8)]
        assert vals == sorted(vals, reverse=True), fam
    with pytest.raises(ValueError):
        bounds.gr_closed_form("sl", {"n": 3, "k": 3})


def test_certificates_sit_below_upper_bounds():
    cases = [("trd", {"d": d}) for d in range(2, 7)] + [("cw", {"n": n}) for n in (1, 2, 3)] + \
            [("null", {"n": n}) for n in (1, 2, 3)] + [("sl2", {})]
    for fam, params in cases:
        for k in range(1, 5):
            T = family_tensor(fam, params, k)
            r = verify_unit_certificate(T, best_certificate(fam, params, k))
            gr = bounds.gr_closed_form("sl" if fam == "sl2" else fam, dict(params, k=k, n=params.get("n", 2)))
            assert r <= gr
            assert r <= math.floor(bounds.gstable_lp(T))


def test_h2_minimum():
    assert bounds.h2_min_composition(6, 3) == ((2, 2, 2), 24)
    assert bounds.h2_min_composition(4, 3) == ((2, 1, 1), 11)
    for n in range(1, 13):
        assert bounds.h2_min_composition(n, 1) == ((n,), n * n)
        for k in range(1, 6):
            parts, value = bounds.h2_min_composition(n, k)
            assert sum(parts) == n and len(parts) == k
            assert value == bounds.h2_min_bruteforce(n, k)


def test_kernel_matrix():
    assert bounds.kernel_matrix((1, 1)) == [[1, 0], [2, 1]]
    assert bounds.kernel_matrix((2, 1, 1))[2] == [4, 2, 1]
    rnd = random.Random(4)
    for _ in range(100):
        parts = tuple(rnd.randint(1, 6) for _ in range(rnd.randint(1, 7)))
        P = bounds.kernel_matrix(parts)
        assert all(P[i][i] == parts[i] for i in range(len(parts)))
        assert P[-1][0] == sum(parts)


def brute_force_zero_count(A, k, p):
    """Count k-tuples with vanishing left-nested product by direct enumeration."""
    n = A.dim
    elems = list(itertools.product(range(p), repeat=n))

    def mul(a, b):
        out = [0] * n
        for (i, j), row in A.products.items():
            if a[i] and b[j]:
                for h, c in row.items():
                    out[h] = (out[h] + a[i] * b[j] * int(c)) % p
        return tuple(out)

    count = 0
    for tup in itertools.product(elems, repeat=k):
        v = tup[0]
        for b in tup[1:]:
            v = mul(v, b)
        count += not any(v)
    return count


def test_oracle_counts_match_direct_enumeration():
    for A, k in [(build_truncated_poly(2), 2), (build_null(2), 2), (build_truncated_poly(2), 3)]:
        est = bounds.ff_dimension_oracle(A, k, [3, 5])
        assert est.counts[3] == brute_force_zero_count(A, k, 3)


def test_oracle_examples():
    est = bounds.ff_dimension_oracle(build_matrix_algebra(2), 2, [5, 7])
    assert (est.dim, est.gr) == (5, 3)
    est = bounds.ff_dimension_oracle(build_truncated_poly(3), 2, [5, 7, 11])
    assert (est.dim, est.gr, est.consistent) == (3, 3, True)
    est = bounds.ff_dimension_oracle(build_null(2), 2, [5, 7])
    assert (est.dim, est.gr) == (4, 2)


def test_oracle_errors():
    with pytest.raises(bounds.BadPrime):
        bounds.ff_dimension_oracle(build_null(2), 2, [4, 7])
    F = Fraction
    scaled = change_basis(build_truncated_poly(3), [[F(1), 0, 0], [0, F(1, 5), 0], [0, 0, F(1)]])
    with pytest.raises(bounds.BadPrime):
        bounds.ff_dimension_oracle(scaled, 2, [5, 7])
    with pytest.raises(bounds.BudgetExceeded):
        bounds.ff_dimension_oracle(build_null(2), 3, [5, 7])


def brute_average_free_size(q, k):
    best = 0
    for mask in range(1 << (q + 1)):
        D = [x for x in range(q + 1) if mask >> x & 1]
        sums = {}
        ok = True
        for xs in itertools.product(D, repeat=k):
            if sum(xs) % k == 0 and sum(xs) // k in D and len(set(xs)) > 1:
                ok = False
                break
        if ok:
            best = max(best, len(D))
    return best


def test_average_free_sets():
    assert bounds.average_free_max(1, 2) == {0, 1} == bounds.average_free_max(1, 5)
    assert len(bounds.average_free_max(2, 3)) == 2
    assert bounds.average_free_max(0, 3) == {0}
    for q in range(0, 8):
        for k in (2, 3):
            assert len(bounds.average_free_max(q, k)) == brute_average_free_size(q, k)


def test_spectral_probe():
    e = bounds.spectral_probe_frobenius()
    assert [c for c in e.num] == [0, 0, 6, 0, 3, 0, 1] and e.den == (1,)
    assert abs(bounds.spectral_ratio_probe([1e-1, 1e-2, 1e-3]) - 3) < 0.03
    assert abs(bounds.spectral_ratio_probe([1.0]) - 3) > 0.1
    with pytest.raises(ValueError):
        bounds.spectral_ratio_probe([1e-3, 1e-1])


def test_power_iteration_matches_svd():
    # the two largest Gram eigenvalues are 2e^2 + 2e^4 and 2e^2, so power
    # iteration resolves the top one only to about e^2 relative accuracy
    for eps, rtol in ((1.0, 1e-9), (0.3, 1e-6), (1e-2, 1e-3)):
        T = bounds.spectral_probe_tensor(Fraction(eps))
        arr = np.zeros(T.dims)
        for idx, c in T.entries.items():
            arr[idx] = float(c)
        fro2 = (arr ** 2).sum()
        ref = [fro2 / np.linalg.svd(np.moveaxis(arr, s, 0).reshape(4, -1), compute_uv=False)[0] ** 2
               for s in range(3)]
        assert np.allclose(bounds.spectral_ratios(eps), ref, rtol=rtol)
