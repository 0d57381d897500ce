"""One test per acceptance criterion.  A summary of PASS/FAIL lines is printed
at the end of the run by conftest.py."""

import itertools
import math
import time
from fractions import Fraction

import pytest

from subrank import bounds
from subrank import invariants as inv
from subrank.algebras import (
    build_diagonal,
    build_matrix_algebra,
    build_null,
    build_sl2_hab,
    build_truncated_poly,
    structure_tensor,
)
from subrank.degeneration import (
    SplitMix64,
    apply_and_limit,
    build_mamu,
    cert_cw_k2,
    cert_cw_k3,
    cert_mamu,
    cert_sl2,
    cert_sl_block,
    cert_trd,
    cert_triangular,
    cert_triangular_restriction,
    derive_seed,
    family_algebra,
    family_tensor,
    instability_check,
    lift_symmetric_check,
    monotonicity_ledger,
    random_restriction,
    vandermonde_interpolation,
)
from subrank.degeneration import verify_unit_certificate as verify
from subrank.report import compute_row, hyperdet_witness, three_point_witness
from subrank.tensor_core import ModeMap, Tensor, apply_mode_maps, build_unit

SEED = 0


def samples(T, dims, label, count=20):
    rng = SplitMix64(derive_seed(SEED, "acceptance", label))
    return [random_restriction(T, dims, rng) for _ in range(count)]


def random_sl(rng, n):
    M = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for _ in range(3 * n):
        i, j = rng.randint(0, n - 1), rng.randint(0, n - 1)
        if i != j:
            c = Fraction(rng.randint(-3, 3), rng.randint(1, 3))
            M[i] = [a + c * b for a, b in zip(M[i], M[j])]
    d = Fraction(rng.randint(1, 3), rng.randint(1, 3))
    M[0] = [x * d for x in M[0]]
    M[1] = [x / d for x in M[1]]
    return M


def test_c01_trd_degenerations():
    start = time.perf_counter()
    for k in range(1, 6):
        for d in range(2, 10):
            T = structure_tensor(build_truncated_poly(d), k)
            assert verify(T, cert_trd(k, d)) == (d - 1) // k + 1, (k, d)
    elapsed = time.perf_counter() - start
    print(f"trd certificates verified in {elapsed:.2f} s")
    assert elapsed <= 5


def test_c02_trd_gstable():
    start = time.perf_counter()
    for k in range(1, 6):
        for d in range(2, 10):
            q, r = divmod(2 * (d - 1), k + 1)
            bound = Fraction((k + 1) * (q + 1) * (q + 2), (k + 1) * (q + 2) - r)
            assert bounds.gstable_lp(structure_tensor(build_truncated_poly(d), k)) <= bound, (k, d)
    assert bounds.gstable_lp(structure_tensor(build_truncated_poly(4), 2)) == 3
    elapsed = time.perf_counter() - start
    print(f"G-stable LPs solved in {elapsed:.2f} s")
    assert elapsed <= 30


def test_c03_trd_concluded_values():
    T = structure_tensor(build_truncated_poly(4), 2)
    coeffs = inv.separating_combination([lambda S: inv.f6_333(S) ** 2, inv.f12_333],
                                        samples(T, (3, 3, 3), "trd-2-4"), inv.u3_3())
    print(f"(2,4) separator: {coeffs[0]}*F6^2 + {coeffs[1]}*F12")
    assert verify(T, cert_trd(2, 4)) == 2

    T = structure_tensor(build_truncated_poly(3), 3)
    evaluators = [lambda S: inv.f2_2222(S) ** 3,
                  lambda S: inv.f2_2222(S) * inv.f4_2222(S),
                  lambda S: inv.f2_2222(S) * inv.f4p_2222(S),
                  inv.f6_2222]
    coeffs = inv.separating_combination(evaluators, samples(T, (2, 2, 2, 2), "trd-3-3"),
                                        inv.u4_2())
    print(f"(3,3) separator: {coeffs}")
    assert verify(T, cert_trd(3, 3)) == 1


def test_c04_triangular():
    for n in range(2, 9):
        for k in range(1, 7):
            q = n // k
            value = verify(structure_tensor(family_algebra("tri", {"n": n}), k), cert_triangular(k, n))
            assert 2 * value == (q + 1) * (2 * n - q * k)
            assert value == bounds.gr_closed_form("tri", {"n": n, "k": k})
            assert compute_row(("tri", k, {"n": n}), SEED).status == "concluded"
        for k in range(math.ceil(n / 2), n):
            T = structure_tensor(family_algebra("tri", {"n": n}), k)
            assert verify(T, cert_triangular_restriction(k, n, {0, 1})) == 2 * n - k


def test_c05_matrix_multiplication():
    for k in range(3, 6):
        for n in range(2, 7):
            q, r = divmod(n - 1, k - 1)
            size = verify(build_mamu([n] * (k + 1)), cert_mamu(k, n))
            assert size == n + q * (n - k + r + 2), (n, k)
            assert size * (k - 1) >= n * n
    for n in range(1, 11):
        for k in range(1, 7):
            q, r = divmod(n, k)
            gr = bounds.gr_closed_form("mamu", {"n": n, "k": k})
            assert 2 * gr == n * n + n * q + r * (q + 1)
            assert gr == bounds.h2_min_bruteforce(n, k)
    est = bounds.ff_dimension_oracle(build_matrix_algebra(2), 2, [5, 7])
    assert est.gr == 3 == math.ceil(3 * 4 / 4)


def test_c06_mamu_2222():
    M = build_mamu([2, 2, 2, 2])
    assert all(inv.f6_2222(S) == 0 for S in samples(M, (2, 2, 2, 2), "mamu-2222"))
    assert inv.f6_2222(three_point_witness()) != 0
    assert verify(M, cert_mamu(3, 2)) == 2


CW_TABLE = {(k, n): 1 if k >= 4 or (k, n) == (3, 1) else 2 if k == 3 or n <= 2 else 3
            for k in range(2, 6) for n in range(1, 5)}


def test_c07_cw_family():
    T2 = family_tensor("cw", {"n": 3}, 2)
    assert apply_and_limit(T2, cert_cw_k2(3)) == build_unit(3, 3)
    T3 = family_tensor("cw", {"n": 2}, 3)
    assert apply_and_limit(T3, cert_cw_k3(2)) == build_unit(4, 2)
    for n in (2, 3):
        Q = family_tensor("cw", {"n": n}, 3)
        assert all(inv.hyperdet_2222(S) == 0 for S in samples(Q, (2, 2, 2, 2), f"cw-{n}"))
    assert inv.hyperdet_2222(hyperdet_witness()) != 0
    for n in range(1, 5):
        A = family_algebra("cw", {"n": n})
        for k in (4, 5, 6):
            assert instability_check(A, k, SEED), (n, k)
    for (k, n), expected in CW_TABLE.items():
        row = compute_row(("cw", k, {"n": n}), SEED)
        assert row.value == str(expected) and row.status != "interval", (k, n, row.value)


def test_c08_null_algebras():
    N2 = build_null(2)
    assert bounds.gr_closed_form("null", {"n": 2, "k": 2}) == 2
    assert bounds.ff_dimension_oracle(N2, 2, [5, 7]).gr == 2
    assert bounds.ff_dimension_oracle(N2, 3, [3, 5]).gr == 2
    for n in range(1, 4):
        for k in (3, 4, 5):
            assert instability_check(build_null(n), k, SEED), (n, k)


def test_c09_sl():
    for n in range(2, 8):
        T = structure_tensor(family_algebra("sl", {"n": n}), 2)
        assert apply_and_limit(T, cert_sl_block(n)) == build_unit(3, n)
    for k in range(2, 9):
        assert verify(structure_tensor(build_sl2_hab(), k), cert_sl2(k)) == 2
    assert bounds.gr_closed_form("sl", {"n": 2, "k": 2}) == 2
    est = bounds.ff_dimension_oracle(build_sl2_hab(), 2, [5, 7])
    assert (est.dim, est.ambient, est.gr) == (4, 6, 2)


def test_c10_propagation():
    for d in (3, 4):
        assert lift_symmetric_check(vandermonde_interpolation(d), build_diagonal(d),
                                    build_truncated_poly(d), 4)
    ledgers = [("trd", {"d": d}, range(1, 7)) for d in range(2, 6)]
    ledgers += [("tri", {"n": n}, range(1, 7)) for n in range(2, 6)]
    ledgers += [("cw", {"n": n}, range(1, 7)) for n in range(1, 4)]
    ledgers += [("null", {"n": n}, range(1, 7)) for n in range(1, 4)]
    ledgers += [("mamu", {"n": n}, range(3, 7)) for n in (2, 3)]
    ledgers += [("sl2", {}, range(1, 7))]
    for family, params, ks in ledgers:
        monotonicity_ledger(family, params, ks)
    grids = [("trd", {"d": d}) for d in range(2, 8)] + [("tri", {"n": n}) for n in range(2, 9)]
    grids += [("cw", {"n": n}) for n in range(1, 5)] + [("null", {"n": n}) for n in range(1, 5)]
    grids += [("mamu", {"n": n}) for n in range(1, 8)] + [("sl", {"n": 2})]
    for family, params in grids:
        values = [bounds.gr_closed_form(family, dict(params, k=k)) for k in range(1, 7)]
        assert all(a >= b for a, b in zip(values, values[1:])), (family, params, values)


def test_c11_invariant_infrastructure():
    spaces = {((3, 3, 3), 6): 1, ((2, 2, 2, 2), 2): 1, ((2, 2, 2, 2), 4): 3,
              (inv.TERNARY_CUBIC, 4): 1}
    for (fmt, degree), dim in spaces.items():
        assert inv.invariant_space(fmt, degree).dim == dim
    for dims, degree in [((3, 3, 3), 6), ((2, 2, 2, 2), 2), ((2, 2, 2, 2), 4)]:
        basis = inv.invariant_space(dims, degree).basis
        rng = SplitMix64(derive_seed(SEED, "sl-action", dims, degree))
        for _ in range(10):
            T = Tensor(dims, {I: rng.randint(-3, 3)
                              for I in itertools.product(*[range(n) for n in dims])})
            values = [p(inv.tensor_point(T)) for p in basis]
            for _ in range(10):
                S = apply_mode_maps(T, [ModeMap(m, random_sl(rng, n)) for m, n in enumerate(dims)])
                assert [p(inv.tensor_point(S)) for p in basis] == values
    assert inv.f6_333(inv.u3_3()) == inv.f12_333(inv.u3_3()) == inv.f2_2222(inv.u4_2()) == 1


def test_c12_spectral_probe():
    ratio = bounds.spectral_ratio_probe([1e-1, 1e-2, 1e-3])
    print(f"spectral ratio at eps=1e-3: {ratio:.6f}")
    assert abs(ratio - 3) <= 0.03
    fro = bounds.spectral_probe_frobenius()
    assert fro.den == (1,) and fro.num == (0, 0, 6, 0, 3, 0, 1)
