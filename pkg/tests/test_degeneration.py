from fractions import Fraction

import pytest

from subrank.algebras import (
    build_apolar_quadric,
    build_diagonal,
    build_null,
    build_sl,
    build_sl2_hab,
    build_triangular,
    build_truncated_poly,
    structure_tensor,
)
from subrank.degeneration import (
    Certificate,
    ClaimMismatch,
    InstabilityWitness,
    LimitNotUnit,
    RangeError,
    SplitMix64,
    apply_and_limit,
    build_mamu,
    cert_cw_k2,
    cert_cw_k3,
    cert_mamu,
    cert_sl2,
    cert_sl_block,
    cert_triangular,
    cert_triangular_restriction,
    cert_trd,
    derive_seed,
    family_tensor,
    identity_certificate,
    instability_check,
    is_average_free,
    lift_symmetric_check,
    mamu_lower,
    monotonicity_ledger,
    term_valuations,
    vandermonde_interpolation,
    verify_unit_certificate,
)
from subrank.exactnum import EpsRational, PoleAtZero
from subrank.tensor_core import ModeMap, Tensor, apply_mode_maps, build_unit, recognize_unit

E = EpsRational


def generic_limit(T, cert):
    """Second route: full EpsRational arithmetic, no Laurent fast path."""
    image = apply_mode_maps(T.map_coefficients(E.coerce), cert.mode_maps)
    return Tensor(image.dims, {i: c.eps_limit() for i, c in image.items() if c.eps_limit()})


@pytest.mark.parametrize("k,d", [(1, 4), (2, 3), (2, 5), (3, 7), (4, 9)])
def test_trd_certificate_sizes(k, d):
    T = structure_tensor(build_truncated_poly(d), k)
    assert verify_unit_certificate(T, cert_trd(k, d)) == (d - 1) // k + 1


@pytest.mark.parametrize("T,cert", [
    (structure_tensor(build_truncated_poly(5), 2), cert_trd(2, 5)),
    (structure_tensor(build_triangular(3), 2), cert_triangular(2, 3)),
    (structure_tensor(build_apolar_quadric(3), 2), cert_cw_k2(3)),
    (structure_tensor(build_sl2_hab(), 3), cert_sl2(3)),
    (build_mamu([3] * 4), cert_mamu(3, 3)),
], ids=["trd", "tri", "cw", "sl2", "mamu"])
def test_fast_and_generic_limits_agree(T, cert):
    assert apply_and_limit(T, cert) == generic_limit(T, cert)


def test_trd_term_valuations_vanish_only_on_the_diagonal():
    T = structure_tensor(build_truncated_poly(7), 2)
    for src, tgt, v in term_valuations(T, cert_trd(2, 7)):
        assert v >= 0
        if v == 0:
            assert len(set(tgt)) == 1


def test_triangular_and_restriction():
    for n in range(2, 6):
        for k in range(1, 4):
            q = n // k
            T = structure_tensor(build_triangular(n), k)
            assert verify_unit_certificate(T, cert_triangular(k, n)) == (q + 1) * (2 * n - q * k) // 2
    T = structure_tensor(build_triangular(5), 3)
    assert verify_unit_certificate(T, cert_triangular_restriction(3, 5, [0, 1])) == 7
    assert not is_average_free([0, 1, 2], 3)
    with pytest.raises(ValueError):
        cert_triangular_restriction(3, 7, [0, 1, 2])


def test_mamu_sizes():
    assert verify_unit_certificate(build_mamu([4] * 4), cert_mamu(3, 4)) == 8
    assert verify_unit_certificate(build_mamu([5] * 5), cert_mamu(4, 5)) == 9
    assert mamu_lower(4, 3) == 8
    assert build_mamu([2, 2, 2]).dims == (4, 4, 4) and len(build_mamu([2, 2, 2])) == 8


def test_cw_and_sl_certificates():
    assert apply_and_limit(structure_tensor(build_apolar_quadric(3), 2), cert_cw_k2(3)) == build_unit(3, 3)
    assert recognize_unit(apply_and_limit(structure_tensor(build_apolar_quadric(2), 3), cert_cw_k3(2))) == 2
    for n in (2, 3, 4, 5):
        assert verify_unit_certificate(structure_tensor(build_sl(n), 2), cert_sl_block(n)) == n
    for k in (2, 5):
        assert verify_unit_certificate(structure_tensor(build_sl2_hab(), k), cert_sl2(k)) == 2


def test_failure_modes():
    T = structure_tensor(build_truncated_poly(3), 2)
    cert = cert_trd(2, 3)
    # identity maps leave T^(2)_{R_3} itself, which is not a unit tensor
    with pytest.raises(LimitNotUnit) as info:
        verify_unit_certificate(T, identity_certificate(T, 3))
    assert info.value.index is not None
    with pytest.raises(ClaimMismatch):
        verify_unit_certificate(T, Certificate("trd", {}, cert.mode_maps, 3))
    pole = [list(map(list, m.matrix)) for m in cert.mode_maps]
    pole[0][0][0] = E.monomial(1, -5)
    with pytest.raises(PoleAtZero):
        verify_unit_certificate(T, Certificate("pole", {}, pole, 2))
    with pytest.raises(ValueError):
        Certificate("x", {}, [], 0)


def test_instability():
    assert instability_check(build_truncated_poly(3), 4, seed=3)
    assert instability_check(build_apolar_quadric(2), 4, seed=3)
    assert instability_check(build_apolar_quadric(3), 5, seed=3)
    assert instability_check(build_null(2), 3, seed=3)
    with pytest.raises(RangeError):
        instability_check(build_truncated_poly(4), 2, seed=3)
    with pytest.raises(ValueError):
        InstabilityWitness([], [[1, 1]])


def test_symmetric_lift():
    # g carries the idempotent basis of Q^d to 1, x, ..., x^(d-1) in Q[x]/prod(x - i eps)
    for d in (2, 3):
        assert lift_symmetric_check(vandermonde_interpolation(d), build_diagonal(d),
                                    build_truncated_poly(d), 3)
    # the identity change of basis does not turn the diagonal algebra into R_3
    ident = [[Fraction(int(i == j)) for j in range(3)] for i in range(3)]
    assert not lift_symmetric_check(ident, build_diagonal(3), build_truncated_poly(3), 2)


def test_monotonicity_ledger():
    rows = monotonicity_ledger("trd", {"d": 6}, range(1, 6))
    assert [r for _, r in rows] == [6, 3, 2, 2, 2]


def test_splitmix_reference_and_seeds():
    # reference output of splitmix64 seeded with 0
    assert SplitMix64(0).next_u64() == 0xE220A8397B1DCDAF
    a = [SplitMix64(derive_seed(5, "x")).randint(-5, 5) for _ in range(3)]
    b = [SplitMix64(derive_seed(5, "x")).randint(-5, 5) for _ in range(3)]
    assert a == b
    assert derive_seed(5, "x") != derive_seed(5, "y")
    rng = SplitMix64(9)
    assert all(-2 <= rng.randint(-2, 2) <= 2 for _ in range(200))


def test_family_tensor_mamu_matches_builder():
    assert family_tensor("mamu", {"n": 2}, 3) == build_mamu([2, 2, 2, 2])
