import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subrank.tensor_core import (
    ModeMap,
    ShapeMismatch,
    Tensor,
    apply_mode_maps,
    build_unit,
    direct_sum,
    flattening_rank,
    is_concise,
    recognize_unit,
    unit_defect,
)


@st.composite
def small_tensors(draw, order=3, max_dim=3):
    dims = tuple(draw(st.integers(1, max_dim)) for _ in range(order))
    entries = {}
    for idx in itertools.product(*[range(d) for d in dims]):
        v = draw(st.integers(-2, 2))
        if v:
            entries[idx] = v
    return Tensor(dims, entries)


def to_numpy(T):
    arr = np.zeros(T.dims)
    for idx, c in T.entries.items():
        arr[idx] = float(c)
    return arr


@given(small_tensors())
@settings(max_examples=60)
def test_flattening_rank_matches_numpy(T):
    arr = to_numpy(T)
    for m in range(3):
        M = np.moveaxis(arr, m, 0).reshape(T.dims[m], -1)
        assert flattening_rank(T, [m]) == np.linalg.matrix_rank(M)


@given(small_tensors(), st.randoms(use_true_random=False))
@settings(max_examples=40)
def test_apply_mode_maps_matches_einsum(T, rnd):
    mats = [[[Fraction(rnd.randint(-3, 3)) for _ in range(d)] for _ in range(2)] for d in T.dims]
    out = apply_mode_maps(T, [ModeMap(i, m) for i, m in enumerate(mats)])
    ref = np.einsum("abc,ia,jb,kc->ijk", to_numpy(T), *[np.array(m, dtype=float) for m in mats])
    assert np.array_equal(to_numpy(out), ref)


def test_unit_tensor_and_recognition():
    u = build_unit(3, 4)
    assert recognize_unit(u) == 4
    assert is_concise(u)
    assert unit_defect(u) is None
    bad = Tensor((2, 2, 2), {(0, 0, 0): 1, (0, 1, 1): 1})
    assert recognize_unit(bad) is None
    assert unit_defect(bad) == (0, 1, 1)
    assert recognize_unit(Tensor((2, 2), {})) is None


def test_direct_sum_adds_flattening_ranks():
    T = direct_sum(build_unit(3, 2), build_unit(3, 3))
    assert recognize_unit(T) == 5
    assert all(flattening_rank(T, [m]) == 5 for m in range(3))


def test_permute_and_contract():
    T = Tensor((2, 3), {(0, 1): 2, (1, 2): 5})
    P = T.permute_modes((1, 0))
    assert P.dims == (3, 2) and P[1, 0] == 2
    assert T.contract(1, [0, 1, 1]).entries == {(0,): 2, (1,): 5}
    with pytest.raises(ShapeMismatch):
        T.contract(0, [1, 2, 3])


def test_shape_errors():
    with pytest.raises(IndexError):
        Tensor((2, 2), {(2, 0): 1})
    with pytest.raises(ShapeMismatch):
        apply_mode_maps(build_unit(2, 2), [ModeMap(0, [[1, 0, 0]]), ModeMap(1, [[1, 0]])])
    with pytest.raises(ShapeMismatch):
        apply_mode_maps(build_unit(2, 2), [ModeMap(0, [[1, 0]])])
    with pytest.raises(ValueError):
        build_unit(3, 0)
