"""Sparse tensors over an exact coefficient ring.

A :class:`Tensor` stores only its nonzero entries, keyed by index tuples.
Coefficients may be Fractions, :class:`~subrank.exactnum.EpsRational`
values, or anything else closed under ``+`` and ``*`` with a meaningful
truth value (zero is falsy).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .linalg import rank_bareiss


class ShapeMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Shape:
    dims: tuple

    def __post_init__(self):
        if len(self.dims) < 1:
            raise ValueError("a tensor needs at least one mode")
        if any(int(d) < 1 for d in self.dims):
            raise ValueError(f"invalid dimensions {self.dims}")
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))

    @property
    def order(self) -> int:
        return len(self.dims)

    def __iter__(self):
        return iter(self.dims)

    def __len__(self):
        return len(self.dims)

    def __getitem__(self, i):
        return self.dims[i]


class Tensor:
    """Immutable sparse tensor.

    >>> t = Tensor((2, 2), {(0, 0): 1, (1, 1): 1})
    >>> len(t)
    2
    """

    __slots__ = ("shape", "entries")

    def __init__(self, shape, entries=None, *, check=True):
        if not isinstance(shape, Shape):
            shape = Shape(tuple(shape))
        self.shape = shape
        clean = {}
        if entries:
            for idx, c in entries.items():
                idx = tuple(idx)
                if check:
                    if len(idx) != shape.order or any(
                        not (0 <= i < d) for i, d in zip(idx, shape.dims)
                    ):
                        raise IndexError(f"index {idx} out of range for shape {shape.dims}")
                    if isinstance(c, int) and not isinstance(c, bool):
                        c = Fraction(c)
                if c:
                    clean[idx] = c
        self.entries = clean

    @property
    def order(self) -> int:
        return self.shape.order

    @property
    def dims(self) -> tuple:
        return self.shape.dims

    def __len__(self):
        return len(self.entries)

    def items(self):
        """Entries in sorted (canonical) index order."""
        return sorted(self.entries.items())

    def __getitem__(self, idx):
        return self.entries.get(tuple(idx), 0)

    def __eq__(self, other):
        if not isinstance(other, Tensor):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self):
        return hash((self.shape, frozenset(self.entries.items())))

    def __repr__(self):
        return f"Tensor(shape={self.dims}, nnz={len(self.entries)})"

    def is_zero(self) -> bool:
        return not self.entries

    def map_coefficients(self, f) -> "Tensor":
        return Tensor(self.shape, {i: f(c) for i, c in self.entries.items()}, check=False)

    def __add__(self, other: "Tensor") -> "Tensor":
        if self.shape != other.shape:
            raise ShapeMismatch("cannot add tensors of different shapes")
        out = dict(self.entries)
        for i, c in other.entries.items():
            v = out.get(i, 0) + c
            if v:
                out[i] = v
            else:
                out.pop(i, None)
        return Tensor(self.shape, out, check=False)

    def scale(self, s) -> "Tensor":
        return Tensor(self.shape, {i: c * s for i, c in self.entries.items()}, check=False)

    def __sub__(self, other):
        return self + other.scale(-1)

    def permute_modes(self, perm: Sequence[int]) -> "Tensor":
        """Mode ``j`` of the result is mode ``perm[j]`` of ``self``."""
        dims = tuple(self.dims[p] for p in perm)
        return Tensor(dims, {tuple(i[p] for p in perm): c for i, c in self.entries.items()},
                      check=False)

    def contract(self, mode: int, vector: Sequence) -> "Tensor":
        """Contract ``mode`` against ``vector``; the order drops by one."""
        if len(vector) != self.dims[mode]:
            raise ShapeMismatch("vector length does not match the mode dimension")
        dims = self.dims[:mode] + self.dims[mode + 1:]
        out: dict = {}
        for idx, c in self.entries.items():
            w = vector[idx[mode]]
            if not w:
                continue
            key = idx[:mode] + idx[mode + 1:]
            out[key] = out.get(key, 0) + c * w
        return Tensor(dims, out, check=False)

    def dense(self, zero=Fraction(0)):
        """Nested-list view (only sensible for small tensors)."""
        arr = {}
        for idx in itertools.product(*[range(d) for d in self.dims]):
            arr[idx] = self.entries.get(idx, zero)
        return arr


@dataclass(frozen=True)
class ModeMap:
    """A linear map acting on the index space of one mode.

    ``matrix`` is a list of rows; its column count must equal the tensor
    dimension at ``mode``.
    """

    mode: int
    matrix: tuple

    def __init__(self, mode: int, matrix):
        object.__setattr__(self, "mode", int(mode))
        object.__setattr__(self, "matrix", tuple(tuple(r) for r in matrix))
        if self.matrix and len({len(r) for r in self.matrix}) != 1:
            raise ValueError("ragged mode-map matrix")

    @property
    def rows(self) -> int:
        return len(self.matrix)

    @property
    def cols(self) -> int:
        return len(self.matrix[0]) if self.matrix else 0

    def columns(self):
        """Sparse columns: list indexed by column of ``[(row, value), ...]``."""
        cols = [[] for _ in range(self.cols)]
        for r, row in enumerate(self.matrix):
            for c, v in enumerate(row):
                if v:
                    cols[c].append((r, v))
        return cols


def identity_matrix(n: int, one=Fraction(1), zero=Fraction(0)):
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def build_unit(order: int, r: int) -> Tensor:
    """The diagonal unit tensor with ``r`` ones.

    >>> sorted(build_unit(3, 2).entries)
    [(0, 0, 0), (1, 1, 1)]
    """
    if order < 1 or r < 1:
        raise ValueError("order and r must be positive")
    return Tensor((r,) * order, {(i,) * order: Fraction(1) for i in range(r)})


def apply_mode_maps(T: Tensor, maps: Iterable[ModeMap]) -> Tensor:
    """Compute ``(X_0 ⊗ ... ⊗ X_{m-1}) T`` exactly."""
    maps = sorted(maps, key=lambda m: m.mode)
    if [m.mode for m in maps] != list(range(T.order)):
        raise ShapeMismatch(f"need exactly one map per mode 0..{T.order - 1}")
    for m in maps:
        if m.cols != T.dims[m.mode]:
            raise ShapeMismatch(
                f"mode {m.mode}: map has {m.cols} columns, tensor dimension is {T.dims[m.mode]}"
            )
    entries = dict(T.entries)
    dims = list(T.dims)
    for m in maps:
        cols = m.columns()
        mode = m.mode
        out: dict = {}
        for idx, c in entries.items():
            for r, v in cols[idx[mode]]:
                key = idx[:mode] + (r,) + idx[mode + 1:]
                prev = out.get(key)
                out[key] = c * v if prev is None else prev + c * v
        entries = {k: v for k, v in out.items() if v}
        dims[mode] = m.rows
    if any(d < 1 for d in dims):
        raise ShapeMismatch("a mode map has zero rows")
    return Tensor(tuple(dims), entries, check=False)


def flattening_matrix(T: Tensor, modes: Iterable[int]):
    """Dense flattening: rows indexed by ``modes`` (row-major), columns by the rest."""
    modes = sorted(set(modes))
    rest = [m for m in range(T.order) if m not in modes]
    if not modes or not rest:
        raise ValueError("modes must be a proper nonempty subset")
    row_dims = [T.dims[m] for m in modes]
    col_dims = [T.dims[m] for m in rest]

    def flat(idx, ds):
        x = 0
        for i, d in zip(idx, ds):
            x = x * d + i
        return x

    nrows = 1
    for d in row_dims:
        nrows *= d
    ncols = 1
    for d in col_dims:
        ncols *= d
    mat = [[0] * ncols for _ in range(nrows)]
    for idx, c in T.entries.items():
        r = flat([idx[m] for m in modes], row_dims)
        s = flat([idx[m] for m in rest], col_dims)
        mat[r][s] = c
    return mat


def flattening_rank(T: Tensor, modes: Iterable[int]) -> int:
    """Exact rank of the flattening that groups ``modes`` against the rest.

    Only the nonzero rows and columns are materialized.
    """
    modes = sorted(set(modes))
    rest = [m for m in range(T.order) if m not in modes]
    if not modes or not rest:
        raise ValueError("modes must be a proper nonempty subset")
    row_keys: dict = {}
    col_keys: dict = {}
    cells = []
    for idx, c in T.entries.items():
        r = row_keys.setdefault(tuple(idx[m] for m in modes), len(row_keys))
        s = col_keys.setdefault(tuple(idx[m] for m in rest), len(col_keys))
        cells.append((r, s, c))
    if not cells:
        return 0
    if len(row_keys) > len(col_keys):
        cells = [(s, r, c) for r, s, c in cells]
        row_keys, col_keys = col_keys, row_keys
    mat = [[0] * len(col_keys) for _ in range(len(row_keys))]
    for r, s, c in cells:
        mat[r][s] = c
    return rank_bareiss(mat)


def is_concise(T: Tensor) -> bool:
    return all(flattening_rank(T, [m]) == T.dims[m] for m in range(T.order))


def recognize_unit(T: Tensor):
    """Return ``r`` when ``T`` is monomially equivalent to a unit tensor of size r.

    >>> recognize_unit(Tensor((2, 2, 2), {(0, 0, 0): 2, (1, 1, 1): 3}))
    2
    >>> recognize_unit(Tensor((1, 2, 2), {(0, 0, 0): 1, (0, 1, 1): 1})) is None
    True
    """
    r = len(T.entries)
    if r == 0:
        return None
    for m in range(T.order):
        if len({idx[m] for idx in T.entries}) != r:
            return None
    return r


def unit_defect(T: Tensor):
    """First index tuple that prevents ``T`` from being a monomial unit, or None."""
    for m in range(T.order):
        seen = {}
        for idx in sorted(T.entries):
            if idx[m] in seen:
                return idx
            seen[idx[m]] = idx
    return None


def direct_sum(T1: Tensor, T2: Tensor) -> Tensor:
    if T1.order != T2.order:
        raise ShapeMismatch("direct sum needs tensors of equal order")
    dims = tuple(a + b for a, b in zip(T1.dims, T2.dims))
    entries = dict(T1.entries)
    for idx, c in T2.entries.items():
        entries[tuple(i + d for i, d in zip(idx, T1.dims))] = c
    return Tensor(dims, entries, check=False)
