"""Certificate engine and the library of explicit degenerations.

A :class:`Certificate` is plain data: one eps-rational matrix per tensor
mode plus the claimed unit-tensor size.  :func:`verify_unit_certificate`
applies the maps, takes the limit eps -> 0 and recognizes the result.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .algebras import (
    Algebra,
    build_apolar_quadric,
    build_diagonal,
    build_matrix_algebra,
    build_null,
    build_sl,
    build_sl2_hab,
    build_triangular,
    build_truncated_poly,
    constant_family,
    maximal_ideal_powers,
    sl2_hab_change_of_basis,
    socle_degree,
    structure_tensor,
    triangular_index,
)
from .exactnum import EpsRational, PoleAtZero
from .linalg import inverse, matmul, transpose
from .tensor_core import (
    ModeMap,
    ShapeMismatch,
    Tensor,
    apply_mode_maps,
    recognize_unit,
    unit_defect,
)


class LimitNotUnit(ValueError):
    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class ClaimMismatch(ValueError):
    def __init__(self, message, found=None, claimed=None):
        super().__init__(message)
        self.found = found
        self.claimed = claimed


class RangeError(ValueError):
    pass


class MonotonicityViolation(AssertionError):
    pass


E = EpsRational
ZERO = E.const(0)
ONE = E.const(1)


def eps_power(c, e):
    return E.monomial(c, e)


@dataclass
class Certificate:
    family_tag: str
    params: dict
    mode_maps: list
    claimed_unit: int

    def __post_init__(self):
        if self.claimed_unit < 1:
            raise ValueError("claimed_unit must be at least 1")
        maps = []
        for i, m in enumerate(self.mode_maps):
            if not isinstance(m, ModeMap):
                m = ModeMap(i, m)
            mat = tuple(tuple(E.coerce(x) for x in row) for row in m.matrix)
            maps.append(ModeMap(m.mode, mat))
        self.mode_maps = maps

    @property
    def order(self):
        return len(self.mode_maps)

    def __eq__(self, other):
        if not isinstance(other, Certificate):
            return NotImplemented
        return (self.family_tag == other.family_tag and self.params == other.params
                and self.claimed_unit == other.claimed_unit
                and [(m.mode, m.matrix) for m in self.mode_maps]
                == [(m.mode, m.matrix) for m in other.mode_maps])


@dataclass
class InstabilityWitness:
    restriction: list
    subgroup_weights: list

    def __post_init__(self):
        for w in self.subgroup_weights:
            if sum(w) != 0:
                raise ValueError("one-parameter subgroup weights must sum to zero")


# ---------------------------------------------------------------------------
# engine

def _laurent(x):
    """Sparse Laurent form {exponent: coeff}, or None if x is not Laurent."""
    if isinstance(x, (int, Fraction)):
        return {0: Fraction(x)} if x else {}
    den = x.den
    if sum(1 for c in den if c) != 1:
        return None
    m = len(den) - 1
    return {i - m: c for i, c in enumerate(x.num) if c}


def _lmul(a, b):
    if len(a) == 1 and len(b) == 1:
        (ea, ca), = a.items()
        (eb, cb), = b.items()
        return {ea + eb: ca * cb}
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = ea + eb
            out[e] = out.get(e, 0) + ca * cb
    return {e: c for e, c in out.items() if c}


def _ladd_into(target, a):
    for e, c in a.items():
        v = target.get(e, 0) + c
        if v:
            target[e] = v
        else:
            target.pop(e, None)


def _check_shapes(T, maps):
    if len(maps) != T.order:
        raise ShapeMismatch(f"certificate has {len(maps)} maps, tensor has order {T.order}")
    for m in maps:
        if m.cols != T.dims[m.mode]:
            raise ShapeMismatch(
                f"mode {m.mode}: map has {m.cols} columns, tensor dimension is {T.dims[m.mode]}")


def _laurent_columns(maps):
    out = []
    for m in maps:
        cols = [[] for _ in range(m.cols)]
        for r, row in enumerate(m.matrix):
            for c, v in enumerate(row):
                if v:
                    L = _laurent(v)
                    if L is None:
                        return None
                    cols[c].append((r, L))
        out.append(cols)
    return out


def apply_laurent(T: Tensor, maps):
    """Apply mode maps whose entries are Laurent polynomials in eps.

    Returns ``(dims, entries)`` with entries as {exponent: coeff} dicts, or
    None when some map entry has a non-monomial denominator.
    """
    cols_all = _laurent_columns(maps)
    if cols_all is None:
        return None
    entries = {idx: {0: Fraction(c)} for idx, c in T.entries.items()}
    dims = list(T.dims)
    for m, cols in zip(maps, cols_all):
        mode = m.mode
        out: dict = {}
        for idx, L in entries.items():
            for r, M in cols[idx[mode]]:
                key = idx[:mode] + (r,) + idx[mode + 1:]
                prod = _lmul(L, M)
                cur = out.get(key)
                if cur is None:
                    out[key] = prod
                else:
                    _ladd_into(cur, prod)
        entries = {k: v for k, v in out.items() if v}
        dims[mode] = m.rows
    return tuple(dims), entries


def apply_and_limit(T: Tensor, cert) -> Tensor:
    """Apply the certificate's maps to ``T`` and take the limit eps -> 0."""
    maps = sorted(cert.mode_maps if isinstance(cert, Certificate) else cert, key=lambda m: m.mode)
    _check_shapes(T, maps)
    fast = apply_laurent(T, maps)
    if fast is not None:
        dims, entries = fast
        limit = {}
        for idx in sorted(entries):
            L = entries[idx]
            low = min(L)
            if low < 0:
                raise PoleAtZero(f"entry {idx} has a pole of order {-low} at eps = 0")
            if low == 0:
                limit[idx] = L[0]
        return Tensor(dims, limit, check=False)
    lifted = T.map_coefficients(E.coerce)
    image = apply_mode_maps(lifted, maps)
    limit = {}
    for idx, c in image.items():
        try:
            v = c.eps_limit()
        except PoleAtZero as exc:
            raise PoleAtZero(f"entry {idx}: {exc}") from None
        if v:
            limit[idx] = v
    return Tensor(image.dims, limit, check=False)


def verify_unit_certificate(T: Tensor, cert: Certificate) -> int:
    """Verify that ``cert`` degenerates ``T`` to the claimed unit tensor."""
    L = apply_and_limit(T, cert)
    r = recognize_unit(L)
    if r is None:
        bad = unit_defect(L)
        if L.is_zero():
            raise LimitNotUnit("the limit tensor is zero", None)
        raise LimitNotUnit(f"limit is not a monomial unit tensor; offending index {bad}", bad)
    if r != cert.claimed_unit:
        raise ClaimMismatch(f"limit is a unit tensor of size {r}, claimed {cert.claimed_unit}",
                            found=r, claimed=cert.claimed_unit)
    return r


def term_valuations(T: Tensor, cert: Certificate):
    """Per-term valuations for certificates made of monomial columns.

    Returns a list of ``(source_index, target_index, valuation)``: each
    nonzero term of ``T`` is pushed through the maps without summing
    contributions of different source terms.
    """
    maps = sorted(cert.mode_maps, key=lambda m: m.mode)
    cols_all = _laurent_columns(maps)
    if cols_all is None:
        raise ValueError("certificate entries are not Laurent monomials")
    out = []
    for src, c in T.items():
        partial = [((), {0: Fraction(c)})]
        for mode, cols in enumerate(cols_all):
            nxt = []
            for tgt, L in partial:
                for r, M in cols[src[mode]]:
                    nxt.append((tgt + (r,), _lmul(L, M)))
            partial = nxt
        for tgt, L in partial:
            if L:
                out.append((src, tgt, min(L)))
    return out


# ---------------------------------------------------------------------------
# helpers for building certificates

def _zeros(rows, cols):
    return [[ZERO] * cols for _ in range(rows)]


def _diag_eps(exponents):
    n = len(exponents)
    m = _zeros(n, n)
    for i, e in enumerate(exponents):
        m[i][i] = eps_power(1, e)
    return m


def _selection(rows, cols, assignments):
    """Matrix with entry ``value`` at (row, col) for each (col, row, value)."""
    m = _zeros(rows, cols)
    for col, row, val in assignments:
        m[row][col] = E.coerce(val)
    return m


def identity_certificate(T: Tensor, r: int | None = None, tag="identity") -> Certificate:
    maps = []
    for mode, d in enumerate(T.dims):
        maps.append(ModeMap(mode, [[ONE if i == j else ZERO for j in range(d)] for i in range(d)]))
    claimed = r if r is not None else (recognize_unit(T) or 1)
    return Certificate(tag, {}, maps, claimed)


def cert_trd(k: int, d: int) -> Certificate:
    """Degeneration of T^(k)_{R_d} to a unit tensor of size floor((d-1)/k) + 1."""
    if k < 1 or d < 1:
        raise ValueError("k and d must be positive")
    q = (d - 1) // k
    pbar = q // 2
    w = [2 ** abs(p - pbar) for p in range(q + 1)]
    mode0 = _selection(q + 1, d, [(k * p, p, eps_power(1, -k * w[p])) for p in range(q + 1)])
    inputs = _selection(q + 1, d, [(p, p, eps_power(1, w[p])) for p in range(q + 1)])
    maps = [ModeMap(0, mode0)] + [ModeMap(i, inputs) for i in range(1, k + 1)]
    return Certificate("trd", {"k": k, "d": d}, maps, q + 1)


def triangular_gr(k: int, n: int) -> int:
    q = n // k
    return (q + 1) * (2 * n - q * k) // 2


def cert_triangular(k: int, n: int) -> Certificate:
    """Degeneration of T^(k)_{T_n}: weights eps^-(b-a)^2 on the output, eps^k(b-a)^2 on inputs."""
    index = triangular_index(n)
    dim = len(index)
    out_exp = [0] * dim
    in_exp = [0] * dim
    for (a, b), t in index.items():
        out_exp[t] = -((b - a) ** 2)
        in_exp[t] = k * (b - a) ** 2
    maps = [ModeMap(0, _diag_eps(out_exp))] + [ModeMap(i, _diag_eps(in_exp)) for i in range(1, k + 1)]
    return Certificate("tri", {"k": k, "n": n}, maps, triangular_gr(k, n))


def is_average_free(D, k: int) -> bool:
    """True iff x_1 + ... + x_k = k*y with all x_i, y in D forces x_i = y."""
    D = sorted(set(D))
    for y in D:
        for xs in itertools.combinations_with_replacement(D, k):
            if sum(xs) == k * y and any(x != y for x in xs):
                return False
    return True


def cert_triangular_restriction(k: int, n: int, D) -> Certificate:
    """Restriction of T^(k)_{T_n} keyed to a k-average-free set D."""
    D = sorted(set(D))
    qmax = (n - 1) // k
    if not D or any(not (0 <= x <= qmax) for x in D):
        raise ValueError(f"D must be a nonempty subset of 0..{qmax}")
    if not is_average_free(D, k):
        raise ValueError(f"{D} is not {k}-average free")
    index = triangular_index(n)
    positions = [(a, d) for d in D for a in range(n - k * d)]
    size = len(positions)
    out_assign = []
    in_assign = [[] for _ in range(k + 1)]
    for pos, (a, d) in enumerate(positions):
        out_assign.append((index[(a, a + k * d)], pos, 1))
        for p in range(1, k + 1):
            in_assign[p].append((index[(a + (p - 1) * d, a + p * d)], pos, 1))
    maps = [ModeMap(0, _selection(size, len(index), out_assign))]
    maps += [ModeMap(p, _selection(size, len(index), in_assign[p])) for p in range(1, k + 1)]
    return Certificate("tri-restriction", {"k": k, "n": n, "D": list(D)}, maps, size)


def mamu_lower(n: int, k: int) -> int:
    """M(n, k) = n + 2 * sum_{i<n} floor(i / (k-1))."""
    return n + 2 * sum(i // (k - 1) for i in range(n))


def build_mamu(dims) -> Tensor:
    """Iterated matrix multiplication tensor for matrices of sizes n0 x n1, ..., n_{k-1} x n_k.

    Mode 0 is indexed by e_{i0 ik}, mode j by e_{i_{j-1} i_j} (row-major).
    """
    dims = [int(x) for x in dims]
    k = len(dims) - 1
    if k < 1:
        raise ValueError("need at least two dimensions")
    shape = [dims[0] * dims[k]] + [dims[j - 1] * dims[j] for j in range(1, k + 1)]
    entries = {}
    for idx in itertools.product(*[range(n) for n in dims]):
        key = [idx[0] * dims[k] + idx[k]]
        key += [idx[j - 1] * dims[j] + idx[j] for j in range(1, k + 1)]
        entries[tuple(key)] = Fraction(1)
    return Tensor(tuple(shape), entries, check=False)


def _mamu_vectors(k):
    dim = k - 1
    c = []
    for j in range(k + 1):
        v = [0] * dim
        if j == 0:
            v[0] = 1
        elif j <= k - 2:
            v[j - 1] = 1
            v[j] = 1
        elif j == k - 1:
            v[k - 2] = 1
        else:
            v = [(-1) ** (t + 2) for t in range(dim)]  # e_1 - e_2 + e_3 - ...
        c.append(v)
    return c


def cert_mamu(k: int, n: int) -> Certificate:
    """Degeneration of MaMu_(n,...,n) (k inputs) from an orthogonal representation of the (k+1)-cycle."""
    if k < 3 or n < 1:
        raise ValueError("cert_mamu needs k >= 3 and n >= 1")
    c = _mamu_vectors(k)
    q = (n - 1) // (k - 1)
    h = [(n - 1) - (-1) ** l * q for l in range(1, k)]

    def dot(u, v):
        return sum(a * b for a, b in zip(u, v))

    sq = [dot(v, v) for v in c]
    lin = [dot(v, h) for v in c]
    hh = dot(h, h)
    N = n * n
    # mode 0 carries (i0, ik): both squares, both linear terms, the cross term, |h|^2
    e0 = [0] * N
    for i0 in range(n):
        for ik in range(n):
            e0[i0 * n + ik] = (sq[0] * i0 * i0 + sq[k] * ik * ik + 2 * dot(c[0], c[k]) * i0 * ik
                               - 2 * lin[0] * i0 - 2 * lin[k] * ik + hh)
    maps = [ModeMap(0, _diag_eps(e0))]
    for j in range(1, k + 1):
        ej = [0] * N
        for a in range(n):
            for b in range(n):
                x = 2 * dot(c[j - 1], c[j]) * a * b
                if j <= k - 1:
                    x += sq[j] * b * b - 2 * lin[j] * b
                ej[a * n + b] = x
        maps.append(ModeMap(j, _diag_eps(ej)))
    return Certificate("mamu", {"k": k, "n": n}, maps, mamu_lower(n, k))


def cert_cw_k2(n: int = 3) -> Certificate:
    """Restriction T^(2)_{Q_n} -> u_3(3) for n >= 3 (x_j with j > 3 are killed)."""
    if n < 3:
        raise ValueError("needs n >= 3")
    dim = n + 2
    y = n + 1
    X0 = _selection(3, dim, [(1, 0, 1), (2, 1, 1), (y, 2, 1)])
    X1 = _selection(3, dim, [(0, 1, 1), (1, 0, 1), (3, 2, 1)])
    X2 = _selection(3, dim, [(0, 0, 1), (2, 1, 1), (3, 2, 1)])
    maps = [ModeMap(0, X0), ModeMap(1, X1), ModeMap(2, X2)]
    return Certificate("cw", {"k": 2, "n": n}, maps, 3)


def cert_cw_k3(n: int = 2) -> Certificate:
    """Restriction T^(3)_{Q_n} -> u_4(2) for n >= 2."""
    if n < 2:
        raise ValueError("needs n >= 2")
    dim = n + 2
    y = n + 1
    X0 = _selection(2, dim, [(1, 0, 1), (y, 1, 1)])
    X1 = _selection(2, dim, [(0, 1, 1), (1, 0, 1)])
    X23 = _selection(2, dim, [(0, 0, 1), (2, 1, 1)])
    maps = [ModeMap(0, X0), ModeMap(1, X1), ModeMap(2, X23), ModeMap(3, X23)]
    return Certificate("cw", {"k": 3, "n": n}, maps, 2)


def cert_cw_k2_small(n: int = 2) -> Certificate:
    """Restriction T^(2)_{Q_n} -> u_3(2) for n >= 2."""
    if n < 2:
        raise ValueError("needs n >= 2")
    dim = n + 2
    y = n + 1
    X0 = _selection(2, dim, [(1, 0, 1), (y, 1, 1)])
    X1 = _selection(2, dim, [(1, 0, 1), (2, 1, 1)])
    X2 = _selection(2, dim, [(0, 0, 1), (2, 1, 1)])
    return Certificate("cw", {"k": 2, "n": n}, [ModeMap(0, X0), ModeMap(1, X1), ModeMap(2, X2)], 2)


def cert_null_k2(n: int) -> Certificate:
    """Restriction T^(2)_{N_n} -> u_3(2) for n >= 2."""
    if n < 2:
        raise ValueError("needs n >= 2")
    dim = n + 1
    X0 = _selection(2, dim, [(1, 0, 1), (2, 1, 1)])
    X1 = _selection(2, dim, [(1, 0, 1), (0, 1, 1)])
    X2 = _selection(2, dim, [(0, 0, 1), (2, 1, 1)])
    return Certificate("null", {"k": 2, "n": n}, [ModeMap(0, X0), ModeMap(1, X1), ModeMap(2, X2)], 2)


def cert_idempotent(A: Algebra, k: int, tag="idempotent") -> Certificate:
    """Restriction to u_{k+1}(1) through a basis element e with e*e = e."""
    for i in range(A.dim):
        if A.products.get((i, i)) == {i: 1}:
            break
    else:
        raise ValueError("no idempotent basis element")
    row = [[ONE if j == i else ZERO for j in range(A.dim)]]
    maps = [ModeMap(m, row) for m in range(k + 1)]
    return Certificate(tag, {"k": k, "basis_index": i}, maps, 1)


# sl_2 and sl_3 restriction tables, standard basis
# entries: (basis label, target coordinate, coefficient)
_SL2_TABLE = {
    0: [("e12", 0, Fraction(1, 2)), ("e21", 1, Fraction(1, 2))],
    1: [("h1", 0, 1), ("e21", 1, 1)],
    2: [("h1", 1, 1), ("e12", 0, 1)],
}
_SL3_TABLE = {
    0: [("h2", 2, 1), ("e12", 0, Fraction(1, 2)), ("e21", 1, Fraction(1, 2))],
    1: [("h1", 0, 1), ("e23", 2, 1), ("e21", 1, 1)],
    2: [("h1", 1, 1), ("e12", 0, 1), ("e32", 2, 1)],
}


def _relabel(label, offset):
    """Shift a block-local sl label to the global sl_n label."""
    if label[0] == "h":
        return f"h{int(label[1:]) + offset}"
    return f"e{int(label[1]) + offset}{int(label[2]) + offset}"


def cert_sl_block(n: int) -> Certificate:
    """Restriction T^(2)_{sl_n} -> u_3(n) through block-diagonal sl_2 and sl_3 copies."""
    if n < 2:
        raise ValueError("needs n >= 2")
    if n > 9:
        raise ValueError("labels support n <= 9")
    # n = 2p + 3q with q in {0, 1}
    q = n % 2
    p = (n - 3 * q) // 2
    blocks = [2] * p + [3] * q
    A = build_sl(n)
    label_index = {lab: t for t, lab in enumerate(A.basis_labels)}
    assign = {0: [], 1: [], 2: []}
    offset = 0
    for size in blocks:
        table = _SL2_TABLE if size == 2 else _SL3_TABLE
        for mode, rows in table.items():
            for lab, tgt, val in rows:
                assign[mode].append((label_index[_relabel(lab, offset)], offset + tgt, val))
        offset += size
    maps = [ModeMap(m, _selection(n, A.dim, assign[m])) for m in range(3)]
    return Certificate("sl-block", {"n": n, "blocks": blocks}, maps, n)


def _rat_matrix_to_eps(m):
    return [[E.coerce(x) for x in row] for row in m]


def cert_sl2(k: int) -> Certificate:
    """Degeneration of T^(k)_{sl_2} (h, a, b basis) to u_{k+1}(2)."""
    if k < 2:
        raise ValueError("needs k >= 2")
    if k == 2:
        # the standard-basis restriction table, transported to the h, a, b basis
        P = sl2_hab_change_of_basis()
        Pinv_T = transpose(inverse(P, Fraction(1), Fraction(0)))
        std = build_sl(2)
        lab = {l: t for t, l in enumerate(std.basis_labels)}
        X = {}
        for m in range(3):
            X[m] = [[Fraction(0)] * 3 for _ in range(2)]
            for l, t, v in _SL2_TABLE[m]:
                X[m][t][lab[l]] = Fraction(v)
        maps = [ModeMap(0, _rat_matrix_to_eps(matmul(X[0], P, Fraction(0))))]
        for m in (1, 2):
            # dual coordinates change by the inverse transpose
            maps.append(ModeMap(m, _rat_matrix_to_eps(matmul(X[m], Pinv_T, Fraction(0)))))
        return Certificate("sl2", {"k": 2}, maps, 2)
    H, A_, B = 0, 1, 2
    q = (k - 1) // 2
    scale = Fraction(1, 2 ** (k - 1))
    X0 = [[E.const(scale) if i == j else ZERO for j in range(3)] for i in range(3)]
    X1 = [[ONE if (i == j and i != H) else ZERO for j in range(3)] for i in range(3)]
    Xl = [[ONE if (i == j and i != B) else ZERO for j in range(3)] for i in range(3)]
    if k % 2:
        g0 = [ZERO, ONE, ONE]
        g1 = [ONE, ONE, eps_power(1, q)]
    else:
        g0 = [ONE, ZERO, ONE]
        g1 = [ONE, ONE, eps_power(1, -q - 2)]

    def scaled(diag, M):
        return [[diag[i] * x for x in M[i]] for i in range(3)]

    maps = [ModeMap(0, scaled(g0, X0)), ModeMap(1, scaled(g1, X1))]
    for p in range(2, k + 1):
        gp = [ONE, eps_power(1, (-1) ** p * p), ONE]
        maps.append(ModeMap(p, scaled(gp, Xl)))
    return Certificate("sl2", {"k": k}, maps, 2)


# ---------------------------------------------------------------------------
# seeded sampling

MASK64 = (1 << 64) - 1


class SplitMix64:
    """64-bit split-mix generator; deterministic across platforms."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi] (rejection sampling, no modulo bias)."""
        span = hi - lo + 1
        limit = (1 << 64) - ((1 << 64) % span)
        while True:
            x = self.next_u64()
            if x < limit:
                return lo + x % span


def derive_seed(seed: int, *labels) -> int:
    """Per-job seed from a master seed and a job label."""
    h = hashlib.sha256(repr((int(seed) & MASK64,) + tuple(labels)).encode()).digest()
    return int.from_bytes(h[:8], "little")


def random_matrix(rng: SplitMix64, rows, cols, lo=-5, hi=5):
    return [[Fraction(rng.randint(lo, hi)) for _ in range(cols)] for _ in range(rows)]


def random_restriction(T: Tensor, target_dims, rng: SplitMix64):
    """Seeded integer restriction of ``T`` to the shape ``target_dims``."""
    maps = [ModeMap(m, random_matrix(rng, target_dims[m], T.dims[m])) for m in range(T.order)]
    return apply_mode_maps(T, maps)


def _normalizer(v):
    """Invertible matrix G with G v = e_0 (requires v[0] != 0)."""
    n = len(v)
    cols = [[v[i] for i in range(n)]] + [[Fraction(int(i == j)) for i in range(n)] for j in range(1, n)]
    M = transpose(cols)
    return inverse(M, Fraction(1), Fraction(0))


def _sample_normalized(rng, rows, cols, vector):
    """Random matrix X with X @ vector proportional to e_0 after normalization."""
    while True:
        X = random_matrix(rng, rows, cols)
        v = [sum(X[i][t] * vector[t] for t in range(cols)) for i in range(rows)]
        if v[0] != 0:
            return matmul(_normalizer(v), X, Fraction(0))


def instability_setup(A: Algebra, k: int):
    """Target size and subgroup weights for the socle instability argument."""
    s, r = socle_degree(A)
    if k >= 2 * s + 1:
        return 2, [[0, 0]] + [[1, -1]] * k, False
    if k == 2 * s and r == 1:
        return 2, [[1, -1]] * (k + 1), True
    if k == 2 * s:
        return 3, [[0, 0, 0]] + [[2, -1, -1]] * k, False
    raise RangeError(f"k = {k} is below the range k >= 2s = {2 * s} for socle degree {s}")


def instability_check(A: Algebra, k: int, seed: int, samples: int = 20, failures=None) -> bool:
    """Sample normalized restrictions of T^(k)_A and push them to zero.

    This is a sample-based check, not a proof.  Violating samples are
    appended to ``failures`` when a list is given.
    """
    size, weights, mode0_normalized = instability_setup(A, k)
    T = structure_tensor(A, k)
    u = A.unit_index
    unit_dual = [Fraction(int(t == u)) for t in range(A.dim)]
    top = maximal_ideal_powers(A)[-1]
    ok = True
    for job in range(samples):
        rng = SplitMix64(derive_seed(seed, "instability", A.name, k, job))
        if mode0_normalized:
            X0 = _sample_normalized(rng, size, A.dim, top[0])
        else:
            X0 = random_matrix(rng, size, A.dim)
        maps = [ModeMap(0, X0)]
        for p in range(1, k + 1):
            maps.append(ModeMap(p, _sample_normalized(rng, size, A.dim, unit_dual)))
        restricted = apply_mode_maps(T, maps)
        subgroup = [ModeMap(m, _diag_eps(w)) for m, w in enumerate(weights)]
        try:
            limit = apply_and_limit(restricted, Certificate("1ps", {}, subgroup, 1))
            vanished = limit.is_zero()
        except PoleAtZero:
            vanished = False
        if not vanished:
            ok = False
            if failures is not None:
                failures.append(InstabilityWitness(maps, weights))
    return ok


# ---------------------------------------------------------------------------
# symmetric lifts

def inverse_transpose(g):
    n = len(g)
    return transpose(inverse([[E.coerce(x) for x in row] for row in g], ONE, ZERO))


def vandermonde_interpolation(d: int):
    """Matrix sending the idempotent basis of Q^d to Q[x]/prod(x - i eps), basis 1..x^(d-1).

    Column i holds the Lagrange polynomial of the root i*eps.
    """
    V = [[E.monomial(i ** m, m) if i else (ONE if m == 0 else ZERO) for m in range(d)]
         for i in range(d)]
    return inverse(V, ONE, ZERO)


def lift_symmetric_check(g, A_family: Algebra, B: Algebra, k_max: int) -> bool:
    """Check lim (g ⊗ g^-T ⊗ ... ⊗ g^-T) T^(k)_{A(eps)} = T^(k)_B for k = 2..k_max."""
    g = [[E.coerce(x) for x in row] for row in g]
    git = inverse_transpose(g)
    if A_family.coefficient_one != ONE:
        A_family = constant_family(A_family)
    for k in range(2, k_max + 1):
        T = structure_tensor(A_family, k)
        maps = [ModeMap(0, g)] + [ModeMap(i, git) for i in range(1, k + 1)]
        image = apply_mode_maps(T, maps)
        limit = {}
        for idx, c in image.items():
            v = c.eps_limit()
            if v:
                limit[idx] = v
        if Tensor(image.dims, limit, check=False) != structure_tensor(B, k):
            return False
    return True


# ---------------------------------------------------------------------------
# family registry

FAMILIES = ("trd", "tri", "cw", "null", "mamu", "sl2", "sl")


def family_algebra(family: str, params: dict) -> Algebra:
    if family == "trd":
        return build_truncated_poly(params["d"])
    if family == "tri":
        return build_triangular(params["n"])
    if family == "cw":
        return build_apolar_quadric(params["n"])
    if family == "null":
        return build_null(params["n"])
    if family == "mamu":
        return build_matrix_algebra(params["n"])
    if family == "sl2":
        return build_sl2_hab()
    if family == "sl":
        return build_sl(params["n"])
    raise ValueError(f"unknown family {family!r}")


def family_tensor(family: str, params: dict, k: int) -> Tensor:
    if family == "mamu":
        return build_mamu([params["n"]] * (k + 1))
    return structure_tensor(family_algebra(family, params), k)


def best_certificate(family: str, params: dict, k: int) -> Certificate:
    """The largest library certificate available for T^(k) of a family."""
    if k == 1:
        T = family_tensor(family, params, 1)
        return identity_certificate(T, tag=f"{family}-identity")
    if family == "trd":
        return cert_trd(k, params["d"])
    if family == "tri":
        return cert_triangular(k, params["n"])
    if family == "cw":
        n = params["n"]
        if k == 2:
            if n >= 3:
                return cert_cw_k2(n)
            if n == 2:
                return cert_cw_k2_small(n)
            c = cert_trd(2, 3)  # Q_1 and R_3 have identical structure constants
            return Certificate("cw", {"k": 2, "n": 1}, c.mode_maps, c.claimed_unit)
        if k == 3 and n >= 2:
            return cert_cw_k3(n)
        return cert_idempotent(family_algebra(family, params), k, "cw")
    if family == "null":
        n = params["n"]
        if k == 2 and n >= 2:
            return cert_null_k2(n)
        return cert_idempotent(family_algebra(family, params), k, "null")
    if family == "mamu":
        if k >= 3:
            return cert_mamu(k, params["n"])
        raise ValueError("no matrix multiplication certificate in the library for k = 2")
    if family == "sl2":
        return cert_sl2(k)
    if family == "sl":
        if k == 2:
            return cert_sl_block(params["n"])
        raise ValueError("sl_n certificates exist only for k = 2")
    raise ValueError(f"unknown family {family!r}")


def monotonicity_ledger(family: str, params: dict, k_range):
    """Verified certificate sizes q_k for k in ``k_range``; checks q_k >= q_{k+1}."""
    rows = []
    for k in k_range:
        cert = best_certificate(family, params, k)
        r = verify_unit_certificate(family_tensor(family, params, k), cert)
        rows.append((k, r))
    for (k1, a), (k2, b) in zip(rows, rows[1:]):
        if b > a:
            raise MonotonicityViolation(f"{family} {params}: q_{k1} = {a} < q_{k2} = {b}")
    return rows
