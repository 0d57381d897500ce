"""Finite-dimensional algebras given by structure constants.

Basis conventions (all indices 0-based):

* ``R_d = Q[x]/(x^d)``: 1, x, ..., x^(d-1)
* ``N_n``: 1, x_1, ..., x_n with all products of the x_i zero
* ``Q_n``: 1, x_1, ..., x_n, y with x_i^2 = y and every other product of
  generators zero
* ``T_n`` (upper triangular matrices): e_ij for i <= j, row-major
* ``Mat_n``: e_ij row-major
* ``sl_n``: h_1..h_{n-1} (h_i = e_ii - e_{i+1,i+1}), then e_ij for i != j
  row-major
* ``sl_2`` in the (h, a, b) basis: h, a = e_12 + e_21, b = e_12 - e_21
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .exactnum import EpsRational, as_rat
from .linalg import inverse
from .tensor_core import Tensor


class NotLocalForm(ValueError):
    """The basis is not of the form {1} ∪ (basis of the maximal ideal)."""


@dataclass
class Algebra:
    """Structure constants ``products[(i, j)] = {h: c}`` meaning e_i e_j = sum c e_h.

    ``unit`` holds the coordinates of the identity element when the algebra
    is unital; ``unit_index`` is set when that element is a basis vector.
    Flags are validated on construction.
    """

    dim: int
    products: dict
    basis_labels: list
    unit: tuple | None = None
    associative: bool = False
    commutative: bool = False
    lie: bool = False
    name: str = ""
    coefficient_one: object = field(default=Fraction(1), repr=False)

    def __post_init__(self):
        clean = {}
        for (i, j), row in self.products.items():
            row = {h: c for h, c in row.items() if c}
            if row:
                clean[(i, j)] = row
        self.products = clean
        rep = validate(self)
        if not rep.ok:
            raise ValueError(f"{self.name or 'algebra'}: {rep.message}")

    @property
    def unit_index(self):
        if self.unit is None:
            return None
        nz = [i for i, c in enumerate(self.unit) if c]
        if len(nz) == 1 and self.unit[nz[0]] == 1:
            return nz[0]
        return None

    def constant(self, i, j, h):
        return self.products.get((i, j), {}).get(h, 0)

    def constants(self):
        """Dense ``c[i][j][h]`` view."""
        n = self.dim
        return [[[self.constant(i, j, h) for h in range(n)] for j in range(n)] for i in range(n)]

    def mul_vec(self, u, v):
        """Product of two coordinate vectors."""
        out = [0 * self.coefficient_one] * self.dim
        for (i, j), row in self.products.items():
            a = u[i]
            if not a:
                continue
            b = v[j]
            if not b:
                continue
            for h, c in row.items():
                out[h] = out[h] + a * b * c
        return out


# the family variant shares the class; constants are EpsRational
AlgebraFamily = Algebra


@dataclass
class ValidationReport:
    ok: bool
    message: str = ""
    triple: tuple | None = None


def _basis(n, i, one):
    v = [0 * one] * n
    v[i] = one
    return v


def validate(A: Algebra) -> ValidationReport:
    """Check the unit, associativity, commutativity and Lie axioms per flags."""
    n = A.dim
    one = A.coefficient_one
    zero = 0 * one
    for (i, j), row in A.products.items():
        if not (0 <= i < n and 0 <= j < n) or any(not (0 <= h < n) for h in row):
            return ValidationReport(False, f"index out of range in product ({i},{j})", (i, j))
    E = [_basis(n, i, one) for i in range(n)]
    if A.unit is not None:
        for i in range(n):
            if A.mul_vec(A.unit, E[i]) != E[i] or A.mul_vec(E[i], A.unit) != E[i]:
                return ValidationReport(False, f"unit fails on basis element {i}", (i,))
    if A.commutative or A.lie:
        sign = -1 if A.lie else 1
        for i in range(n):
            for j in range(n):
                a = A.products.get((i, j), {})
                b = A.products.get((j, i), {})
                for h in set(a) | set(b):
                    if a.get(h, zero) != sign * b.get(h, zero):
                        what = "antisymmetry" if A.lie else "commutativity"
                        return ValidationReport(False, f"{what} fails on ({i},{j})", (i, j))
    if A.associative:
        for i, j, h in itertools.product(range(n), repeat=3):
            left = _sparse_mul(A, A.products.get((i, j), {}), {h: one})
            right = _sparse_mul(A, {i: one}, A.products.get((j, h), {}))
            if left != right:
                return ValidationReport(False, f"associativity fails on ({i},{j},{h})", (i, j, h))
    if A.lie:
        for i, j, h in itertools.combinations(range(n), 3):
            total: dict = {}
            for a, b, c in ((i, j, h), (j, h, i), (h, i, j)):
                for t, v in _sparse_mul(A, {a: one}, A.products.get((b, c), {})).items():
                    total[t] = total.get(t, zero) + v
            if any(total.values()):
                return ValidationReport(False, f"Jacobi identity fails on ({i},{j},{h})", (i, j, h))
    return ValidationReport(True, "ok")


def _sparse_mul(A, u: dict, v: dict) -> dict:
    out: dict = {}
    for i, a in u.items():
        for j, b in v.items():
            for h, c in A.products.get((i, j), {}).items():
                out[h] = out.get(h, 0) + a * b * c
    return {h: c for h, c in out.items() if c}


# ---------------------------------------------------------------------------
# k-fold structure tensors

def structure_tensor(A: Algebra, k: int) -> Tensor:
    """Order-(k+1) tensor of the left-nested k-fold product, output in mode 0.

    T(a_1, ..., a_k) = T(a_1 a_2, a_3, ..., a_k).
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    n = A.dim
    one = A.coefficient_one
    T = {(h, h): one for h in range(n)}
    preimage = {}
    for (i, j), row in A.products.items():
        for h, c in row.items():
            preimage.setdefault(h, []).append((i, j, c))
    for _ in range(k - 1):
        out: dict = {}
        for idx, v in T.items():
            h, m, rest = idx[0], idx[1], idx[2:]
            for i, j, c in preimage.get(m, ()):
                key = (h, i, j) + rest
                prev = out.get(key)
                out[key] = v * c if prev is None else prev + v * c
        T = {key: v for key, v in out.items() if v}
    return Tensor((n,) * (k + 1), T, check=False)


# ---------------------------------------------------------------------------
# builders

def _algebra(dim, table, labels, **kw):
    prods = {}
    for (i, j), row in table.items():
        prods[(i, j)] = {h: as_rat(c) for h, c in row.items()}
    return Algebra(dim, prods, labels, **kw)


def _unit_vec(n, i=0):
    return tuple(Fraction(1) if t == i else Fraction(0) for t in range(n))


def build_truncated_poly(d: int) -> Algebra:
    """R_d = Q[x]/(x^d)."""
    if d < 1:
        raise ValueError("d must be positive")
    table = {(i, j): {i + j: 1} for i in range(d) for j in range(d) if i + j < d}
    labels = ["1"] + [f"x^{i}" if i > 1 else "x" for i in range(1, d)]
    return _algebra(d, table, labels, unit=_unit_vec(d), associative=True,
                    commutative=True, name=f"R{d}")


def build_null(n: int) -> Algebra:
    """N_n: the square-zero extension of Q by n generators."""
    dim = n + 1
    table = {(0, 0): {0: 1}}
    for i in range(1, dim):
        table[(0, i)] = {i: 1}
        table[(i, 0)] = {i: 1}
    labels = ["1"] + [f"x{i}" for i in range(1, dim)]
    return _algebra(dim, table, labels, unit=_unit_vec(dim), associative=True,
                    commutative=True, name=f"N{n}")


def build_apolar_quadric(n: int) -> Algebra:
    """Q_n: basis 1, x_1..x_n, y with x_i x_i = y."""
    dim = n + 2
    y = n + 1
    table = {}
    for i in range(dim):
        table[(0, i)] = {i: 1}
        table[(i, 0)] = {i: 1}
    for i in range(1, n + 1):
        table[(i, i)] = {y: 1}
    labels = ["1"] + [f"x{i}" for i in range(1, n + 1)] + ["y"]
    return _algebra(dim, table, labels, unit=_unit_vec(dim), associative=True,
                    commutative=True, name=f"Q{n}")


def build_diagonal(d: int) -> Algebra:
    """Q^d with coordinatewise product (basis of orthogonal idempotents)."""
    table = {(i, i): {i: 1} for i in range(d)}
    unit = tuple(Fraction(1) for _ in range(d))
    return _algebra(d, table, [f"e{i}" for i in range(d)], unit=unit, associative=True,
                    commutative=True, name=f"C^{d}")


def _matrix_units(pairs):
    index = {p: t for t, p in enumerate(pairs)}
    table = {}
    for (a, b) in pairs:
        for (c, e) in pairs:
            if b == c and (a, e) in index:
                table[(index[(a, b)], index[(c, e)])] = {index[(a, e)]: 1}
    return index, table


def build_matrix_algebra(n: int) -> Algebra:
    """Mat_n with basis e_ij row-major."""
    pairs = [(i, j) for i in range(n) for j in range(n)]
    index, table = _matrix_units(pairs)
    unit = tuple(Fraction(1) if i == j else Fraction(0) for i, j in pairs)
    return _algebra(len(pairs), table, [f"e{i+1}{j+1}" for i, j in pairs], unit=unit,
                    associative=True, name=f"Mat{n}")


def build_triangular(n: int) -> Algebra:
    """T_n: upper triangular n x n matrices, basis e_ij (i <= j) row-major."""
    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    index, table = _matrix_units(pairs)
    unit = tuple(Fraction(1) if i == j else Fraction(0) for i, j in pairs)
    return _algebra(len(pairs), table, [f"e{i+1}{j+1}" for i, j in pairs], unit=unit,
                    associative=True, name=f"T{n}")


def triangular_index(n: int):
    """Map (i, j), 0-based with i <= j, to the basis position in T_n."""
    return {p: t for t, p in enumerate((i, j) for i in range(n) for j in range(i, n))}


def _sl_basis(n):
    hs = [("h", i) for i in range(n - 1)]
    es = [("e", i, j) for i in range(n) for j in range(n) if i != j]
    return hs + es


def _sl_matrix(n, b):
    m = [[Fraction(0)] * n for _ in range(n)]
    if b[0] == "h":
        i = b[1]
        m[i][i] = Fraction(1)
        m[i + 1][i + 1] = Fraction(-1)
    else:
        m[b[1]][b[2]] = Fraction(1)
    return m


def _sl_coords(n, m, basis_index):
    out = {}
    acc = Fraction(0)
    for i in range(n - 1):
        acc += m[i][i]
        if acc:
            out[basis_index[("h", i)]] = acc
    for i in range(n):
        for j in range(n):
            if i != j and m[i][j]:
                out[basis_index[("e", i, j)]] = m[i][j]
    return out


def build_sl(n: int) -> Algebra:
    """sl_n with the commutator bracket."""
    if n < 2:
        raise ValueError("sl_n needs n >= 2")
    basis = _sl_basis(n)
    bidx = {b: t for t, b in enumerate(basis)}
    mats = [_sl_matrix(n, b) for b in basis]
    table = {}
    for s, X in enumerate(mats):
        for t, Y in enumerate(mats):
            XY = [[sum(X[i][l] * Y[l][j] for l in range(n)) for j in range(n)] for i in range(n)]
            YX = [[sum(Y[i][l] * X[l][j] for l in range(n)) for j in range(n)] for i in range(n)]
            C = [[XY[i][j] - YX[i][j] for j in range(n)] for i in range(n)]
            row = _sl_coords(n, C, bidx)
            if row:
                table[(s, t)] = row
    labels = [f"h{b[1]+1}" if b[0] == "h" else f"e{b[1]+1}{b[2]+1}" for b in basis]
    return _algebra(len(basis), table, labels, lie=True, name=f"sl{n}")


def sl2_hab_change_of_basis():
    """Columns: coordinates of h, a, b in the standard (h, e12, e21) basis."""
    F = Fraction
    return [[F(1), F(0), F(0)],
            [F(0), F(1), F(1)],
            [F(0), F(1), F(-1)]]


def change_basis(A: Algebra, P, labels=None, name=None) -> Algebra:
    """The same algebra written in the basis given by the columns of ``P``."""
    n = A.dim
    one = A.coefficient_one
    zero = 0 * one
    Pinv = inverse([[x for x in row] for row in P], one, zero)
    cols = [[P[r][c] for r in range(n)] for c in range(n)]
    table = {}
    for i in range(n):
        for j in range(n):
            prod = A.mul_vec(cols[i], cols[j])
            new = [sum((Pinv[r][t] * prod[t] for t in range(n)), zero) for r in range(n)]
            row = {h: c for h, c in enumerate(new) if c}
            if row:
                table[(i, j)] = row
    unit = None
    if A.unit is not None:
        unit = tuple(sum((Pinv[r][t] * A.unit[t] for t in range(n)), zero) for r in range(n))
    return Algebra(n, table, labels or [f"b{i}" for i in range(n)], unit=unit,
                   associative=A.associative, commutative=A.commutative, lie=A.lie,
                   name=name or A.name, coefficient_one=one)


def build_sl2_hab() -> Algebra:
    """sl_2 in the basis h, a = e12 + e21, b = e12 - e21."""
    return change_basis(build_sl(2), sl2_hab_change_of_basis(), ["h", "a", "b"], "sl2(hab)")


# ---------------------------------------------------------------------------
# local algebras

def _row_basis(vectors):
    """Reduced row basis of the span of ``vectors``."""
    rows = [list(v) for v in vectors if any(v)]
    if not rows:
        return []
    basis = []
    pivots = []
    for v in rows:
        v = [Fraction(x) for x in v]
        for b, p in zip(basis, pivots):
            if v[p]:
                f = v[p]
                v = [x - f * y for x, y in zip(v, b)]
        nz = next((i for i, x in enumerate(v) if x), None)
        if nz is None:
            continue
        inv = 1 / v[nz]
        v = [x * inv for x in v]
        for t, (b, p) in enumerate(zip(basis, pivots)):
            if b[nz]:
                f = b[nz]
                basis[t] = [x - f * y for x, y in zip(b, v)]
        basis.append(v)
        pivots.append(nz)
    return basis


def maximal_ideal_powers(A: Algebra):
    """Bases of m, m^2, ..., m^s (the last nonzero power)."""
    u = A.unit_index
    if u is None or not A.commutative or not A.associative:
        raise NotLocalForm("need a commutative associative algebra with the unit as a basis vector")
    n = A.dim
    m1 = [_basis(n, i, Fraction(1)) for i in range(n) if i != u]
    for i in range(n):
        for j in range(n):
            if i != u and j != u and A.constant(i, j, u):
                raise NotLocalForm("products of ideal generators leave the ideal")
    powers = [m1]
    for _ in range(n + 1):
        prods = [A.mul_vec(a, b) for a in powers[-1] for b in m1]
        nxt = _row_basis(prods)
        if not nxt:
            return powers
        if len(nxt) == len(powers[-1]):
            raise NotLocalForm("the ideal spanned by non-unit basis vectors is not nilpotent")
        powers.append(nxt)
    raise NotLocalForm("the ideal is not nilpotent")


def socle_degree(A: Algebra):
    """``(s, r)``: s the largest power with m^s != 0 and r = dim m^s.

    >>> socle_degree(build_truncated_poly(5))
    (4, 1)
    """
    powers = maximal_ideal_powers(A)
    return len(powers), len(powers[-1])


# ---------------------------------------------------------------------------
# families over EpsRational

def family_limit(F: Algebra) -> Algebra:
    """Entrywise eps -> 0 limit of a family of structure constants."""
    table = {}
    for key, row in F.products.items():
        new = {h: EpsRational.coerce(c).eps_limit() for h, c in row.items()}
        table[key] = {h: c for h, c in new.items() if c}
    unit = None
    if F.unit is not None:
        unit = tuple(EpsRational.coerce(c).eps_limit() for c in F.unit)
    return Algebra(F.dim, table, list(F.basis_labels), unit=unit, associative=F.associative,
                   commutative=F.commutative, lie=F.lie, name=f"lim {F.name}")


def family_at(F: Algebra, value) -> Algebra:
    """Specialize a family at eps = value."""
    table = {key: {h: EpsRational.coerce(c).evaluate(value) for h, c in row.items()}
             for key, row in F.products.items()}
    unit = None
    if F.unit is not None:
        unit = tuple(EpsRational.coerce(c).evaluate(value) for c in F.unit)
    return Algebra(F.dim, table, list(F.basis_labels), unit=unit, associative=F.associative,
                   commutative=F.commutative, lie=F.lie, name=f"{F.name}@{value}")


def constant_family(A: Algebra) -> Algebra:
    table = {key: {h: EpsRational.const(c) for h, c in row.items()}
             for key, row in A.products.items()}
    unit = None if A.unit is None else tuple(EpsRational.const(c) for c in A.unit)
    return Algebra(A.dim, table, list(A.basis_labels), unit=unit, associative=A.associative,
                   commutative=A.commutative, lie=A.lie, name=A.name,
                   coefficient_one=EpsRational.const(1))


def vandermonde_family(d: int) -> Algebra:
    """Q[x]/prod_{i<d}(x - i*eps) in the basis 1, x, ..., x^(d-1)."""
    one = EpsRational.const(1)
    zero = EpsRational.const(0)
    # modulus coefficients: prod (x - i eps), low degree first
    mod = [one]
    for i in range(d):
        root = EpsRational.monomial(i, 1)
        nxt = [zero] * (len(mod) + 1)
        for t, c in enumerate(mod):
            nxt[t + 1] = nxt[t + 1] + c
            nxt[t] = nxt[t] - root * c
        mod = nxt
    # x^e reduced, for e < 2d - 1
    powers = []
    for e in range(2 * d - 1):
        if e < d:
            v = [zero] * d
            v[e] = one
        else:
            prev = powers[-1]
            shifted = [zero] + prev[:-1]
            top = prev[-1]
            v = [shifted[t] - top * mod[t] for t in range(d)]
        powers.append(v)
    table = {}
    for i in range(d):
        for j in range(d):
            row = {h: c for h, c in enumerate(powers[i + j]) if c}
            if row:
                table[(i, j)] = row
    unit = tuple(one if t == 0 else zero for t in range(d))
    labels = ["1"] + [f"x^{i}" if i > 1 else "x" for i in range(1, d)]
    return Algebra(d, table, labels, unit=unit, associative=True, commutative=True,
                   name=f"V{d}(eps)", coefficient_one=one)
