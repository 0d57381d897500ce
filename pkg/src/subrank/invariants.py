"""Polynomial SL-invariants of small tensor formats and ternary cubics.

The generic finder enumerates torus-weight-zero monomials in the entry
variables and solves for the common kernel of the simple raising
derivations.  The named evaluators are built on top of it:

* 3x3x3: ``f6_333`` (finder, degree 6) and ``f12_333`` (Aronhold invariant
  of the cubic det(x0 T_0 + x1 T_1 + x2 T_2)).
* 2x2x2x2: ``f2_2222`` (finder), ``f4_2222`` / ``f4p_2222`` (flattening
  determinants), ``f6_2222`` (biquadratic construction), and the
  hyperdeterminant by Schlafli's discriminant-of-a-pencil method.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm

from .exactnum import MPoly
from .linalg import det, nullspace, sparse_nullspace
from .tensor_core import Shape, Tensor, build_unit


class BudgetExceeded(RuntimeError):
    pass


class NotWeightAdmissible(ValueError):
    pass


class NoSeparator(ValueError):
    pass


class AmbiguousSeparator(ValueError):
    pass


class WitnessVanishes(ValueError):
    pass


MONOMIAL_BUDGET = 200_000
TERNARY_CUBIC = "ternary_cubic"
CUBIC_MONOMIALS = tuple(sorted(((a, b, 3 - a - b) for a in range(4) for b in range(4 - a)),
                               reverse=True))


# ---------------------------------------------------------------------------
# generic finder

@dataclass(frozen=True)
class _Format:
    nvars: int
    weights: tuple          # per variable: tuple over modes of index-count vectors
    targets: tuple          # per mode: required count of every index value
    derivations: tuple      # each a dict var -> (var', coefficient)


def _tensor_format(dims, degree):
    for n in dims:
        if degree % n:
            raise NotWeightAdmissible(f"degree {degree} is not divisible by mode dimension {n}")
    variables = list(itertools.product(*[range(n) for n in dims]))
    pos = {I: t for t, I in enumerate(variables)}
    weights = []
    for I in variables:
        w = []
        for j, n in enumerate(dims):
            v = [0] * n
            v[I[j]] = 1
            w.append(tuple(v))
        weights.append(tuple(w))
    derivations = []
    for j, n in enumerate(dims):
        for a in range(n - 1):
            # E_{a, a+1} on mode j: t_I -> t_{I[j -> a+1]} for I_j = a
            der = {}
            for I in variables:
                if I[j] == a:
                    J = I[:j] + (a + 1,) + I[j + 1:]
                    der[pos[I]] = (pos[J], 1)
            derivations.append(der)
    targets = tuple(degree // n for n in dims)
    return _Format(len(variables), tuple(weights), targets, tuple(derivations))


def _cubic_format(degree):
    pos = {m: t for t, m in enumerate(CUBIC_MONOMIALS)}
    weights = tuple((m,) for m in CUBIC_MONOMIALS)
    derivations = []
    for p in range(2):
        q = p + 1
        # x_p d/dx_q on forms, acting on coefficient functions
        der = {}
        for m in CUBIC_MONOMIALS:
            src = list(m)
            src[q] += 1
            src[p] -= 1
            if src[p] < 0:
                continue
            der[pos[m]] = (pos[tuple(src)], m[q] + 1)
        derivations.append(der)
    return _Format(len(CUBIC_MONOMIALS), weights, (degree,), tuple(derivations))


def weight_zero_monomials(fmt: _Format, degree: int, budget: int = MONOMIAL_BUDGET):
    """All degree-``degree`` monomials (sorted variable tuples) of torus weight zero."""
    nmodes = len(fmt.targets)
    out = []
    counts = [[0] * len(fmt.weights[0][j]) for j in range(nmodes)]

    def fits(v):
        for j in range(nmodes):
            for a, x in enumerate(fmt.weights[v][j]):
                if x and counts[j][a] + x > fmt.targets[j]:
                    return False
        return True

    def add(v, sign):
        for j in range(nmodes):
            for a, x in enumerate(fmt.weights[v][j]):
                if x:
                    counts[j][a] += sign * x

    stack = []

    def rec(start, left):
        if left == 0:
            out.append(tuple(stack))
            if len(out) > budget:
                raise BudgetExceeded(f"more than {budget} weight-zero monomials")
            return
        for v in range(start, fmt.nvars):
            if fits(v):
                add(v, 1)
                stack.append(v)
                rec(v, left - 1)
                stack.pop()
                add(v, -1)

    rec(0, degree)
    return out


def _apply_derivation(der, mono):
    """Image of a monomial under a derivation: {monomial: coefficient}."""
    out = {}
    for v in set(mono):
        hit = der.get(v)
        if hit is None:
            continue
        w, c = hit
        mult = mono.count(v)
        lst = list(mono)
        lst.remove(v)
        lst.append(w)
        key = tuple(sorted(lst))
        out[key] = out.get(key, 0) + c * mult
    return out


def _normalize_integer(vec: dict):
    """Scale to coprime integers with the leading (lexicographically first) entry positive."""
    m = 1
    for x in vec.values():
        m = lcm(m, Fraction(x).denominator)
    ints = {k: int(Fraction(x) * m) for k, x in vec.items() if x}
    g = 0
    for x in ints.values():
        g = gcd(g, x)
    lead = ints[min(ints)]
    s = g if lead > 0 else -g
    return {k: Fraction(x // s) for k, x in ints.items()}


def _mono_to_exponents(mono, nvars):
    e = [0] * nvars
    for v in mono:
        e[v] += 1
    return tuple(e)


@dataclass
class InvariantBasis:
    shape: object
    degree: int
    basis: list

    @property
    def dim(self):
        return len(self.basis)


@lru_cache(maxsize=None)
def _invariant_space(shape_key, degree: int):
    if shape_key == TERNARY_CUBIC:
        fmt = _cubic_format(degree)
    else:
        fmt = _tensor_format(shape_key, degree)
    monos = weight_zero_monomials(fmt, degree)
    col = {m: i for i, m in enumerate(monos)}
    rows: dict = {}
    for d_i, der in enumerate(fmt.derivations):
        for m, i in col.items():
            for target, c in _apply_derivation(der, m).items():
                row = rows.setdefault((d_i, target), {})
                row[i] = row.get(i, 0) + c
    kernel = sparse_nullspace(list(rows.values()), len(monos))
    basis = []
    for vec in kernel:
        # monomials keyed by descending exponent vectors; min() then picks the leading one
        keyed = {tuple(-x for x in _mono_to_exponents(monos[i], fmt.nvars)): c for i, c in vec.items()}
        norm = _normalize_integer(keyed)
        basis.append(MPoly(fmt.nvars, {tuple(-x for x in e): c for e, c in norm.items()}))
    return InvariantBasis(shape_key, degree, basis)


def invariant_space(shape, degree: int) -> InvariantBasis:
    """Exact basis of the degree-``degree`` SL-invariants of a format.

    ``shape`` is a tuple of mode dimensions (entry variables in row-major
    order) or the string ``"ternary_cubic"`` (variables ordered as
    ``CUBIC_MONOMIALS``).
    """
    if degree < 1:
        raise NotWeightAdmissible("degree must be positive")
    if isinstance(shape, Shape):
        shape = shape.dims
    key = shape if shape == TERNARY_CUBIC else tuple(int(n) for n in shape)
    return _invariant_space(key, degree)


def raising_derivations(shape):
    """The derivations used by the finder (exposed for property tests)."""
    if shape == TERNARY_CUBIC:
        return _cubic_format(3).derivations
    return _tensor_format(tuple(shape), 0).derivations


def tensor_point(T: Tensor):
    """Entries of ``T`` in the finder's variable order (row-major)."""
    return [T[I] for I in itertools.product(*[range(n) for n in T.dims])]


def _check_shape(T: Tensor, dims):
    if T.dims != tuple(dims):
        raise ValueError(f"expected shape {tuple(dims)}, got {T.dims}")


# ---------------------------------------------------------------------------
# 3x3x3

def u3_3():
    return build_unit(3, 3)


@lru_cache(maxsize=None)
def _f6_333_poly():
    basis = invariant_space((3, 3, 3), 6).basis
    if len(basis) != 1:
        raise AssertionError("degree-6 invariants of 3x3x3 should form a line")
    p = basis[0]
    return p.scale(1 / p(tensor_point(u3_3())))


def f6_333(T: Tensor) -> Fraction:
    _check_shape(T, (3, 3, 3))
    return _f6_333_poly()(tensor_point(T))


@dataclass(frozen=True)
class TernaryCubic:
    """sum of c[(a, b, c)] x^a y^b z^c over a + b + c = 3."""

    coeffs: tuple   # aligned with CUBIC_MONOMIALS

    @classmethod
    def from_dict(cls, d):
        for m in d:
            if m not in CUBIC_MONOMIALS:
                raise ValueError(f"{m} is not a cubic monomial")
        return cls(tuple(Fraction(d.get(m, 0)) for m in CUBIC_MONOMIALS))

    def as_dict(self):
        return {m: c for m, c in zip(CUBIC_MONOMIALS, self.coeffs) if c}

    def is_zero(self):
        return not any(self.coeffs)

    def __call__(self, x, y, z):
        return sum((c * Fraction(x) ** a * Fraction(y) ** b * Fraction(z) ** e
                    for (a, b, e), c in zip(CUBIC_MONOMIALS, self.coeffs)), Fraction(0))


def _det3(m):
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


def phi_cubic(T: Tensor) -> TernaryCubic:
    """det(x T[0,:,:] + y T[1,:,:] + z T[2,:,:]) as a ternary cubic."""
    _check_shape(T, (3, 3, 3))
    xs = [MPoly.var(3, i) for i in range(3)]
    M = [[sum((xs[i] * T[i, a, b] for i in range(3) if T[i, a, b]), MPoly(3)) for b in range(3)]
         for a in range(3)]
    return TernaryCubic.from_dict(_det3(M).terms)


@lru_cache(maxsize=None)
def _aronhold_poly():
    basis = invariant_space(TERNARY_CUBIC, 4).basis
    if len(basis) != 1:
        raise AssertionError("degree-4 invariants of ternary cubics should form a line")
    p = basis[0]
    if p(list(TernaryCubic.from_dict({(1, 1, 1): 1}).coeffs)) < 0:
        p = -p
    return p


def aronhold(c: TernaryCubic) -> Fraction:
    """Degree-4 invariant of ternary cubics (integer coprime normalization, positive at xyz)."""
    return _aronhold_poly()(list(c.coeffs))


def f12_333(T: Tensor) -> Fraction:
    return aronhold(phi_cubic(T)) / aronhold(phi_cubic(u3_3()))


# ---------------------------------------------------------------------------
# 2x2x2x2

def u4_2():
    return build_unit(4, 2)


@lru_cache(maxsize=None)
def _f2_poly():
    basis = invariant_space((2, 2, 2, 2), 2).basis
    if len(basis) != 1:
        raise AssertionError("degree-2 invariants of 2x2x2x2 should form a line")
    p = basis[0]
    return p.scale(1 / p(tensor_point(u4_2())))


def f2_2222(T: Tensor) -> Fraction:
    _check_shape(T, (2, 2, 2, 2))
    return _f2_poly()(tensor_point(T))


def _flattening_det(T, rows):
    cols = [m for m in range(4) if m not in rows]
    M = [[Fraction(0)] * 4 for _ in range(4)]
    for I, c in T.entries.items():
        M[2 * I[rows[0]] + I[rows[1]]][2 * I[cols[0]] + I[cols[1]]] = c
    return det(M)


def f4_2222(T: Tensor) -> Fraction:
    """Determinant of the flattening grouping modes {0, 1} against {2, 3}."""
    _check_shape(T, (2, 2, 2, 2))
    return _flattening_det(T, (0, 1))


def f4p_2222(T: Tensor) -> Fraction:
    """Determinant of the flattening grouping modes {0, 2} against {1, 3}."""
    _check_shape(T, (2, 2, 2, 2))
    return _flattening_det(T, (0, 2))


# The two modes contracted with alpha and beta; the remaining two modes
# carry the 2x2 matrix whose determinant is taken.  With this pairing the
# invariant vanishes on the 2x2 matrix-multiplication restrictions; the
# pairings (0, 1) and (0, 3) do not.
F6_PAIRING = (0, 2)


def f6_2222(T: Tensor, pairing=None) -> Fraction:
    """det of the 3x3 coefficient matrix of the biquadratic det T(alpha, beta, ., .).

    Rows are indexed by alpha0^2, alpha0 alpha1, alpha1^2 and columns likewise
    by beta.
    """
    _check_shape(T, (2, 2, 2, 2))
    a_mode, b_mode = pairing or F6_PAIRING
    rest = [m for m in range(4) if m not in (a_mode, b_mode)]
    # M[a][b] = sum T[alpha=i, beta=j, row=a, col=b] alpha_i beta_j
    slot = {}
    for I, c in T.entries.items():
        key = (I[rest[0]], I[rest[1]])
        slot.setdefault(key, {})[(I[a_mode], I[b_mode])] = c

    def entry(a, b):
        return slot.get((a, b), {})

    def mul(p, q):
        out = {}
        for (i1, j1), c1 in p.items():
            for (i2, j2), c2 in q.items():
                key = (i1 + i2, j1 + j2)   # degrees of alpha1 and beta1
                out[key] = out.get(key, 0) + c1 * c2
        return out

    d = mul(entry(0, 0), entry(1, 1))
    for key, c in mul(entry(0, 1), entry(1, 0)).items():
        d[key] = d.get(key, 0) - c
    C = [[Fraction(d.get((i, j), 0)) for j in range(3)] for i in range(3)]
    return det(C)


def cayley_222(T) -> object:
    """Cayley's hyperdeterminant of a 2x2x2 array.

    Accepts a Tensor, or a dict {(i, j, k): value} whose values lie in any
    commutative ring (used with MPoly for the Schlafli construction).
    """
    if isinstance(T, Tensor):
        _check_shape(T, (2, 2, 2))
        a = {I: T[I] for I in itertools.product(range(2), repeat=3)}
    else:
        a = T
    g = lambda s: a.get(tuple(int(ch) for ch in s), 0)
    a000, a001, a010, a011 = g("000"), g("001"), g("010"), g("011")
    a100, a101, a110, a111 = g("100"), g("101"), g("110"), g("111")
    return (a000 * a000 * a111 * a111 + a001 * a001 * a110 * a110
            + a010 * a010 * a101 * a101 + a100 * a100 * a011 * a011
            - 2 * (a000 * a001 * a110 * a111 + a000 * a010 * a101 * a111
                   + a000 * a100 * a011 * a111 + a001 * a010 * a101 * a110
                   + a001 * a100 * a011 * a110 + a010 * a100 * a011 * a101)
            + 4 * (a000 * a011 * a101 * a110 + a001 * a010 * a100 * a111))


def quartic_discriminant(q) -> Fraction:
    """Discriminant of a x^4 + b x^3 y + c x^2 y^2 + d x y^3 + e y^4, q = (a, b, c, d, e)."""
    a, b, c, d, e = (Fraction(x) for x in q)
    return (256 * a**3 * e**3 - 192 * a**2 * b * d * e**2 - 128 * a**2 * c**2 * e**2
            + 144 * a**2 * c * d**2 * e - 27 * a**2 * d**4 + 144 * a * b**2 * c * e**2
            - 6 * a * b**2 * d**2 * e - 80 * a * b * c**2 * d * e + 18 * a * b * c * d**3
            + 16 * a * c**4 * e - 4 * a * c**3 * d**2 - 27 * b**4 * e**2
            + 18 * b**3 * c * d * e - 4 * b**3 * d**3 - 4 * b**2 * c**3 * e + b**2 * c**2 * d**2)


def hyperdet_2222(T: Tensor, mode: int = 0) -> Fraction:
    """Discriminant of the binary quartic x -> cayley_222(T contracted with x on ``mode``)."""
    _check_shape(T, (2, 2, 2, 2))
    x = [MPoly.var(2, 0), MPoly.var(2, 1)]
    pencil = {}
    for I, c in T.entries.items():
        key = I[:mode] + I[mode + 1:]
        pencil[key] = pencil.get(key, MPoly(2)) + x[I[mode]] * c
    quartic = cayley_222(pencil)
    if not isinstance(quartic, MPoly):
        quartic = MPoly.constant(2, quartic)
    coeffs = [quartic.terms.get((4 - i, i), Fraction(0)) for i in range(5)]
    return quartic_discriminant(coeffs)


# ---------------------------------------------------------------------------
# separating combinations

def separating_combination(evaluators, samples, witness):
    """Unique (up to scale) linear combination of ``evaluators`` vanishing on ``samples``.

    Returns Fractions scaled so the first nonzero coefficient is 1.
    """
    evaluators = list(evaluators)
    samples = list(samples)
    if not evaluators:
        raise ValueError("need at least one evaluator")
    if len(samples) < 2 * len(evaluators):
        raise ValueError("need at least twice as many samples as evaluators")
    M = [[Fraction(f(S)) for f in evaluators] for S in samples]
    kernel = nullspace(M, len(evaluators))
    if not kernel:
        raise NoSeparator("no nonzero combination vanishes on all samples")
    if len(kernel) > 1:
        raise AmbiguousSeparator(f"kernel has dimension {len(kernel)}")
    v = kernel[0]
    lead = next(x for x in v if x)
    v = [x / lead for x in v]
    value = sum((c * Fraction(f(witness)) for c, f in zip(v, evaluators)), Fraction(0))
    if value == 0:
        raise WitnessVanishes("the separating combination vanishes on the witness")
    return v
