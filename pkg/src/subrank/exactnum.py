"""Exact coefficient arithmetic.

Three coefficient types are used throughout the package:

* ``Rat`` -- plain :class:`fractions.Fraction`.
* :class:`EpsRational` -- a reduced quotient of two polynomials in a formal
  parameter ``eps``, with a monic denominator.  Supports the valuation at
  ``eps = 0`` and the limit ``eps -> 0``.
* :class:`MPoly` -- a sparse multivariate polynomial with rational
  coefficients, indexed by exponent tuples.

No floating point is used in this module.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

Rat = Fraction

INF = math.inf


class PoleAtZero(ArithmeticError):
    """Raised when a limit at eps = 0 does not exist (negative valuation)."""


def as_rat(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


# ---------------------------------------------------------------------------
# dense univariate polynomials: tuples of Fractions, index = degree

def _trim(c: Sequence[Fraction]) -> tuple:
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _padd(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, x in enumerate(b):
        out[i] += x
    return _trim(out)


def _psub(a, b):
    out = list(a) + [Fraction(0)] * max(0, len(b) - len(a))
    for i, x in enumerate(b):
        out[i] -= x
    return _trim(out)


def _pmul(a, b):
    if not a or not b:
        return ()
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            if y:
                out[i + j] += x * y
    return _trim(out)


def _pscale(a, s):
    if s == 0:
        return ()
    return tuple(x * s for x in a)


def _pdivmod(a, b):
    """Euclidean division a = q*b + r over the rationals."""
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(a)
    db = len(b) - 1
    lead = b[-1]
    if len(r) - 1 < db:
        return (), _trim(r)
    q = [Fraction(0)] * (len(r) - db)
    for shift in range(len(r) - 1 - db, -1, -1):
        c = r[shift + db] / lead
        q[shift] = c
        if c:
            for j, y in enumerate(b):
                r[shift + j] -= c * y
    return _trim(q), _trim(r[:db])


def _pgcd(a, b):
    while b:
        _, r = _pdivmod(a, b)
        a, b = b, r
    if not a:
        return ()
    return _pscale(a, 1 / a[-1])


def _low_degree(a) -> int:
    for i, x in enumerate(a):
        if x:
            return i
    raise ValueError("zero polynomial has no low degree")


def _is_monomial(a) -> bool:
    return sum(1 for x in a if x) == 1


class EpsRational:
    """A reduced fraction ``num(eps) / den(eps)`` with monic denominator.

    >>> e = EpsRational.monomial(1, 1)
    >>> ((e * e + e) / e).eps_limit()
    Fraction(1, 1)
    >>> EpsRational.monomial(1, -1).valuation()
    -1
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: Iterable = (), den: Iterable = (1,), *, _reduced=False):
        num = _trim([as_rat(x) for x in num])
        den = _trim([as_rat(x) for x in den])
        if not den:
            raise ZeroDivisionError("EpsRational with zero denominator")
        if not _reduced:
            num, den = self._reduce(num, den)
        self.num = num
        self.den = den
        self._hash = None

    @staticmethod
    def _reduce(num, den):
        if not num:
            return (), (Fraction(1),)
        if _is_monomial(den):
            # only powers of eps can cancel
            m = len(den) - 1
            lead = den[-1]
            v = _low_degree(num)
            c = min(v, m)
            num = num[c:]
            den = (Fraction(0),) * (m - c) + (Fraction(1),)
            if lead != 1:
                num = _pscale(num, 1 / lead)
            return num, den
        g = _pgcd(num, den)
        if len(g) > 1:
            num, _ = _pdivmod(num, g)
            den, _ = _pdivmod(den, g)
        lead = den[-1]
        if lead != 1:
            num = _pscale(num, 1 / lead)
            den = _pscale(den, 1 / lead)
        return num, den

    # constructors -----------------------------------------------------
    @classmethod
    def const(cls, c) -> "EpsRational":
        c = as_rat(c)
        return cls((c,) if c else (), (Fraction(1),), _reduced=True)

    @classmethod
    def monomial(cls, c, e: int) -> "EpsRational":
        """``c * eps**e``; ``e`` may be negative."""
        c = as_rat(c)
        if c == 0:
            return cls.const(0)
        if e >= 0:
            return cls((Fraction(0),) * e + (c,), (Fraction(1),), _reduced=True)
        return cls((c,), (Fraction(0),) * (-e) + (Fraction(1),), _reduced=True)

    @classmethod
    def coerce(cls, x) -> "EpsRational":
        if isinstance(x, EpsRational):
            return x
        return cls.const(x)

    # arithmetic -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.num

    def __bool__(self):
        return bool(self.num)

    def __add__(self, other):
        o = EpsRational.coerce(other)
        if self.den == o.den:
            return EpsRational(_padd(self.num, o.num), self.den)
        return EpsRational(_padd(_pmul(self.num, o.den), _pmul(o.num, self.den)),
                           _pmul(self.den, o.den))

    __radd__ = __add__

    def __neg__(self):
        return EpsRational(tuple(-x for x in self.num), self.den, _reduced=True)

    def __sub__(self, other):
        return self + (-EpsRational.coerce(other))

    def __rsub__(self, other):
        return EpsRational.coerce(other) - self

    def __mul__(self, other):
        o = EpsRational.coerce(other)
        if not self.num or not o.num:
            return EpsRational.const(0)
        return EpsRational(_pmul(self.num, o.num), _pmul(self.den, o.den))

    __rmul__ = __mul__

    def inverse(self):
        if not self.num:
            raise ZeroDivisionError("inverse of zero EpsRational")
        return EpsRational(self.den, self.num)

    def __truediv__(self, other):
        return self * EpsRational.coerce(other).inverse()

    def __rtruediv__(self, other):
        return EpsRational.coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = EpsRational.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = EpsRational.const(other)
        if not isinstance(other, EpsRational):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    # analysis ---------------------------------------------------------
    def valuation(self):
        if not self.num:
            return INF
        return _low_degree(self.num) - _low_degree(self.den)

    def eps_limit(self) -> Fraction:
        v = self.valuation()
        if v == INF or v > 0:
            return Fraction(0)
        if v < 0:
            raise PoleAtZero(f"{self} has a pole of order {-v} at eps = 0")
        return self.num[_low_degree(self.num)] / self.den[_low_degree(self.den)]

    def evaluate(self, x) -> Fraction:
        x = as_rat(x)
        d = _horner(self.den, x)
        if d == 0:
            raise ZeroDivisionError("denominator vanishes at the evaluation point")
        return _horner(self.num, x) / d

    def __repr__(self):
        n = _pstr(self.num)
        if self.den == (1,):
            return f"EpsRational({n})"
        return f"EpsRational(({n}) / ({_pstr(self.den)}))"


def _horner(p, x):
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _pstr(p):
    if not p:
        return "0"
    parts = []
    for i, c in enumerate(p):
        if c:
            parts.append(f"{c}" if i == 0 else f"{c}*eps^{i}")
    return " + ".join(parts)


def valuation(f: EpsRational):
    """Order of vanishing of ``f`` at eps = 0 (``math.inf`` for zero)."""
    return EpsRational.coerce(f).valuation()


def eps_limit(f) -> Fraction:
    """Limit of ``f`` as eps -> 0; raises :class:`PoleAtZero` on a pole."""
    return EpsRational.coerce(f).eps_limit()


# ---------------------------------------------------------------------------
# sparse multivariate polynomials

class MPoly:
    """Sparse polynomial in ``nvars`` variables with rational coefficients.

    ``terms`` maps exponent tuples (length ``nvars``) to nonzero Fractions.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms=None):
        self.nvars = nvars
        clean = {}
        if terms:
            for e, c in terms.items():
                e = tuple(e)
                if len(e) != nvars:
                    raise ValueError("exponent vector length does not match nvars")
                c = as_rat(c)
                if c:
                    clean[e] = clean.get(e, 0) + c
            clean = {e: c for e, c in clean.items() if c}
        self.terms = clean

    @classmethod
    def var(cls, nvars: int, i: int) -> "MPoly":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1})

    @classmethod
    def constant(cls, nvars: int, c) -> "MPoly":
        return cls(nvars, {(0,) * nvars: c})

    def _check(self, other):
        if isinstance(other, (int, Fraction)):
            return MPoly.constant(self.nvars, other)
        if other.nvars != self.nvars:
            raise ValueError("variable count mismatch")
        return other

    def __add__(self, other):
        other = self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        p = MPoly(self.nvars)
        p.terms = out
        return p

    __radd__ = __add__

    def __neg__(self):
        p = MPoly(self.nvars)
        p.terms = {e: -c for e, c in self.terms.items()}
        return p

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        p = MPoly(self.nvars)
        p.terms = {e: c for e, c in out.items() if c}
        return p

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = MPoly.constant(self.nvars, 1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MPoly.constant(self.nvars, other)
        if not isinstance(other, MPoly):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def is_zero(self):
        return not self.terms

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def scale(self, c) -> "MPoly":
        c = as_rat(c)
        p = MPoly(self.nvars)
        p.terms = {e: v * c for e, v in self.terms.items()} if c else {}
        return p

    def __call__(self, point):
        return mpoly_eval(self, point)

    def __repr__(self):
        return f"MPoly(nvars={self.nvars}, {len(self.terms)} terms)"


def mpoly_eval(p: MPoly, point: Sequence) -> Fraction:
    """Exact evaluation of ``p`` at ``point``.

    >>> x_times_y = MPoly(2, {(1, 1): 1})
    >>> mpoly_eval(x_times_y, [2, 3])
    Fraction(6, 1)
    """
    if len(point) != p.nvars:
        raise ValueError(f"point has length {len(point)}, polynomial has {p.nvars} variables")
    pt = [as_rat(x) for x in point]
    total = Fraction(0)
    for e, c in p.terms.items():
        term = c
        for x, k in zip(pt, e):
            if k:
                if x == 0:
                    term = 0
                    break
                term *= x ** k
        total += term
    return total
