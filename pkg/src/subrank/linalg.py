"""Small exact linear-algebra kernels shared by the other modules.

Everything works over :class:`fractions.Fraction` unless noted; ``inverse``
accepts any field whose elements support ``+ - * /`` and truthiness
(used with EpsRational).
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm


def integer_rows(rows):
    """Scale each row of a rational matrix to integers (rank-preserving)."""
    out = []
    for row in rows:
        m = 1
        for x in row:
            if isinstance(x, Fraction):
                m = lcm(m, x.denominator)
        out.append([int(x * m) for x in row])
    return out


def rank_bareiss(rows) -> int:
    """Rank by fraction-free (Bareiss) elimination.

    >>> rank_bareiss([[1, 2], [2, 4]])
    1
    """
    a = [r[:] for r in integer_rows(rows) if any(r)]
    if not a:
        return 0
    nrows, ncols = len(a), len(a[0])
    rank = 0
    prev = 1
    col = 0
    while rank < nrows and col < ncols:
        piv = next((i for i in range(rank, nrows) if a[i][col]), None)
        if piv is None:
            col += 1
            continue
        a[rank], a[piv] = a[piv], a[rank]
        p = a[rank][col]
        for i in range(rank + 1, nrows):
            ai = a[i]
            f = ai[col]
            ar = a[rank]
            for j in range(col + 1, ncols):
                ai[j] = (p * ai[j] - f * ar[j]) // prev
            ai[col] = 0
        prev = p
        rank += 1
        col += 1
    return rank


def rank_mod_p(rows, p: int) -> int:
    a = [[x % p for x in r] for r in rows]
    a = [r for r in a if any(r)]
    rank = 0
    ncols = len(a[0]) if a else 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(a)) if a[i][col]), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        inv = pow(a[rank][col], -1, p)
        pr = [(x * inv) % p for x in a[rank]]
        a[rank] = pr
        for i in range(len(a)):
            if i != rank and a[i][col]:
                f = a[i][col]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], pr)]
        rank += 1
        if rank == len(a):
            break
    return rank


def nullspace(rows, ncols: int | None = None):
    """Basis of the right kernel of a rational matrix (reduced echelon form).

    Each basis vector has a 1 in one free column and zeros in the others.
    """
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    a = [[Fraction(x) for x in r] for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(a)) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -a[i][fc]
        basis.append(v)
    return basis


def sparse_nullspace(rows: list[dict], ncols: int):
    """Right kernel of a sparse rational matrix given as ``{col: value}`` rows.

    Incremental Gauss-Jordan elimination: pivot rows are kept fully reduced,
    so a single pass reduces each incoming row.
    """
    pivot_rows: dict[int, dict] = {}   # pivot col -> normalized row
    for row in rows:
        row = {c: Fraction(v) for c, v in row.items() if v}
        for c in [c for c in row if c in pivot_rows]:
            f = row.get(c)
            if not f:
                continue
            for cc, vv in pivot_rows[c].items():
                nv = row.get(cc, 0) - f * vv
                if nv:
                    row[cc] = nv
                else:
                    row.pop(cc, None)
        if not row:
            continue
        pc = min(row)
        inv = 1 / row[pc]
        row = {c: v * inv for c, v in row.items()}
        # eliminate the new pivot from old rows
        for oc, orow in pivot_rows.items():
            if pc in orow:
                f = orow[pc]
                for cc, vv in row.items():
                    nv = orow.get(cc, 0) - f * vv
                    if nv:
                        orow[cc] = nv
                    else:
                        orow.pop(cc, None)
        pivot_rows[pc] = row
    free = [c for c in range(ncols) if c not in pivot_rows]
    basis = []
    for fc in free:
        v = {fc: Fraction(1)}
        for pc, prow in pivot_rows.items():
            x = prow.get(fc)
            if x:
                v[pc] = -x
        basis.append(v)
    return basis


def inverse(m, one, zero):
    """Gauss-Jordan inverse over an arbitrary exact field."""
    n = len(m)
    a = [list(row) + [one if i == j else zero for j in range(n)] for i, row in enumerate(m)]
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c]), None)
        if piv is None:
            raise ZeroDivisionError("matrix is singular")
        a[c], a[piv] = a[piv], a[c]
        inv = one / a[c][c]
        a[c] = [x * inv for x in a[c]]
        for i in range(n):
            if i != c and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return [row[n:] for row in a]


def matmul(a, b, zero=0):
    """Product of two dense matrices given as lists of rows."""
    inner = len(b)
    cols = len(b[0]) if b else 0
    out = []
    for row in a:
        new_row = []
        for j in range(cols):
            acc = zero
            for t in range(inner):
                if row[t] and b[t][j]:
                    acc = acc + row[t] * b[t][j]
            new_row.append(acc)
        out.append(new_row)
    return out


def transpose(m):
    return [list(col) for col in zip(*m)]


def det(m):
    """Exact determinant of a square matrix of Fractions (or ints)."""
    n = len(m)
    a = [[Fraction(x) for x in r] for r in m]
    d = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c]), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            d = -d
        d *= a[c][c]
        inv = 1 / a[c][c]
        for i in range(c + 1, n):
            if a[i][c]:
                f = a[i][c] * inv
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return d
