"""Upper-bound machinery.

* :func:`gstable_lp` -- the covering LP over a tensor's support, solved
  exactly (revised simplex on the packing dual, Bland's rule).
* closed forms for geometric ranks of the algebra families, with a
  finite-field point-counting oracle as an independent heuristic check.
* the composition combinatorics behind the matrix-multiplication formula.
* k-average-free sets and the floating-point spectral probe.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .algebras import Algebra, build_truncated_poly, structure_tensor
from .exactnum import EpsRational
from .tensor_core import ModeMap, Tensor, apply_mode_maps


class BudgetExceeded(RuntimeError):
    pass


class BadPrime(ValueError):
    pass


# ---------------------------------------------------------------------------
# G-stable covering LP

@dataclass
class LPSolution:
    value: Fraction
    primal: dict        # (mode, index) -> weight x_{mode,index}
    dual: dict          # support point -> packing weight
    pivots: int


def _support_lp(T: Tensor):
    points = sorted(T.entries)
    var_index = {}
    for s in points:
        for j, i in enumerate(s):
            var_index.setdefault((j, i), None)
    keys = sorted(var_index)
    var_index = {key: t for t, key in enumerate(keys)}
    cols = [[var_index[(j, i)] for j, i in enumerate(s)] for s in points]
    return points, keys, cols


def solve_gstable_lp(T: Tensor) -> LPSolution:
    """Solve min sum x s.t. sum_j x_{j, s_j} >= 1 for every support point s.

    The packing dual (max sum y, each variable row <= 1) starts from the
    all-slack basis, so no phase one is needed.  The returned primal is the
    dual price vector; both are checked for feasibility and equal value.
    """
    if T.is_zero():
        raise ValueError("the LP is defined for nonzero tensors")
    points, keys, cols = _support_lp(T)
    m = len(keys)
    N = len(points)
    # variables 0..N-1 structural (support points), N..N+m-1 slacks
    basis = [N + t for t in range(m)]
    binv = [[Fraction(int(i == j)) for j in range(m)] for i in range(m)]
    xb = [Fraction(1)] * m
    pivots = 0

    def column(v):
        if v < N:
            c = {}
            for r in cols[v]:
                c[r] = c.get(r, 0) + 1
            return c
        return {v - N: 1}

    pi = [Fraction(0)] * m        # prices c_B B^{-1}, updated after every pivot
    while True:
        entering = None
        reduced = None
        for v in range(N):
            rc = 1 - sum(pi[r] for r in cols[v])
            if rc > 0:
                entering, reduced = v, rc
                break
        if entering is None:
            for t in range(m):
                if pi[t] < 0:
                    entering, reduced = N + t, -pi[t]
                    break
        if entering is None:
            break
        col = column(entering)
        u = [sum((binv[i][r] * a for r, a in col.items() if binv[i][r]), Fraction(0))
             for i in range(m)]
        leave = None
        best = None
        for i in range(m):
            if u[i] > 0:
                ratio = xb[i] / u[i]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave is None:
            raise ArithmeticError("packing LP unbounded; impossible for a covering LP")
        piv = u[leave]
        prow = [x / piv for x in binv[leave]]
        nz = [j for j, x in enumerate(prow) if x]
        xl = xb[leave] / piv
        for i in range(m):
            if i != leave and u[i]:
                f = u[i]
                row = binv[i]
                for j in nz:
                    row[j] -= f * prow[j]
                xb[i] -= f * xl
        binv[leave] = prow
        xb[leave] = xl
        basis[leave] = entering
        for j in nz:
            pi[j] += reduced * prow[j]
        pivots += 1

    dual = {points[b]: xb[i] for i, b in enumerate(basis) if b < N and xb[i]}
    primal = {keys[r]: pi[r] for r in range(m) if pi[r]}
    value = sum(dual.values(), Fraction(0))
    # exact optimality certificate
    assert all(x >= 0 for x in pi), "dual prices must be nonnegative"
    assert all(sum(pi[r] for r in cols[v]) >= 1 for v in range(N)), "primal infeasible"
    assert sum(pi, Fraction(0)) == value, "objective values differ"
    return LPSolution(value, primal, dual, pivots)


def gstable_lp(T: Tensor) -> Fraction:
    """Exact optimum of the G-stable covering LP in the standard basis."""
    return solve_gstable_lp(T).value


def gstable_trd_bound(k: int, d: int) -> Fraction:
    """Closed-form upper bound for the LP of T^(k)_{R_d}."""
    q = 2 * (d - 1) // (k + 1)
    r = 2 * (d - 1) - q * (k + 1)
    return Fraction((k + 1) * (q + 1) * (q + 2), (k + 1) * (q + 2) - r)


# ---------------------------------------------------------------------------
# geometric rank closed forms

def mamu_gr(n: int, k: int) -> int:
    q, r = divmod(n, k)
    return (n * n + n * q + r * (q + 1)) // 2


def gr_closed_form(family: str, params: dict) -> int:
    """Closed-form geometric rank of T^(k) for the supported families.

    ``params`` always carries ``k``; further keys: ``d`` (trd), ``n``
    (null, cw, mamu, tri, sl).
    """
    k = params["k"]
    if k < 1:
        raise ValueError("k must be positive")
    if family == "trd":
        return params["d"]
    if family == "null":
        return params["n"] + 1 if k == 1 else 2
    if family == "cw":
        return params["n"] + 2 if k == 1 else 3
    if family == "mamu":
        return mamu_gr(params["n"], k)
    if family == "tri":
        n = params["n"]
        q = n // k
        return (q + 1) * (2 * n - q * k) // 2
    if family in ("sl", "sl2"):
        n = params.get("n", 2)
        if k == 1:
            return n * n - 1
        if k == 2:
            return n * n - n
        if n == 2:
            # sandwiched: the certificate of size 2 below, the k = 2 value above
            return 2
        raise ValueError("no closed form for sl_n with n >= 3 and k >= 3")
    raise ValueError(f"unknown family {family!r}")


# ---------------------------------------------------------------------------
# compositions

def h2(parts) -> int:
    """Second complete symmetric function sum_{i<=j} p_i p_j."""
    s = sum(parts)
    return (s * s + sum(p * p for p in parts)) // 2


def h2_min_composition(n: int, k: int):
    """Balanced composition ((q+1)^r, q^(k-r)) and its h2 value.

    Parts may be zero when k > n.
    """
    q, r = divmod(n, k)
    parts = tuple([q + 1] * r + [q] * (k - r))
    return parts, Fraction(h2(parts))


def weak_compositions(n: int, k: int):
    if k == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in weak_compositions(n - first, k - 1):
            yield (first,) + rest


def h2_min_bruteforce(n: int, k: int) -> int:
    return min(h2(p) for p in weak_compositions(n, k))


def kernel_matrix(parts):
    """Lower-triangular partial sums P[i][j] = p_j + ... + p_i (j <= i)."""
    k = len(parts)
    P = [[0] * k for _ in range(k)]
    for i in range(k):
        for j in range(i + 1):
            P[i][j] = sum(parts[j:i + 1])

    def get(i, j):
        return P[i][j] if 0 <= j <= i < k else 0

    for i in range(1, k):
        for j in range(i):
            if get(i, j) != get(i - 1, j) + get(i, j + 1) - get(i - 1, j + 1):
                raise AssertionError(f"partial-sum recurrence fails at ({i}, {j})")
    return P


# ---------------------------------------------------------------------------
# finite-field oracle

@dataclass
class OracleEstimate:
    dim: int
    ambient: int
    gr: int
    counts: dict
    slopes: list
    consistent: bool


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % t for t in range(2, int(math.isqrt(p)) + 1))


def _rank_mod_p_np(M, p):
    M = M.copy() % p
    rows, cols = M.shape
    rank = 0
    for c in range(cols):
        piv = None
        for i in range(rank, rows):
            if M[i, c]:
                piv = i
                break
        if piv is None:
            continue
        M[[rank, piv]] = M[[piv, rank]]
        inv = pow(int(M[rank, c]), -1, p)
        M[rank] = (M[rank] * inv) % p
        for i in range(rows):
            if i != rank and M[i, c]:
                M[i] = (M[i] - M[i, c] * M[rank]) % p
        rank += 1
    return rank


def _count_zero_products(A: Algebra, k: int, p: int, budget: int) -> int:
    n = A.dim
    C = np.zeros((n, n, n), dtype=np.int64)
    for (i, j), row in A.products.items():
        for h, c in row.items():
            c = Fraction(c)
            if c.denominator % p == 0:
                raise BadPrime(f"structure constant {c} is not defined modulo {p}")
            C[i, j, h] = (c.numerator * pow(c.denominator, -1, p)) % p
    size = p ** n
    ambient = p ** (k * n)
    if ambient > budget:
        raise BudgetExceeded(f"{p}^{k * n} = {ambient} points exceeds the budget {budget}")
    if k == 1:
        return 1
    elems = np.array(list(itertools.product(range(p), repeat=n)), dtype=np.int64)
    weights = p ** np.arange(n - 1, -1, -1, dtype=np.int64)
    dist = np.ones(size, dtype=object)
    for _ in range(k - 2):
        new = np.zeros(size, dtype=object)
        for a_code in range(size):
            w = dist[a_code]
            if not w:
                continue
            a = elems[a_code]
            L = np.einsum("i,ijh->jh", a, C) % p      # b -> a*b as a matrix on b
            prods = (elems @ L) % p
            codes = prods @ weights
            counts = np.bincount(codes, minlength=size)
            new += counts.astype(object) * w
        dist = new
    total = 0
    for a_code in range(size):
        w = dist[a_code]
        if not w:
            continue
        a = elems[a_code]
        L = np.einsum("i,ijh->jh", a, C) % p
        total += w * p ** (n - _rank_mod_p_np(L, p))
    return int(total)


def ff_dimension_oracle(A: Algebra, k: int, primes, budget: int = 10 ** 7) -> OracleEstimate:
    """Estimate dim Z_k(A) = {(a_1..a_k): a_1 ... a_k = 0} from point counts.

    Counts over F_p are exact (the enumeration is organized by the
    distribution of partial products, so the work is far below the ambient
    point count, but the budget still caps p^(k dim A)).  The dimension is
    the rounded log-ratio slope between the two largest primes, which is a
    heuristic; ``consistent`` reports whether every consecutive pair agrees.
    """
    primes = sorted(primes)
    if len(primes) < 2:
        raise ValueError("need at least two primes")
    for p in primes:
        if not _is_prime(p):
            raise BadPrime(f"{p} is not prime")
    counts = {p: _count_zero_products(A, k, p, budget) for p in primes}
    slopes = []
    for p1, p2 in zip(primes, primes[1:]):
        slopes.append(math.log(counts[p2] / counts[p1]) / math.log(p2 / p1))
    rounded = [round(s) for s in slopes]
    dim = rounded[-1]
    ambient = k * A.dim
    return OracleEstimate(dim, ambient, ambient - dim, counts, slopes, len(set(rounded)) == 1)


# ---------------------------------------------------------------------------
# k-average-free sets

def _avg_free(D, k):
    for y in D:
        for xs in itertools.combinations_with_replacement(D, k):
            if sum(xs) == k * y and any(x != y for x in xs):
                return False
    return True


def average_free_max(q: int, k: int) -> set:
    """A largest k-average-free subset of {0..q} (exhaustive for q <= 12)."""
    universe = list(range(q + 1))
    if q <= 12:
        for size in range(q + 1, 0, -1):
            for D in itertools.combinations(universe, size):
                if _avg_free(D, k):
                    return set(D)
    D = []
    for x in universe:
        if _avg_free(D + [x], k):
            D.append(x)
    return set(D)


# ---------------------------------------------------------------------------
# spectral probe (the only floating-point computation in the package)

def spectral_probe_tensor(eps) -> Tensor:
    """T_eps = (g ⊗ g ⊗ g) T with T = sum_{i0+i1+i2=3} e_i0 e_i1 e_i2, g = diag(1, eps, 1, eps^2).

    ``eps`` may be a Fraction or an EpsRational.
    """
    base = structure_tensor(build_truncated_poly(4), 2)
    # relabel the output x^m -> e_(3-m)
    flip = [[Fraction(int(i + j == 3)) for j in range(4)] for i in range(4)]
    ident = [[Fraction(int(i == j)) for j in range(4)] for i in range(4)]
    T = apply_mode_maps(base, [ModeMap(0, flip), ModeMap(1, ident), ModeMap(2, ident)])
    scale = [1, eps, 1, eps * eps]
    out = {}
    for idx, c in T.entries.items():
        v = c
        for i in idx:
            v = v * scale[i]
        out[idx] = v
    return Tensor(T.dims, out, check=False)


def spectral_probe_frobenius() -> EpsRational:
    """Squared Frobenius norm of T_eps as an exact function of eps."""
    T = spectral_probe_tensor(EpsRational.monomial(1, 1))
    return sum((c * c for c in T.entries.values()), EpsRational.const(0))


def _top_eigenvalue(G, tol=1e-12, max_iter=10_000):
    v = np.ones(G.shape[0]) / math.sqrt(G.shape[0])
    lam = 0.0
    for _ in range(max_iter):
        w = G @ v
        norm = np.linalg.norm(w)
        if norm == 0:
            return 0.0
        v = w / norm
        new = float(v @ G @ v)
        if abs(new - lam) <= tol * abs(new):
            return new
        lam = new
    return lam


def spectral_ratios(eps: float):
    """Ratios ||T_eps||^2 / sigma_max(flattening s)^2 for s = 0, 1, 2."""
    T = spectral_probe_tensor(Fraction(eps))
    arr = np.zeros(T.dims)
    for idx, c in T.entries.items():
        arr[idx] = float(c)
    fro2 = float((arr ** 2).sum())
    ratios = []
    for s in range(3):
        M = np.moveaxis(arr, s, 0).reshape(4, -1)
        ratios.append(fro2 / _top_eigenvalue(M @ M.T))
    return ratios


def spectral_ratio_probe(eps_values) -> float:
    """Minimum flattening ratio at the smallest eps in ``eps_values``."""
    eps_values = list(eps_values)
    if not eps_values or any(e <= 0 for e in eps_values):
        raise ValueError("eps values must be positive")
    if any(b >= a for a, b in zip(eps_values, eps_values[1:])):
        raise ValueError("eps values must be decreasing")
    return min(spectral_ratios(eps_values[-1]))
