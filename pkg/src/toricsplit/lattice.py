"""Exact integer and rational linear algebra.

Matrices are plain lists of row lists; vectors are any sequences.
Integer entries use Python's arbitrary precision ints, rational ones use
``fractions.Fraction``.  Nothing here or downstream touches floating
point: cone tests, face enumeration and lattice point counts all depend
on these routines being exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd


def identity_matrix(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(a):
    return [list(col) for col in zip(*a)]


def dot(u, v):
    return sum(x * y for x, y in zip(u, v))


def mat_vec(a, x):
    return [dot(row, x) for row in a]


def mat_mul(a, b):
    bt = transpose(b)
    return [[dot(row, col) for col in bt] for row in a]


def vec_add(u, v):
    return tuple(x + y for x, y in zip(u, v))


def vec_sub(u, v):
    return tuple(x - y for x, y in zip(u, v))


def vec_neg(u):
    return tuple(-x for x in u)


def vec_gcd(v):
    g = 0
    for x in v:
        g = gcd(g, abs(x))
    return g


def primitive(v):
    """v divided by the gcd of its entries (the zero vector is unchanged)."""
    g = vec_gcd(v)
    return list(v) if g <= 1 else [x // g for x in v]


@dataclass(frozen=True)
class SmithDecomposition:
    """u @ a @ v == d with u, v unimodular, d diagonal and d1 | d2 | ..."""

    d: list
    u: list
    v: list

    def diagonal(self):
        k = min(len(self.d), len(self.d[0]) if self.d else 0)
        return [self.d[i][i] for i in range(k)]

    def rank(self):
        return sum(1 for x in self.diagonal() if x)


def smith_normal_form(a):
    """Smith normal form with both transformation matrices.

    Pivoting always picks the smallest nonzero absolute value in the
    remaining block, which keeps coefficient growth tame at the scale
    used here.  Total function: any integer matrix is accepted.
    """
    m = len(a)
    n = len(a[0]) if m else 0
    d = [list(map(int, row)) for row in a]
    u = identity_matrix(m)
    v = identity_matrix(n)

    def row_sub(i, j, q):
        if q:
            d[i] = [x - q * y for x, y in zip(d[i], d[j])]
            u[i] = [x - q * y for x, y in zip(u[i], u[j])]

    def col_sub(j, i, q):
        if q:
            for row in d:
                row[j] -= q * row[i]
            for row in v:
                row[j] -= q * row[i]

    def swap_rows(i, j):
        if i != j:
            d[i], d[j] = d[j], d[i]
            u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        if i != j:
            for row in d:
                row[i], row[j] = row[j], row[i]
            for row in v:
                row[i], row[j] = row[j], row[i]

    def eliminate():
        t = 0
        while t < min(m, n):
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    if d[i][j] and (best is None or abs(d[i][j]) < abs(d[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                return
            swap_rows(t, best[0])
            swap_cols(t, best[1])
            while True:
                for i in range(t + 1, m):
                    if d[i][t]:
                        row_sub(i, t, d[i][t] // d[t][t])
                for j in range(t + 1, n):
                    if d[t][j]:
                        col_sub(j, t, d[t][j] // d[t][t])
                stray = next(((i, t) for i in range(t + 1, m) if d[i][t]), None)
                if stray is None:
                    stray = next(((t, j) for j in range(t + 1, n) if d[t][j]), None)
                if stray is None:
                    break
                # the remainder is strictly smaller than the pivot; promote it
                swap_rows(t, stray[0])
                swap_cols(t, stray[1])
            t += 1

    def fix_signs():
        for i in range(min(m, n)):
            if d[i][i] < 0:
                d[i] = [-x for x in d[i]]
                u[i] = [-x for x in u[i]]

    eliminate()
    fix_signs()
    k = min(m, n)
    while True:
        bad = next(
            (i for i in range(k - 1) if d[i][i] and d[i + 1][i + 1] % d[i][i]),
            None,
        )
        if bad is None:
            break
        col_sub(bad, bad + 1, -1)
        eliminate()
        fix_signs()
    return SmithDecomposition(d=d, u=u, v=v)


def integer_kernel(a):
    """Basis vectors of the lattice {x in Z^n : a @ x = 0}.

    The kernel of an integer matrix is saturated, so the basis vectors
    are automatically primitive; signs are fixed so the first nonzero
    coordinate of each vector is positive.
    """
    m = len(a)
    n = len(a[0]) if m else 0
    if n == 0:
        return []
    if m == 0:
        return identity_matrix(n)
    s = smith_normal_form(a)
    rank = s.rank()
    basis = []
    for j in range(rank, n):
        vec = [s.v[i][j] for i in range(n)]
        lead = next((x for x in vec if x), 0)
        if lead < 0:
            vec = [-x for x in vec]
        basis.append(vec)
    return basis


def solve_rational(a, b):
    """One exact solution of a @ x = b over Q, or None if inconsistent.

    Free coordinates are set to zero, making the answer deterministic.
    """
    m = len(a)
    n = len(a[0]) if m else 0
    rows = [[Fraction(x) for x in row] + [Fraction(bi)] for row, bi in zip(a, b)]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(m):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append((r, c))
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if rows[i][n] != 0:
            return None
    x = [Fraction(0)] * n
    for i, c in pivots:
        x[c] = rows[i][n]
    return x


def rref(a):
    """Reduced row echelon form over Q, zero rows dropped.

    Canonical for the row space, so it doubles as a dictionary key for
    affine flats given by equation systems.
    """
    rows = [[Fraction(x) for x in row] for row in a]
    m = len(rows)
    n = len(rows[0]) if m else 0
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(m):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        r += 1
        if r == m:
            break
    return tuple(tuple(row) for row in rows[:r])


def rank_rational(a):
    return len(rref(a))


def hnf_rows(a):
    """Row-style Hermite normal form: the canonical basis of the row lattice.

    Pivots are positive, entries above each pivot lie in [0, pivot), zero
    rows are dropped.  Unique per row lattice, which makes downstream
    basis choices reproducible.
    """
    h = [list(map(int, row)) for row in a]
    m = len(h)
    n = len(h[0]) if m else 0
    r = 0
    for c in range(n):
        while True:
            nz = [i for i in range(r, m) if h[i][c]]
            if len(nz) <= 1:
                break
            i0 = min(nz, key=lambda i: abs(h[i][c]))
            for i in nz:
                if i != i0:
                    q = h[i][c] // h[i0][c]
                    h[i] = [x - q * y for x, y in zip(h[i], h[i0])]
        nz = [i for i in range(r, m) if h[i][c]]
        if not nz:
            continue
        h[r], h[nz[0]] = h[nz[0]], h[r]
        if h[r][c] < 0:
            h[r] = [-x for x in h[r]]
        for i in range(r):
            q = h[i][c] // h[r][c]
            if q:
                h[i] = [x - q * y for x, y in zip(h[i], h[r])]
        r += 1
    return h[:r]
