"""Exact integer and residue arithmetic plus integer-matrix lattice algorithms.

Everything here works with plain Python integers, so nothing overflows or
rounds.  The matrix routines (Smith normal form, saturation) are
deterministic: pivots are chosen by smallest nonzero absolute value with
(row, column) tie-breaks, so outputs are stable enough to pin in tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, isqrt

from .errors import NotInvertible

__all__ = [
    "ResidueClass",
    "IntMatrix",
    "xgcd",
    "inv_mod",
    "legendre_symbol",
    "sqrt_mod",
    "is_prime",
    "primes_up_to",
    "factorize",
    "smith_normal_form",
    "saturation",
    "column_span_contains",
    "same_column_span",
]


def xgcd(a, b):
    """Return (g, s, t) with g = gcd(a, b) >= 0 and s*a + t*b = g."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


@dataclass(frozen=True)
class ResidueClass:
    """An element of Z/nZ, stored as the least nonnegative representative."""

    value: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError("modulus must be >= 1")
        object.__setattr__(self, "value", self.value % self.modulus)

    def _coerce(self, other):
        if isinstance(other, ResidueClass):
            if other.modulus != self.modulus:
                raise ValueError("mixed moduli")
            return other.value
        return int(other)

    def __add__(self, other):
        return ResidueClass(self.value + self._coerce(other), self.modulus)

    def __sub__(self, other):
        return ResidueClass(self.value - self._coerce(other), self.modulus)

    def __mul__(self, other):
        return ResidueClass(self.value * self._coerce(other), self.modulus)

    def __neg__(self):
        return ResidueClass(-self.value, self.modulus)

    def inverse(self):
        return inv_mod(self.value, self.modulus)

    def is_unit(self):
        return gcd(self.value, self.modulus) == 1

    def __int__(self):
        return self.value


def inv_mod(a, n):
    """Inverse of a modulo n as a ResidueClass; NotInvertible if gcd != 1."""
    if n < 1:
        raise ValueError("modulus must be >= 1")
    g, s, _ = xgcd(a, n)
    if g != 1:
        raise NotInvertible(f"gcd({a}, {n}) = {g}")
    return ResidueClass(s, n)


def legendre_symbol(a, p):
    """(a|p) for an odd prime p: 1 for nonzero squares, -1 otherwise, 0 at 0."""
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def sqrt_mod(a, p):
    """A square root of a modulo an odd prime p (the smaller of the two roots).

    Returns None when a is a non-residue.  Tonelli-Shanks, deterministic:
    the auxiliary non-residue is the smallest one.
    """
    a %= p
    if a == 0:
        return 0
    if legendre_symbol(a, p) != 1:
        return None
    if p % 4 == 3:
        r = pow(a, (p + 1) // 4, p)
        return min(r, p - r)
    # write p - 1 = q * 2^s with q odd
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while legendre_symbol(z, p) != -1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        t2, i = t, 0
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t = t * c % p
        r = r * b % p
    return min(r, p - r)


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n):
    """Deterministic Miller-Rabin (exact for every n below 3.3 * 10^24)."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_up_to(n):
    """All primes <= n, by sieve."""
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for p in range(2, isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(sieve[p * p :: p]))
    return [i for i, flag in enumerate(sieve) if flag]


def factorize(n):
    """Prime factorization of n >= 1 as {prime: exponent}, by trial division."""
    if n < 1:
        raise ValueError("factorize expects n >= 1")
    out = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    f = 5
    while f * f <= n:
        for p in (f, f + 2):
            while n % p == 0:
                out[p] = out.get(p, 0) + 1
                n //= p
        f += 6
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@dataclass(frozen=True)
class IntMatrix:
    """Dense integer matrix with exact entries, row-major.

    Zero-dimensional shapes are allowed: a 0 x n matrix is the morphism
    onto the trivial target.
    """

    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("negative dimensions")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entry count must equal rows * cols")
        object.__setattr__(self, "entries", tuple(int(e) for e in self.entries))

    @classmethod
    def from_rows(cls, rows):
        rows = [list(r) for r in rows]
        n = len(rows)
        m = len(rows[0]) if rows else 0
        if any(len(r) != m for r in rows):
            raise ValueError("ragged rows")
        return cls(n, m, tuple(e for r in rows for e in r))

    @classmethod
    def identity(cls, n):
        return cls(n, n, tuple(1 if i == j else 0 for i in range(n) for j in range(n)))

    @classmethod
    def zeros(cls, rows, cols):
        return cls(rows, cols, (0,) * (rows * cols))

    def entry(self, i, j):
        return self.entries[i * self.cols + j]

    def to_rows(self):
        c = self.cols
        return [list(self.entries[i * c : (i + 1) * c]) for i in range(self.rows)]

    def column(self, j):
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def transpose(self):
        return IntMatrix(
            self.cols,
            self.rows,
            tuple(self.entry(i, j) for j in range(self.cols) for i in range(self.rows)),
        )

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        a, b = self.to_rows(), other.to_rows()
        out = []
        for i in range(self.rows):
            for j in range(other.cols):
                out.append(sum(a[i][k] * b[k][j] for k in range(self.cols)))
        return IntMatrix(self.rows, other.cols, tuple(out))

    def det(self):
        """Determinant of a square matrix (fraction-free Bareiss elimination)."""
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        m = self.to_rows()
        sign = 1
        prev = 1
        for k in range(n - 1):
            if m[k][k] == 0:
                for i in range(k + 1, n):
                    if m[i][k] != 0:
                        m[k], m[i] = m[i], m[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
                m[i][k] = 0
            prev = m[k][k]
        return sign * m[n - 1][n - 1]

    def is_unimodular(self):
        return self.rows == self.cols and abs(self.det()) == 1


def _snf_with_inverses(mat):
    """Mutating SNF core.

    Returns (U, D, V, Uinv, Vinv) as lists of lists with U*M*V = D,
    Uinv = U^-1 and Vinv = V^-1.
    """
    rows = len(mat)
    cols = len(mat[0]) if rows else 0
    d = [list(r) for r in mat]
    u = [[int(i == j) for j in range(rows)] for i in range(rows)]
    ui = [row[:] for row in u]
    v = [[int(i == j) for j in range(cols)] for i in range(cols)]
    vi = [row[:] for row in v]

    def row_swap(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]
        for r in ui:
            r[i], r[j] = r[j], r[i]

    def row_add(i, j, q):
        # row_i += q * row_j
        d[i] = [x + q * y for x, y in zip(d[i], d[j])]
        u[i] = [x + q * y for x, y in zip(u[i], u[j])]
        for r in ui:
            r[j] -= q * r[i]

    def row_negate(i):
        d[i] = [-x for x in d[i]]
        u[i] = [-x for x in u[i]]
        for r in ui:
            r[i] = -r[i]

    def col_swap(i, j):
        for r in d:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]
        vi[i], vi[j] = vi[j], vi[i]

    def col_add(i, j, q):
        # col_j += q * col_i
        for r in d:
            r[j] += q * r[i]
        for r in v:
            r[j] += q * r[i]
        vi[i] = [x - q * y for x, y in zip(vi[i], vi[j])]

    def col_negate(j):
        for r in d:
            r[j] = -r[j]
        for r in v:
            r[j] = -r[j]
        vi[j] = [-x for x in vi[j]]

    def find_pivot(k):
        best = None
        for i in range(k, rows):
            for j in range(k, cols):
                val = d[i][j]
                if val and (best is None or abs(val) < best[0]):
                    best = (abs(val), i, j)
        return best

    k = 0
    while k < min(rows, cols):
        pivot = find_pivot(k)
        if pivot is None:
            break
        _, pi, pj = pivot
        if pi != k:
            row_swap(k, pi)
        if pj != k:
            col_swap(k, pj)
        while True:
            if d[k][k] < 0:
                row_negate(k)
            # reduce the pivot column, then the pivot row
            dirty = False
            for i in range(k + 1, rows):
                if d[i][k]:
                    q = d[i][k] // d[k][k]
                    row_add(i, k, -q)
                    if d[i][k]:
                        dirty = True
            for j in range(k + 1, cols):
                if d[k][j]:
                    q = d[k][j] // d[k][k]
                    col_add(k, j, -q)
                    if d[k][j]:
                        dirty = True
            if dirty:
                pivot = find_pivot(k)
                _, pi, pj = pivot
                if pi != k:
                    row_swap(k, pi)
                if pj != k:
                    col_swap(k, pj)
                continue
            # enforce the divisibility chain before moving on
            offender = None
            for i in range(k + 1, rows):
                for j in range(k + 1, cols):
                    if d[i][j] % d[k][k]:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            row_add(k, offender, 1)
        k += 1
    for i in range(min(rows, cols)):
        if d[i][i] < 0:
            row_negate(i)
    return u, d, v, ui, vi


def smith_normal_form(m):
    """Smith normal form of an IntMatrix.

    Returns (U, D, V) with U*M*V = D, U and V unimodular, D diagonal with
    nonnegative entries satisfying d_i | d_{i+1}.
    """
    u, d, v, _, _ = _snf_with_inverses(m.to_rows())
    return (
        IntMatrix.from_rows(u) if u else IntMatrix.identity(0),
        IntMatrix(m.rows, m.cols, tuple(e for r in d for e in r)),
        IntMatrix.from_rows(v) if v else IntMatrix.identity(0),
    )


def saturation(m):
    """Basis of the saturation of the column span of m.

    The result is an m.rows x r matrix whose columns span
    {v : k*v in col-span(m) for some k >= 1}.
    """
    if m.cols == 0 or m.rows == 0:
        return IntMatrix(m.rows, 0, ())
    _, d, _, ui, _ = _snf_with_inverses(m.to_rows())
    rank = sum(1 for i in range(min(m.rows, m.cols)) if d[i][i])
    ent = tuple(ui[i][j] for i in range(m.rows) for j in range(rank))
    return IntMatrix(m.rows, rank, ent)


def column_span_contains(m, vector):
    """Whether vector lies in the integer column span of m."""
    vector = list(vector)
    if len(vector) != m.rows:
        raise ValueError("vector length must equal row count")
    if m.cols == 0:
        return all(x == 0 for x in vector)
    u, d, _, _, _ = _snf_with_inverses(m.to_rows())
    w = [sum(u[i][k] * vector[k] for k in range(m.rows)) for i in range(m.rows)]
    for i in range(m.rows):
        di = d[i][i] if i < min(m.rows, m.cols) else 0
        if di == 0:
            if w[i] != 0:
                return False
        elif w[i] % di:
            return False
    return True


def same_column_span(a, b):
    """Mutual containment of integer column spans."""
    return all(
        column_span_contains(a, b.column(j)) for j in range(b.cols)
    ) and all(column_span_contains(b, a.column(j)) for j in range(a.cols))
