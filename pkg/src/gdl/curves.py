"""Elliptic curves in short Weierstrass form over Q and over prime fields.

A curve is y^2 = x^3 + a*x + b with exact coefficients: Fractions over Q,
least nonnegative residues over F_p.  The same chord-tangent formulas are
used for both coefficient fields, so everything downstream (torsion search,
point counting, group structure) is exact.

Point counting over F_p is done twice on purpose: `enumerate_points` is the
definitional O(p) scan that materialises every point, while `point_count`
is a vectorised residue-table count used for prime scans.  Tests compare
the two.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt

import numpy as np

from .arith import factorize, is_prime, sqrt_mod
from .errors import BadReduction, PointNotOnCurve, SingularCurve

__all__ = [
    "Curve",
    "CurvePoint",
    "INFINITY",
    "GroupStructure",
    "DivisionPolynomial",
    "parse_curve",
    "parse_point",
    "on_curve",
    "add_points",
    "negate_point",
    "scalar_mul",
    "division_polynomial",
    "enumerate_points",
    "point_stream",
    "point_count",
    "point_order",
    "group_structure",
    "reduce_curve",
    "reduce_point",
    "trace_of_frobenius",
]


@dataclass(frozen=True)
class CurvePoint:
    """Affine point (x, y) or the point at infinity (x is None)."""

    x: object = None
    y: object = None

    @property
    def is_infinity(self):
        return self.x is None

    def __repr__(self):
        if self.is_infinity:
            return "CurvePoint(inf)"
        return f"CurvePoint({self.x}, {self.y})"


INFINITY = CurvePoint()


@dataclass(frozen=True)
class Curve:
    """y^2 = x^3 + a*x + b over Q (p is None) or over F_p (p an odd prime).

    Coefficients are Fractions over Q and ints in [0, p) over F_p.
    Construction rejects singular equations.
    """

    a: object
    b: object
    p: object = None

    def __post_init__(self):
        if self.p is None:
            object.__setattr__(self, "a", Fraction(self.a))
            object.__setattr__(self, "b", Fraction(self.b))
            if 4 * self.a**3 + 27 * self.b**2 == 0:
                raise SingularCurve(f"4a^3 + 27b^2 = 0 for a={self.a}, b={self.b}")
        else:
            p = self.p
            if p < 3 or not is_prime(p):
                raise BadReduction(f"{p} is not an odd prime")
            object.__setattr__(self, "a", int(self.a) % p)
            object.__setattr__(self, "b", int(self.b) % p)
            if (4 * self.a**3 + 27 * self.b**2) % p == 0:
                raise SingularCurve(f"singular reduction at p={p}")

    @property
    def is_rational(self):
        return self.p is None

    def discriminant(self):
        d = -16 * (4 * self.a**3 + 27 * self.b**2)
        return d if self.p is None else d % self.p

    def rhs(self, x):
        """x^3 + a*x + b in the coefficient field."""
        if self.p is None:
            return x**3 + self.a * x + self.b
        return (x * x % self.p * x + self.a * x + self.b) % self.p

    def __repr__(self):
        field = "Q" if self.p is None else f"F_{self.p}"
        return f"Curve(y^2 = x^3 + {self.a}*x + {self.b} over {field})"


@dataclass(frozen=True)
class GroupStructure:
    """E(F_p) = Z/n1 x Z/n2 with n1 | n2.

    generators[0] has order n2; generators[1] has order n1 and is the point
    at infinity when the group is cyclic.
    """

    n1: int
    n2: int
    generators: tuple


def parse_curve(text, p=None):
    """Parse "a;b" with each coefficient "n" or "n/d" into a Curve."""
    parts = text.split(";")
    if len(parts) != 2:
        raise ValueError(f"curve spec must be 'a;b', got {text!r}")
    a, b = (Fraction(part.strip()) for part in parts)
    if p is None:
        return Curve(a, b)
    return reduce_curve(Curve(a, b), p)


def parse_point(text, curve=None):
    """Parse "x,y" (rationals) or "inf" into a CurvePoint."""
    text = text.strip()
    if text.lower() in ("inf", "o", "infinity"):
        return INFINITY
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"point spec must be 'x,y' or 'inf', got {text!r}")
    x, y = (Fraction(part.strip()) for part in parts)
    if curve is not None and curve.p is not None:
        pt = CurvePoint(int(x) % curve.p, int(y) % curve.p)
    else:
        pt = CurvePoint(x, y)
    if curve is not None and not on_curve(curve, pt):
        raise PointNotOnCurve(f"{text!r} does not satisfy {curve!r}")
    return pt


def format_point(pt):
    return "inf" if pt.is_infinity else f"{pt.x},{pt.y}"


def on_curve(curve, pt):
    """Exact check of the curve equation."""
    if pt.is_infinity:
        return True
    if curve.p is None:
        return pt.y * pt.y == curve.rhs(pt.x)
    return pt.y * pt.y % curve.p == curve.rhs(pt.x)


def _require_on_curve(curve, pt):
    if not on_curve(curve, pt):
        raise PointNotOnCurve(f"{pt!r} is not on {curve!r}")


def negate_point(curve, pt):
    if pt.is_infinity:
        return pt
    if curve.p is None:
        return CurvePoint(pt.x, -pt.y)
    return CurvePoint(pt.x, (-pt.y) % curve.p)


def _field_div(curve, num, den):
    if curve.p is None:
        return num / den
    return num * pow(den, -1, curve.p) % curve.p


def add_points(curve, pt1, pt2):
    """Chord-tangent addition with infinity as the identity."""
    _require_on_curve(curve, pt1)
    _require_on_curve(curve, pt2)
    if pt1.is_infinity:
        return pt2
    if pt2.is_infinity:
        return pt1
    p = curve.p
    if pt1.x == pt2.x:
        y_sum = pt1.y + pt2.y if p is None else (pt1.y + pt2.y) % p
        if y_sum == 0:
            return INFINITY
        # tangent line: both points coincide with nonzero y
        slope = _field_div(curve, 3 * pt1.x * pt1.x + curve.a, 2 * pt1.y)
    else:
        slope = _field_div(curve, pt2.y - pt1.y, pt2.x - pt1.x)
    x3 = slope * slope - pt1.x - pt2.x
    if p is not None:
        x3 %= p
    y3 = slope * (pt1.x - x3) - pt1.y
    if p is not None:
        y3 %= p
    return CurvePoint(x3, y3)


def scalar_mul(curve, k, pt):
    """k*pt by double-and-add; 0*pt is infinity, (-k)*pt = -(k*pt)."""
    _require_on_curve(curve, pt)
    if k < 0:
        k, pt = -k, negate_point(curve, pt)
    acc = INFINITY
    addend = pt
    while k:
        if k & 1:
            acc = add_points(curve, acc, addend)
        k >>= 1
        if k:
            addend = add_points(curve, addend, addend)
    return acc


# ---------------------------------------------------------------------------
# division polynomials


@dataclass(frozen=True)
class DivisionPolynomial:
    """The n-division polynomial, reduced to a polynomial in x alone.

    For odd n this is psi_n itself, of degree (n^2 - 1)/2.  For even n,
    psi_n carries a factor of y; `coeffs` then holds the fully reduced
    square psi_n^2 (with y^2 = x^3 + a x + b substituted), of degree
    n^2 - 1, and `has_y_factor` is set.  Either way the roots over the
    algebraic closure are exactly the x-coordinates of the nonzero
    n-torsion points.

    Coefficients are in ascending order; `modulus` is None over Q.
    """

    n: int
    coeffs: tuple
    has_y_factor: bool
    modulus: object = None

    def degree(self):
        return len(self.coeffs) - 1

    def evaluate(self, x):
        acc = self.coeffs[-1] if self.coeffs else 0
        for c in reversed(self.coeffs[:-1]):
            acc = acc * x + c
            if self.modulus is not None:
                acc %= self.modulus
        return acc


def _poly_trim(f):
    while f and f[-1] == 0:
        f.pop()
    return f


def _poly_add(f, g, p):
    n = max(len(f), len(g))
    out = [(f[i] if i < len(f) else 0) + (g[i] if i < len(g) else 0) for i in range(n)]
    if p is not None:
        out = [c % p for c in out]
    return _poly_trim(out)


def _poly_sub(f, g, p):
    return _poly_add(f, [-c for c in g], p)


def _poly_mul(f, g, p):
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, fi in enumerate(f):
        if fi == 0:
            continue
        for j, gj in enumerate(g):
            out[i + j] += fi * gj
    if p is not None:
        out = [c % p for c in out]
    return _poly_trim(out)


def _poly_div_exact(f, g, p):
    """f / g over the coefficient field; raises if the division is inexact."""
    f = list(f)
    out = [0] * (len(f) - len(g) + 1) if len(f) >= len(g) else []
    inv_lead = (
        Fraction(1) / g[-1] if p is None else pow(int(g[-1]), -1, p)
    )
    while len(f) >= len(g) and f:
        shift = len(f) - len(g)
        q = f[-1] * inv_lead
        if p is not None:
            q %= p
        out[shift] = q
        for i, gi in enumerate(g):
            f[shift + i] -= q * gi
            if p is not None:
                f[shift + i] %= p
        _poly_trim(f)
    if _poly_trim(f):
        raise ArithmeticError("inexact polynomial division")
    return _poly_trim(out)


def division_polynomial(curve, n):
    """psi_n by the standard recurrence (see DivisionPolynomial for shape)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    p = curve.p
    a, b = curve.a, curve.b
    one = 1 if p is not None else Fraction(1)
    cubic = [b, a, 0 * one, one]  # x^3 + a x + b

    # psi_k represented as (f, g) meaning f(x) + g(x)*y, with y^2 = cubic.
    def tmul(u, v):
        f = _poly_add(
            _poly_mul(u[0], v[0], p), _poly_mul(_poly_mul(u[1], v[1], p), cubic, p), p
        )
        g = _poly_add(_poly_mul(u[0], v[1], p), _poly_mul(u[1], v[0], p), p)
        return (f, g)

    def tsub(u, v):
        return (_poly_sub(u[0], v[0], p), _poly_sub(u[1], v[1], p))

    psi = {
        0: ([], []),
        1: ([one], []),
        2: ([], [2 * one]),
        3: (_poly_trim([-a * a, 12 * b, 6 * a, 0 * one, 3 * one]), []),
        4: (
            [],
            _poly_trim(
                [
                    -32 * b * b - 4 * a**3,
                    -16 * a * b,
                    -20 * a * a,
                    80 * b,
                    20 * a,
                    0 * one,
                    4 * one,
                ]
            ),
        ),
    }
    if p is not None:
        psi = {
            k: ([c % p for c in f], [c % p for c in g]) for k, (f, g) in psi.items()
        }

    def get(k):
        if k in psi:
            return psi[k]
        m = k // 2
        if k % 2:
            # psi_{2m+1} = psi_{m+2} psi_m^3 - psi_{m-1} psi_{m+1}^3
            pm = get(m)
            val = tsub(
                tmul(get(m + 2), tmul(pm, tmul(pm, pm))),
                tmul(get(m - 1), tmul(get(m + 1), tmul(get(m + 1), get(m + 1)))),
            )
        else:
            # psi_{2m} = psi_m (psi_{m+2} psi_{m-1}^2 - psi_{m-2} psi_{m+1}^2) / (2y)
            inner = tsub(
                tmul(get(m + 2), tmul(get(m - 1), get(m - 1))),
                tmul(get(m - 2), tmul(get(m + 1), get(m + 1))),
            )
            w = tmul(get(m), inner)
            if w[1]:
                raise ArithmeticError("even-index recurrence lost parity")
            two_cubic = _poly_mul([2 * one], cubic, p)
            val = ([], _poly_div_exact(w[0], two_cubic, p))
        psi[k] = val
        return val

    f, g = get(n)
    if n % 2:
        if g:
            raise ArithmeticError("odd psi acquired a y part")
        coeffs = f
        has_y = False
    else:
        if f:
            raise ArithmeticError("even psi acquired a pure part")
        coeffs = _poly_mul(_poly_mul(g, g, p), cubic, p)  # (g*y)^2 reduced
        has_y = True
    if not coeffs:
        coeffs = [0 * one]
    return DivisionPolynomial(n, tuple(coeffs), has_y, p)


# ---------------------------------------------------------------------------
# point enumeration and counting over F_p


def _require_finite(curve):
    if curve.p is None:
        raise BadReduction("operation requires a curve over F_p; reduce first")


def point_stream(curve):
    """Affine points in deterministic order: x ascending, smaller y first."""
    _require_finite(curve)
    p = curve.p
    for x in range(p):
        rhs = curve.rhs(x)
        if rhs == 0:
            yield CurvePoint(x, 0)
            continue
        y = sqrt_mod(rhs, p)
        if y is not None:
            yield CurvePoint(x, y)
            yield CurvePoint(x, p - y)


def enumerate_points(curve):
    """Every point of E(F_p), infinity first, affine points ordered by (x, y)."""
    _require_finite(curve)
    p = curve.p
    # table of square roots: root[v] = smallest y with y^2 = v
    root = {}
    for y in range(p // 2 + 1):
        root.setdefault(y * y % p, y)
    pts = [INFINITY]
    for x in range(p):
        rhs = curve.rhs(x)
        y = root.get(rhs)
        if y is None:
            continue
        if y == 0:
            pts.append(CurvePoint(x, 0))
        else:
            pts.append(CurvePoint(x, y))
            pts.append(CurvePoint(x, p - y))
    return pts


_NUMPY_LIMIT = 1 << 21  # x^3 must stay inside int64


def point_count(curve):
    """|E(F_p)| without materialising points; checks the Hasse bound."""
    _require_finite(curve)
    p = curve.p
    if p < _NUMPY_LIMIT:
        x = np.arange(p, dtype=np.int64)
        rhs = (x * x % p * x + curve.a * x + curve.b) % p
        sq = np.zeros(p, dtype=bool)
        y = np.arange(1, (p - 1) // 2 + 1, dtype=np.int64)
        sq[y * y % p] = True
        count = 1 + int((rhs == 0).sum()) + 2 * int(sq[rhs].sum())
    else:
        count = 1
        for x in range(p):
            rhs = curve.rhs(x)
            if rhs == 0:
                count += 1
            elif pow(rhs, (p - 1) // 2, p) == 1:
                count += 2
    if (p + 1 - count) ** 2 > 4 * p:
        raise ArithmeticError(f"Hasse bound violated at p={p}: count={count}")
    return count


def point_order(curve, pt, group_order, factors=None):
    """Order of pt given a multiple of it (the group order)."""
    if factors is None:
        factors = factorize(group_order)
    order = group_order
    for q in factors:
        while order % q == 0 and scalar_mul(curve, order // q, pt).is_infinity:
            order //= q
    return order


def _sylow_subgroup(curve, m, q, e):
    """The q-Sylow subgroup of E(F_p) as a dict point -> known flag."""
    target = q**e
    cofactor = m // target
    sylow = {INFINITY}
    for pt in point_stream(curve):
        if len(sylow) == target:
            break
        z = scalar_mul(curve, cofactor, pt)
        if z in sylow:
            continue
        # close sylow under the new element
        zmult = [INFINITY]
        cur = z
        while not cur.is_infinity:
            zmult.append(cur)
            cur = add_points(curve, cur, z)
        sylow = {add_points(curve, s, zk) for s in sylow for zk in zmult}
    if len(sylow) != target:
        raise ArithmeticError("Sylow subgroup incomplete after full scan")
    return sylow


def _sylow_shape(curve, sylow, q):
    """(alpha, beta) with the Sylow group = Z/q^alpha x Z/q^beta, alpha<=beta."""
    sizes = [len(sylow)]
    current = sylow
    while len(current) > 1:
        current = {scalar_mul(curve, q, s) for s in current}
        sizes.append(len(current))
    beta = len(sizes) - 1
    alpha = 0
    for i in range(beta):
        ratio = sizes[i] // sizes[i + 1]
        if ratio == q * q:
            alpha += 1
    return alpha, beta


def _point_key(pt):
    return (1,) if pt.is_infinity else (0, pt.x, pt.y)


@lru_cache(maxsize=4096)
def group_structure(curve):
    """Abelian group structure of E(F_p) with explicit generators.

    Cached: prime scans tend to revisit the same reduction for several
    divisibility questions.
    """
    _require_finite(curve)
    m = point_count(curve)
    factors = factorize(m)
    n1, n2 = 1, 1
    big_parts, small_parts = [], []
    for q in sorted(factors):
        e = factors[q]
        if e == 1:
            cofactor = m // q
            h = None
            for pt in point_stream(curve):
                z = scalar_mul(curve, cofactor, pt)
                if not z.is_infinity:
                    h = z
                    break
            if h is None:
                raise ArithmeticError(f"no point of order {q} found")
            alpha, beta, h_small, h_big = 0, 1, None, h
        else:
            sylow = _sylow_subgroup(curve, m, q, e)
            alpha, beta = _sylow_shape(curve, sylow, q)
            ordered = sorted(sylow, key=_point_key)
            h_big = next(
                s
                for s in ordered
                if not scalar_mul(curve, q ** (beta - 1), s).is_infinity
            )
            h_small = None
            if alpha:
                big_multiples = set()
                cur = INFINITY
                for _ in range(q**beta):
                    big_multiples.add(cur)
                    cur = add_points(curve, cur, h_big)
                for s in ordered:
                    if point_order(curve, s, q**e, {q: e}) != q**alpha:
                        continue
                    small_multiples = set()
                    cur = INFINITY
                    for _ in range(q**alpha):
                        small_multiples.add(cur)
                        cur = add_points(curve, cur, s)
                    if small_multiples & big_multiples == {INFINITY}:
                        h_small = s
                        break
                if h_small is None:
                    raise ArithmeticError("no independent Sylow generator found")
        n2 *= q**beta
        n1 *= q**alpha
        big_parts.append(h_big)
        if h_small is not None:
            small_parts.append(h_small)
    g2 = INFINITY
    for part in big_parts:
        g2 = add_points(curve, g2, part)
    g1 = INFINITY
    for part in small_parts:
        g1 = add_points(curve, g1, part)
    if n1 * n2 != m or n2 % n1:
        raise ArithmeticError("inconsistent group structure")
    if (curve.p - 1) % n1:
        raise ArithmeticError("n1 must divide p - 1")
    return GroupStructure(n1, n2, (g2, g1))


# ---------------------------------------------------------------------------
# reduction from Q and Frobenius traces


def curve_discriminant_int(curve):
    """Discriminant of a rational curve scaled to an integer (num * den)."""
    d = Fraction(curve.a * curve.a * curve.a * 4 + 27 * curve.b * curve.b)
    return d.numerator * d.denominator


def has_good_reduction(curve, p):
    if curve.p is not None:
        raise BadReduction("curve is already reduced")
    if p < 3 or not is_prime(p):
        return False
    if curve.a.denominator % p == 0 or curve.b.denominator % p == 0:
        return False
    return curve_discriminant_int(curve) % p != 0


def reduce_curve(curve, p):
    """Reduction of a rational curve modulo a good prime."""
    if not has_good_reduction(curve, p):
        raise BadReduction(f"bad reduction at p={p}")
    a = curve.a.numerator * pow(curve.a.denominator, -1, p) % p
    b = curve.b.numerator * pow(curve.b.denominator, -1, p) % p
    return Curve(a, b, p)


def reduce_point(pt, p):
    """Reduction of a rational point modulo p (denominators must be prime to p)."""
    if pt.is_infinity:
        return INFINITY
    x, y = Fraction(pt.x), Fraction(pt.y)
    if x.denominator % p == 0 or y.denominator % p == 0:
        raise BadReduction(f"point denominator divisible by {p}")
    return CurvePoint(
        x.numerator * pow(x.denominator, -1, p) % p,
        y.numerator * pow(y.denominator, -1, p) % p,
    )


def trace_of_frobenius(curve, p):
    """a_p = p + 1 - |E(F_p)| at a good prime; satisfies |a_p| <= 2*sqrt(p)."""
    reduced = reduce_curve(curve, p)
    a_p = p + 1 - point_count(reduced)
    if a_p * a_p > 4 * p:
        raise ArithmeticError(f"Hasse bound violated: a_{p} = {a_p}")
    return a_p
