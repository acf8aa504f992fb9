"""Divisibility of a fixed rational point across reductions, and the affine
group model that predicts its density.

For a non-torsion point P and a prime ell, the reduction of P mod p is
divisible by ell in E(F_p) for a positive fraction of primes p.  Whether
it is divisible at p depends only on the conjugacy class of (gamma, t):
gamma the action of Frobenius on the ell-torsion, t the translation it
induces on a fixed ell-th division point of P.  The pair ranges over an
affine group Gamma x| T inside GL2(F_ell) x| F_ell^2, and divisibility at
p says exactly that the affine map v -> gamma v + t has a fixed point.
`model_density` counts those elements exactly; `empirical_density`
measures the real thing over a prime scan.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product

from .arith import factorize, primes_up_to
from .config import MODEL_ITEMS, enum_budget
from .curves import (
    INFINITY,
    add_points,
    curve_discriminant_int,
    group_structure,
    has_good_reduction,
    negate_point,
    on_curve,
    point_count,
    reduce_curve,
    reduce_point,
    scalar_mul,
)
from .errors import (
    BadReduction,
    ConsistencyError,
    ModelTooLarge,
    PointNotOnCurve,
    TorsionPoint,
)
from .modmat import IDENT, group_closure, is_unit, mat_det, mat_vec

__all__ = [
    "DivisibilitySample",
    "AffineGaloisModel",
    "relation_search",
    "is_divisible_mod_p",
    "empirical_density",
    "model_density",
    "full_affine_model",
    "kummer_good_primes",
]


@dataclass(frozen=True)
class DivisibilitySample:
    """Outcome of the division test at a single good prime."""

    prime: int
    ell: int
    divisible: bool
    n1: int
    n2: int


@dataclass(frozen=True)
class AffineGaloisModel:
    """A finite affine group Gamma x| T acting on division data.

    Gamma is generated by `linear_gens` inside GL2(Z/modulus); T is the
    subgroup of ((Z/modulus)^2)^rank generated by `translation_gens` and
    must be stable under the componentwise Gamma action.  The modulus is a
    prime for density work and may be a prime power for truncated-level
    matching.
    """

    modulus: int
    rank: int
    linear_gens: tuple
    translation_gens: tuple

    def __post_init__(self):
        q = self.modulus
        object.__setattr__(
            self,
            "linear_gens",
            tuple(tuple(x % q for x in g) for g in self.linear_gens),
        )
        object.__setattr__(
            self,
            "translation_gens",
            tuple(
                tuple((v[0] % q, v[1] % q) for v in t)
                for t in self.translation_gens
            ),
        )
        for g in self.linear_gens:
            if not is_unit(mat_det(g, q), q):
                raise ValueError(f"linear generator {g} is not invertible mod {q}")
        for t in self.translation_gens:
            if len(t) != self.rank:
                raise ValueError("translation generators must have one vector per generator index")
        for g in self.linear_gens:
            for t in self.translations:
                moved = tuple(mat_vec(g, v, q) for v in t)
                if moved not in self._translation_set:
                    raise ValueError(
                        "translation part is not stable under the linear part"
                    )

    @cached_property
    def linear_elements(self):
        return tuple(group_closure(self.linear_gens, self.modulus))

    @cached_property
    def translations(self):
        """All elements of T, sorted."""
        q = self.modulus
        zero = tuple(((0, 0)) for _ in range(self.rank))
        els = {zero}
        frontier = [zero]
        while frontier:
            new = []
            for g in self.translation_gens:
                for h in frontier:
                    s = tuple(
                        ((g[i][0] + h[i][0]) % q, (g[i][1] + h[i][1]) % q)
                        for i in range(self.rank)
                    )
                    if s not in els:
                        els.add(s)
                        new.append(s)
            frontier = new
        return tuple(sorted(els))

    @cached_property
    def _translation_set(self):
        return frozenset(self.translations)


def full_affine_model(ell, rank=1):
    """GL2(F_ell) with the full translation group: the generic expectation."""
    shear = (1, 1, 0, 1)
    rot = (0, ell - 1, 1, 0)
    # a determinant generator on top of SL2 gives all of GL2
    gens = [shear, rot]
    for u in range(2, ell):
        if _is_primitive_root(u, ell):
            gens.append((u % ell, 0, 0, 1))
            break
    basis = []
    for i in range(rank):
        for e in ((1, 0), (0, 1)):
            vec = tuple(e if j == i else (0, 0) for j in range(rank))
            basis.append(vec)
    return AffineGaloisModel(ell, rank, tuple(gens), tuple(basis))


def _is_primitive_root(u, p):
    order = p - 1
    for q in factorize(order):
        if pow(u, order // q, p) == 1:
            return False
    return True


def kummer_good_primes(curve, point, ell, bound):
    """Primes used for density scans: p > 3, good, and prime to ell * disc
    and to the point's denominators."""
    for p in primes_up_to(bound):
        if p <= 3 or p == ell:
            continue
        if not has_good_reduction(curve, p):
            continue
        if not point.is_infinity:
            if point.x.denominator % p == 0 or point.y.denominator % p == 0:
                continue
        yield p


def relation_search(curve, points, coeff_bound):
    """Smallest integer relation among the points, or None.

    Scans coefficient vectors c with |c_i| <= coeff_bound in lexicographic
    order and returns the first c (sign-normalised so its first nonzero
    entry is positive) with sum c_i P_i = infinity, verified in exact
    rational arithmetic.  A None result is cross-checked modulo three good
    primes: a rational relation would survive reduction, so a coefficient
    vector that kills the points mod every test prime exposes an
    arithmetic inconsistency.
    """
    if coeff_bound < 1:
        raise ValueError("coeff_bound must be >= 1")
    for pt in points:
        if not on_curve(curve, pt):
            raise PointNotOnCurve(f"{pt!r} is not on {curve!r}")
    n = len(points)
    if n == 0:
        return None

    multiples = []
    for pt in points:
        table = {0: INFINITY}
        acc = INFINITY
        for k in range(1, coeff_bound + 1):
            acc = add_points(curve, acc, pt)
            table[k] = acc
            table[-k] = negate_point(curve, acc)
        multiples.append(table)

    def combination(coeffs, tables):
        total = INFINITY
        for c, table in zip(coeffs, tables):
            total = add_points(curve, total, table[c])
        return total

    candidates = product(range(-coeff_bound, coeff_bound + 1), repeat=n)
    for coeffs in candidates:
        if all(c == 0 for c in coeffs):
            continue
        if combination(coeffs, multiples).is_infinity:
            first = next(c for c in coeffs if c)
            if first < 0:
                coeffs = tuple(-c for c in coeffs)
            return coeffs

    # cross-check the negative result modulo three good primes
    check_primes = []
    for p in kummer_good_primes(curve, points[0] if points else INFINITY, 1, 10**4):
        if all(
            pt.is_infinity
            or (pt.x.denominator % p and pt.y.denominator % p)
            for pt in points
        ):
            check_primes.append(p)
        if len(check_primes) == 3:
            break
    for coeffs in product(range(-coeff_bound, coeff_bound + 1), repeat=n):
        if all(c == 0 for c in coeffs):
            continue
        holds_everywhere = True
        for p in check_primes:
            ep = reduce_curve(curve, p)
            total = INFINITY
            for c, pt in zip(coeffs, points):
                total = add_points(ep, total, scalar_mul(ep, c, reduce_point(pt, p)))
            if not total.is_infinity:
                holds_everywhere = False
                break
        if holds_everywhere and check_primes:
            raise ConsistencyError(
                f"relation {coeffs} vanishes mod {check_primes} but not over Q"
            )
    return None


def is_divisible_mod_p(curve, point, ell, p):
    """Does the reduction of `point` lie in ell * E(F_p)?

    Solved on the ell-Sylow subgroup: with E(F_p) = Z/n1 x Z/n2 and
    generators (g2, g1), the odd-part projection of the point is expressed
    in Sylow coordinates by a two-dimensional baby-step giant-step walk,
    and divisibility reads off the coordinates.
    """
    if not on_curve(curve, point):
        raise PointNotOnCurve(f"{point!r} is not on {curve!r}")
    if not has_good_reduction(curve, p):
        raise BadReduction(f"bad reduction at {p}")
    ep = reduce_curve(curve, p)
    pbar = reduce_point(point, p)
    structure = group_structure(ep)
    n1, n2 = structure.n1, structure.n2
    m = n1 * n2

    def sample(divisible):
        return DivisibilitySample(p, ell, divisible, n1, n2)

    e1 = _valuation(n1, ell)
    e2 = _valuation(n2, ell)
    if e1 + e2 == 0:
        return sample(True)  # multiplication by ell is a bijection
    cofactor = m // ell ** (e1 + e2)
    target = scalar_mul(ep, cofactor, pbar)
    g2, g1 = structure.generators
    h2 = scalar_mul(ep, n2 // ell**e2, g2)
    h1 = scalar_mul(ep, n1 // ell**e1, g1) if e1 else INFINITY

    # baby steps over <h1>, giant steps over <h2>
    baby = {}
    acc = INFINITY
    for i in range(ell**e1):
        baby.setdefault(acc, i)
        acc = add_points(ep, acc, h1)
    step = negate_point(ep, h2)
    cur = target
    for j in range(ell**e2):
        if cur in baby:
            i = baby[cur]
            return sample(i % ell == 0 and j % ell == 0)
        cur = add_points(ep, cur, step)
    raise ConsistencyError(
        f"point {pbar!r} not found in the ell-Sylow decomposition at p={p}"
    )


def _valuation(n, q):
    v = 0
    while n % q == 0:
        n //= q
        v += 1
    return v


def empirical_density(curve, point, ell, prime_bound):
    """Fraction of good primes p <= bound at which the point is divisible.

    The point must be non-torsion; this is checked first with a
    coefficient-12 relation search, which covers every rational torsion
    order.
    """
    if relation_search(curve, [point], 12) is not None:
        raise TorsionPoint(f"{point!r} is torsion; density needs infinite order")
    divisible = 0
    samples = 0
    for p in kummer_good_primes(curve, point, ell, prime_bound):
        samples += 1
        if is_divisible_mod_p(curve, point, ell, p).divisible:
            divisible += 1
    if samples == 0:
        raise ValueError("no good primes below the bound")
    return Fraction(divisible, samples), samples


def model_density(model):
    """Exact fraction of affine elements (gamma, t) with a fixed point.

    v -> gamma v + t has a fixed point iff t lies in the image of
    (1 - gamma); for rank > 1 every component vector must.  Enumerates the
    whole affine group, so the group size is bounded by the enumeration
    budget.
    """
    q = model.modulus
    try:
        linear = model.linear_elements
    except OverflowError:
        raise ModelTooLarge("linear part exceeds the closure budget")
    translations = model.translations
    total = len(linear) * len(translations)
    if total > enum_budget(MODEL_ITEMS):
        raise ModelTooLarge(f"affine group has {total} elements")
    favourable = 0
    vectors = [(x, y) for x in range(q) for y in range(q)]
    for gamma in linear:
        one_minus = (
            (1 - gamma[0]) % q,
            (-gamma[1]) % q,
            (-gamma[2]) % q,
            (1 - gamma[3]) % q,
        )
        image = {mat_vec(one_minus, v, q) for v in vectors}
        for t in translations:
            if all(v in image for v in t):
                favourable += 1
    return Fraction(favourable, total)
