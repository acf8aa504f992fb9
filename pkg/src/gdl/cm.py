"""Imaginary quadratic orders, their residue rings, and orbit counts.

An order of discriminant D < 0 has Z-basis (1, w) with w = sqrt(D)/2 for
D = 0 (mod 4) and w = (1 + sqrt(D))/2 for D = 1 (mod 4).  Residues mod N
are written a + b*w and multiplied through w^2 = s + t*w.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, isqrt

from .errors import NonMaximalModulus, NotUnits

__all__ = [
    "QuadOrder",
    "ResidueRingUnits",
    "unit_group",
    "orbit_count_cm",
    "unit_matrix",
    "subgroup_closure",
]


def _is_fundamental(d):
    if d % 4 == 1:
        return _squarefree(d)
    if d % 4 == 0:
        m = d // 4
        return _squarefree(m) and (-m) % 4 in (1, 2)  # m = 2 or 3 mod 4 for d<0
    return False


def _squarefree(d):
    d = abs(d)
    for k in range(2, isqrt(d) + 1):
        if d % (k * k) == 0:
            return False
    return True


@dataclass(frozen=True)
class QuadOrder:
    """The imaginary quadratic order of discriminant D (D < 0, D = 0,1 mod 4)."""

    discriminant: int

    def __post_init__(self):
        d = self.discriminant
        if d >= 0 or d % 4 not in (0, 1):
            raise ValueError(f"{d} is not the discriminant of an imaginary order")

    @property
    def omega_square(self):
        """(s, t) with w^2 = s + t*w."""
        d = self.discriminant
        if d % 4 == 0:
            return d // 4, 0
        return (d - 1) // 4, 1

    @property
    def conductor(self):
        """f with D = f^2 * D0 for the fundamental discriminant D0."""
        d = self.discriminant
        f = 1
        for k in range(2, isqrt(abs(d)) + 1):
            if d % (k * k) == 0 and (d // (k * k)) % 4 in (0, 1):
                if _is_fundamental(d // (k * k)):
                    f = max(f, k)
        return f if not _is_fundamental(d) else 1

    def mul(self, x, y, n):
        """(a + b*w)(c + d*w) mod n, as a coefficient pair."""
        s, t = self.omega_square
        a, b = x
        c, d = y
        return ((a * c + b * d * s) % n, (a * d + b * c + b * d * t) % n)

    def norm(self, x):
        """Norm of a + b*w (the determinant of multiplication by it)."""
        s, t = self.omega_square
        a, b = x
        return a * a + a * b * t - b * b * s


@dataclass(frozen=True)
class ResidueRingUnits:
    """The unit group of (O/NO)* with an explicit element list."""

    modulus: int
    order: int
    representatives: tuple

    def __post_init__(self):
        if self.order != len(self.representatives):
            raise ValueError("declared order disagrees with the element list")


def _require_coprime_conductor(order, n):
    f = order.conductor
    if gcd(n, f) != 1:
        raise NonMaximalModulus(
            f"modulus {n} shares a factor with the conductor {f}; "
            "only the maximal-order part of the ring is supported"
        )


def unit_group(order, n):
    """All units of O/NO, found by enumerating the N^2 residues."""
    if n < 2:
        raise ValueError("modulus must be >= 2")
    _require_coprime_conductor(order, n)
    reps = []
    for a in range(n):
        for b in range(n):
            if gcd(order.norm((a, b)), n) == 1:
                reps.append((a, b))
    return ResidueRingUnits(n, len(reps), tuple(reps))


def subgroup_closure(order, n, generators):
    """Multiplicative closure of the generators inside (O/NO)*."""
    one = (1 % n, 0)
    els = {one}
    frontier = [one]
    gens = [(g[0] % n, g[1] % n) for g in generators]
    while frontier:
        new = []
        for g in gens:
            for h in frontier:
                prod = order.mul(g, h, n)
                if prod not in els:
                    els.add(prod)
                    new.append(prod)
        frontier = new
    return els


def orbit_count_cm(order, n, generators):
    """Orbits of the subgroup generated by `generators` on module generators.

    The module generators of the free rank-1 module O/NO are exactly the
    units, and a subgroup H of (O/NO)* acts on them freely by
    multiplication, so the orbit count is the index [(O/NO)* : H].
    """
    units = unit_group(order, n)
    unit_set = set(units.representatives)
    for g in generators:
        if ((g[0]) % n, (g[1]) % n) not in unit_set:
            raise NotUnits(f"generator {tuple(g)} is not a unit mod {n}")
    subgroup = subgroup_closure(order, n, generators)
    if units.order % len(subgroup):
        raise ArithmeticError("subgroup order does not divide the unit-group order")
    return units.order // len(subgroup)


def unit_matrix(order, x, n):
    """Multiplication by a + b*w on the basis (1, w) as a 2x2 matrix mod n.

    Used to let a CM unit group act on truncated torsion coordinates.
    """
    s, t = order.omega_square
    a, b = x[0] % n, x[1] % n
    return (a % n, b * s % n, b % n, (a + b * t) % n)
