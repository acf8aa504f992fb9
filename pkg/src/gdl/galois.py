"""Frobenius signatures mod ell and surjectivity evidence for the mod-ell
image of the Galois representation attached to a rational elliptic curve.

A signature at a good prime p is the pair (a_p mod ell, p mod ell): the
trace and determinant of Frobenius acting on the ell-torsion.  Scanning
many primes and asking which subgroups of GL2(F_ell) could produce every
observed signature gives finite, checkable evidence for the image being
all of GL2(F_ell).

Two regimes:

* ell >= 5 uses trace/determinant witnesses that rule out each type of
  maximal subgroup (Borel, split/nonsplit Cartan normalizer, exceptional).
  An element with nonsquare discriminant and nonzero trace cannot sit in a
  Borel or split Cartan normalizer; one with nonzero square discriminant
  and nonzero trace cannot sit in a nonsplit Cartan normalizer; one whose
  trace^2/det avoids {0, 1, 2, 4} and the roots of u^2 - 3u + 1 cannot sit
  over a projective subgroup of order <= 5 elements' worth of structure,
  i.e. an exceptional group.

* ell in {2, 3} is different: every (trace, det) class of the full group
  is already realized inside a proper subgroup (the nonsplit Cartan of
  GL2(F_2) realizes both classes, and trace^2/det mod 3 never leaves
  {0, 1, 2}).  Here the scan additionally records the number of rational
  ell-torsion points at each prime - the size of the Frobenius fixed
  space on the ell-torsion, which is conjugacy-class data - and the
  verdict eliminates, by exhaustive enumeration, every proper subgroup
  of GL2(F_ell) with full determinant that realizes all witnessed
  (trace, det, fixed-count) triples.

"Surjective" is only ever claimed mod ell.  Inconclusive is a valid
outcome and carries the list of surviving maximal-subgroup types.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .arith import ResidueClass, legendre_symbol, primes_up_to
from .curves import (
    curve_discriminant_int,
    division_polynomial,
    has_good_reduction,
    point_count,
    reduce_curve,
    trace_of_frobenius,
)
from .errors import BadReduction
from .modmat import mat_mul

__all__ = [
    "BOREL",
    "SPLIT_NORMALIZER",
    "NONSPLIT_NORMALIZER",
    "EXCEPTIONAL",
    "FrobeniusSignature",
    "ImageReport",
    "frobenius_signature",
    "mod_ell_image",
    "collect_evidence",
    "evaluate_evidence",
    "good_primes",
]

BOREL = "borel"
SPLIT_NORMALIZER = "split_cartan_normalizer"
NONSPLIT_NORMALIZER = "nonsplit_cartan_normalizer"
EXCEPTIONAL = "exceptional"
_ALL_TYPES = (BOREL, SPLIT_NORMALIZER, NONSPLIT_NORMALIZER, EXCEPTIONAL)

ALLOWED_ELLS = (2, 3, 5, 7, 11, 13)


@dataclass(frozen=True)
class FrobeniusSignature:
    """(trace, det) of Frobenius at p on the ell-torsion."""

    prime: int
    ell: int
    trace: ResidueClass
    det: ResidueClass


@dataclass(frozen=True)
class ImageReport:
    ell: int
    prime_bound: int
    signatures: tuple
    verdict: str  # "surjective" | "inconclusive"
    surviving: tuple

    def to_json_dict(self):
        return {
            "ell": self.ell,
            "prime_bound": self.prime_bound,
            "signatures": [
                [s.prime, int(s.trace), int(s.det)] for s in self.signatures
            ],
            "verdict": self.verdict,
            "surviving": list(self.surviving),
        }


def good_primes(curve, ell, bound):
    """Good primes p <= bound with p > ell and p not dividing ell * disc."""
    for p in primes_up_to(bound):
        if p <= ell:
            continue
        if has_good_reduction(curve, p):
            yield p


def frobenius_signature(curve, p, ell):
    """Signature at a single good prime p != ell."""
    if p == ell:
        raise BadReduction(f"p = ell = {p}")
    if not has_good_reduction(curve, p):
        raise BadReduction(f"bad reduction at {p}")
    a_p = trace_of_frobenius(curve, p)
    return FrobeniusSignature(p, ell, ResidueClass(a_p, ell), ResidueClass(p, ell))


def _torsion_fix_count(curve_fp, ell):
    """|E(F_p)[ell]|: the size of the Frobenius fixed space on the ell-torsion."""
    p = curve_fp.p
    x = np.arange(p, dtype=np.int64)
    rhs = (x * x % p * x + curve_fp.a * x + curve_fp.b) % p
    if ell == 2:
        return 1 + int((rhs == 0).sum())
    psi = division_polynomial(curve_fp, ell)
    acc = np.full(p, int(psi.coeffs[-1]) % p, dtype=np.int64)
    for c in reversed(psi.coeffs[:-1]):
        acc = (acc * x + int(c)) % p
    roots = acc == 0
    sq = np.zeros(p, dtype=bool)
    y = np.arange(1, (p - 1) // 2 + 1, dtype=np.int64)
    sq[y * y % p] = True
    return 1 + 2 * int((roots & sq[rhs]).sum())


def collect_evidence(curve, ell, prime_bound):
    """Signatures (and, for ell <= 3, torsion fixed counts) over the scan."""
    signatures = []
    fix_counts = []
    for p in good_primes(curve, ell, prime_bound):
        reduced = reduce_curve(curve, p)
        a_p = p + 1 - point_count(reduced)
        signatures.append(
            FrobeniusSignature(p, ell, ResidueClass(a_p, ell), ResidueClass(p, ell))
        )
        if ell <= 3:
            fix_counts.append(_torsion_fix_count(reduced, ell))
    return tuple(signatures), tuple(fix_counts)


# ---------------------------------------------------------------------------
# ell >= 5: witness classes that rule out each maximal type


def _killed_types(ell, signatures):
    killed = set()
    for sig in signatures:
        tr, det = int(sig.trace), int(sig.det)
        disc = (tr * tr - 4 * det) % ell
        chi = legendre_symbol(disc, ell)
        if chi == -1:
            killed.add(BOREL)
            if tr:
                killed.add(SPLIT_NORMALIZER)
        if chi == 1 and tr:
            killed.add(NONSPLIT_NORMALIZER)
        if tr and disc:
            u = tr * tr * pow(det, -1, ell) % ell
            if u not in (0, 1, 2, 4) and (u * u - 3 * u + 1) % ell:
                killed.add(EXCEPTIONAL)
    return killed


# ---------------------------------------------------------------------------
# ell in {2, 3}: exhaustive subgroup elimination


def _gl2(ell):
    out = []
    for a in range(ell):
        for b in range(ell):
            for c in range(ell):
                for d in range(ell):
                    if (a * d - b * c) % ell:
                        out.append((a, b, c, d))
    return out


def _fix_space_size(g, ell):
    count = 0
    for v0 in range(ell):
        for v1 in range(ell):
            if (
                (g[0] * v0 + g[1] * v1) % ell == v0
                and (g[2] * v0 + g[3] * v1) % ell == v1
            ):
                count += 1
    return count


def _triple(g, ell):
    return ((g[0] + g[3]) % ell, (g[0] * g[3] - g[1] * g[2]) % ell, _fix_space_size(g, ell))


def _mulclose(gens, ell):
    els = {(1, 0, 0, 1)}
    frontier = [(1, 0, 0, 1)]
    while frontier:
        new = []
        for g in gens:
            for h in frontier:
                prod = mat_mul(g, h, ell)
                if prod not in els:
                    els.add(prod)
                    new.append(prod)
        frontier = new
    return frozenset(els)


@lru_cache(maxsize=None)
def _small_ell_tables(ell):
    """Subgroup and maximal-family tables for GL2(F_ell), ell in {2, 3}.

    Returns (proper_fulldet, triples, families) where proper_fulldet is
    every proper subgroup with surjective determinant, triples maps each
    subgroup to its realizable (trace, det, fix) set, and families maps a
    type name to the set of maximal subgroups of that type.
    """
    if ell not in (2, 3):
        raise ValueError("subgroup tables are only built for ell in {2, 3}")
    elements = _gl2(ell)
    units = {u for u in range(1, ell)}

    # subgroup lattice by closure walk
    subgroups = {}
    trivial = frozenset({(1, 0, 0, 1)})
    subgroups[trivial] = ((1, 0, 0, 1),)
    queue = [trivial]
    while queue:
        sub = queue.pop()
        gens = subgroups[sub]
        for g in elements:
            if g in sub:
                continue
            bigger = _mulclose(gens + (g,), ell)
            if bigger not in subgroups:
                subgroups[bigger] = gens + (g,)
                queue.append(bigger)

    full = frozenset(elements)
    proper_fulldet = sorted(
        (
            s
            for s in subgroups
            if s != full and {(g[0] * g[3] - g[1] * g[2]) % ell for g in s} == units
        ),
        key=sorted,
    )
    triples = {s: frozenset(_triple(g, ell) for g in s) for s in proper_fulldet}

    # standard maximal subgroups and all their conjugates
    lines = [(1, t) for t in range(ell)] + [(0, 1)]

    def stabilizes(g, line):
        image = ((g[0] * line[0] + g[1] * line[1]) % ell, (g[2] * line[0] + g[3] * line[1]) % ell)
        return (image[0] * line[1] - image[1] * line[0]) % ell == 0

    borels = {
        frozenset(g for g in elements if stabilizes(g, line)) for line in lines
    }
    split_normalizers = set()
    for i in range(len(lines)):
        for j in range(i + 1, len(lines)):
            li, lj = lines[i], lines[j]
            members = frozenset(
                g
                for g in elements
                if (stabilizes(g, li) and stabilizes(g, lj))
                or (_maps_line(g, li, lj, ell) and _maps_line(g, lj, li, ell))
            )
            split_normalizers.add(members)
    # nonsplit Cartan: span of an irreducible companion matrix
    companion = None
    for t in range(ell):
        for d in range(1, ell):
            if legendre_symbol((t * t - 4 * d) % ell, ell) == -1 or (
                ell == 2 and t == 1 and d == 1
            ):
                companion = (0, (-d) % ell, 1, t)
                break
        if companion:
            break
    cns_elems = set()
    for a in range(ell):
        for b in range(ell):
            m = (
                (a + b * companion[0]) % ell,
                (b * companion[1]) % ell,
                (b * companion[2]) % ell,
                (a + b * companion[3]) % ell,
            )
            if (m[0] * m[3] - m[1] * m[2]) % ell:
                cns_elems.add(m)
    cns = frozenset(cns_elems)
    normalizer = frozenset(
        g
        for g in elements
        if all(
            mat_mul(mat_mul(g, c, ell), _inv2(g, ell), ell) in cns for c in cns
        )
    )
    nonsplit_normalizers = set()
    for g in elements:
        gi = _inv2(g, ell)
        nonsplit_normalizers.add(
            frozenset(mat_mul(mat_mul(g, h, ell), gi, ell) for h in normalizer)
        )

    families = {
        BOREL: borels,
        SPLIT_NORMALIZER: split_normalizers,
        NONSPLIT_NORMALIZER: nonsplit_normalizers,
    }
    return tuple(proper_fulldet), triples, families


def _maps_line(g, src, dst, ell):
    image = (
        (g[0] * src[0] + g[1] * src[1]) % ell,
        (g[2] * src[0] + g[3] * src[1]) % ell,
    )
    return (image[0] * dst[1] - image[1] * dst[0]) % ell == 0


def _inv2(g, ell):
    det = (g[0] * g[3] - g[1] * g[2]) % ell
    inv = pow(det, -1, ell)
    return ((g[3] * inv) % ell, (-g[1] * inv) % ell, (-g[2] * inv) % ell, (g[0] * inv) % ell)


def _classify_subgroup(sub, families):
    names = [
        name
        for name in (BOREL, SPLIT_NORMALIZER, NONSPLIT_NORMALIZER)
        if any(sub <= member for member in families[name])
    ]
    return names or [EXCEPTIONAL]


def evaluate_evidence(ell, signatures, fix_counts=()):
    """(verdict, surviving types) from collected evidence."""
    if ell >= 5:
        killed = _killed_types(ell, signatures)
        surviving = tuple(t for t in _ALL_TYPES if t not in killed)
    else:
        proper, triples, families = _small_ell_tables(ell)
        witnessed = {
            (int(s.trace), int(s.det), f) for s, f in zip(signatures, fix_counts)
        }
        survivors = [s for s in proper if witnessed <= triples[s]]
        names = set()
        for s in survivors:
            names.update(_classify_subgroup(s, families))
        surviving = tuple(t for t in _ALL_TYPES if t in names)
    verdict = "surjective" if not surviving else "inconclusive"
    return verdict, surviving


def mod_ell_image(curve, ell, prime_bound):
    """Scan good primes up to the bound and report the image evidence."""
    if ell not in ALLOWED_ELLS:
        raise ValueError(f"ell must be one of {ALLOWED_ELLS}")
    if prime_bound < 100:
        raise ValueError("prime_bound must be at least 100")
    signatures, fix_counts = collect_evidence(curve, ell, prime_bound)
    verdict, surviving = evaluate_evidence(ell, signatures, fix_counts)
    return ImageReport(ell, prime_bound, signatures, verdict, surviving)
