"""2x2 matrices over Z/qZ as flat tuples (a, b, c, d) = [[a, b], [c, d]].

Shared by the lattice, image and matching code.  Group enumeration comes in
two flavours on purpose: closure from generators (used by the library) and
brute-force filtering of all q^4 tuples (used as the exhaustive oracle in
tests).
"""

from math import gcd

__all__ = [
    "IDENT",
    "mat_mul",
    "mat_vec",
    "mat_det",
    "mat_inv",
    "mat_mod",
    "is_unit",
    "sl2_generators",
    "sl2_elements",
    "gl2_elements",
    "unit_det_elements",
    "group_closure",
]

IDENT = (1, 0, 0, 1)


def mat_mod(m, q):
    return (m[0] % q, m[1] % q, m[2] % q, m[3] % q)


def mat_mul(m, n, q):
    return (
        (m[0] * n[0] + m[1] * n[2]) % q,
        (m[0] * n[1] + m[1] * n[3]) % q,
        (m[2] * n[0] + m[3] * n[2]) % q,
        (m[2] * n[1] + m[3] * n[3]) % q,
    )


def mat_vec(m, v, q):
    return ((m[0] * v[0] + m[1] * v[1]) % q, (m[2] * v[0] + m[3] * v[1]) % q)


def mat_det(m, q):
    return (m[0] * m[3] - m[1] * m[2]) % q


def is_unit(x, q):
    return gcd(x % q, q) == 1


def mat_inv(m, q):
    """Inverse of a matrix with unit determinant mod q."""
    det = mat_det(m, q)
    inv = pow(det, -1, q)
    return ((m[3] * inv) % q, (-m[1] * inv) % q, (-m[2] * inv) % q, (m[0] * inv) % q)


def sl2_generators(q):
    """The shear and rotation matrices, which generate SL2(Z/q)."""
    return ((1, 1, 0, 1), (0, q - 1, 1, 0))


def group_closure(gens, q, budget=None):
    """Multiplicative closure of gens inside GL2(Z/q), sorted."""
    els = {IDENT}
    frontier = [IDENT]
    gens = [mat_mod(g, q) for g in gens]
    while frontier:
        new = []
        for g in gens:
            for h in frontier:
                prod = mat_mul(g, h, q)
                if prod not in els:
                    els.add(prod)
                    new.append(prod)
                    if budget is not None and len(els) > budget:
                        raise OverflowError("closure exceeds budget")
        frontier = new
    return sorted(els)


def sl2_elements(q):
    """All of SL2(Z/q), generated by closure (tests re-derive it by filtering)."""
    return group_closure(sl2_generators(q), q)


def gl2_elements(q):
    """All of GL2(Z/q), by filtering (only sensible for small q)."""
    out = []
    for a in range(q):
        for b in range(q):
            for c in range(q):
                for d in range(q):
                    if is_unit(a * d - b * c, q):
                        out.append((a, b, c, d))
    return out


def unit_det_elements(q):
    """Matrices with determinant +-1 mod q (the truncated basis changes)."""
    targets = {1 % q, (q - 1) % q}
    return [m for m in gl2_elements(q) if mat_det(m, q) in targets]
