"""Finite-level lattice machinery: generator pairs of (Z/N)^2, SL2 transfer
with a congruence constraint, orbit enumeration, and the integer-lattice
complement construction.

The transfer criterion is pure arithmetic (equal determinants and a
componentwise congruence); `transfer_witness` performs the exhaustive
search over the congruence subgroup and is what the criterion is checked
against.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .arith import (
    IntMatrix,
    ResidueClass,
    _snf_with_inverses,
    same_column_span,
    saturation,
)
from .config import ORBIT_ITEMS, enum_budget
from .errors import (
    EnumerationTooLarge,
    ModulusMismatch,
    NotSaturated,
    RankDeficientInput,
)
from .modmat import (
    IDENT,
    is_unit,
    mat_det,
    mat_vec,
    sl2_elements,
    sl2_generators,
)

__all__ = [
    "GeneratorPair",
    "FullSL2",
    "CongruenceSL2",
    "ExplicitGenerators",
    "det_pair",
    "transfer_exists",
    "transfer_witness",
    "congruence_elements",
    "orbit_count",
    "complement_morphism",
    "kernel_basis",
]


@dataclass(frozen=True)
class GeneratorPair:
    """An ordered basis (u0, u1) of (Z/N)^2; the determinant must be a unit."""

    modulus: int
    u0: tuple
    u1: tuple

    def __post_init__(self):
        n = self.modulus
        if n < 2:
            raise ValueError("modulus must be >= 2")
        object.__setattr__(self, "u0", (self.u0[0] % n, self.u0[1] % n))
        object.__setattr__(self, "u1", (self.u1[0] % n, self.u1[1] % n))
        det = (self.u0[0] * self.u1[1] - self.u0[1] * self.u1[0]) % n
        if not is_unit(det, n):
            raise ValueError(
                f"det {det} is not a unit mod {n}: not a generator pair"
            )

    def as_matrix(self):
        """Columns u0, u1 as a flat 2x2 tuple."""
        return (self.u0[0], self.u1[0], self.u0[1], self.u1[1])


def det_pair(pair):
    """det(u0, u1) as a residue class mod N."""
    n = pair.modulus
    return ResidueClass(pair.u0[0] * pair.u1[1] - pair.u0[1] * pair.u1[0], n)


@dataclass(frozen=True)
class FullSL2:
    """All of SL2(Z/N)."""


@dataclass(frozen=True)
class CongruenceSL2:
    """The kernel of SL2(Z/N) -> SL2(Z/level); level must divide N."""

    level: int


@dataclass(frozen=True)
class ExplicitGenerators:
    """A subgroup given by a list of determinant-1 matrices mod N."""

    matrices: tuple

    def __post_init__(self):
        object.__setattr__(self, "matrices", tuple(tuple(m) for m in self.matrices))


@lru_cache(maxsize=None)
def congruence_elements(modulus, level):
    """Elements of SL2(Z/modulus) congruent to the identity mod level."""
    if modulus % level:
        raise ModulusMismatch(f"{level} does not divide {modulus}")
    out = []
    for m in sl2_elements(modulus):
        if (
            m[0] % level == 1 % level
            and m[1] % level == 0
            and m[2] % level == 0
            and m[3] % level == 1 % level
        ):
            out.append(m)
    return tuple(out)


def _check_shared_modulus(pair_a, pair_b, level):
    if pair_a.modulus != pair_b.modulus:
        raise ModulusMismatch(
            f"pairs live mod {pair_a.modulus} and {pair_b.modulus}"
        )
    if pair_a.modulus % level:
        raise ModulusMismatch(
            f"congruence level {level} does not divide modulus {pair_a.modulus}"
        )


def transfer_exists(pair_a, pair_b, level):
    """Whether some L in SL2(Z/M) with L = id (mod level) maps pair_a to pair_b.

    Decided by the arithmetic criterion: equal determinants mod M and
    componentwise congruence of the pairs mod level.
    """
    _check_shared_modulus(pair_a, pair_b, level)
    m = pair_a.modulus
    if int(det_pair(pair_a)) != int(det_pair(pair_b)):
        return False
    for va, vb in ((pair_a.u0, pair_b.u0), (pair_a.u1, pair_b.u1)):
        if (va[0] - vb[0]) % level or (va[1] - vb[1]) % level:
            return False
    return True


def transfer_witness(pair_a, pair_b, level):
    """Exhaustive search for the transfer matrix; None when there is none.

    Scans the whole congruence subgroup, so it is only meant for small
    moduli; returns the lexicographically least witness.
    """
    _check_shared_modulus(pair_a, pair_b, level)
    m = pair_a.modulus
    for candidate in congruence_elements(m, level):
        if (
            mat_vec(candidate, pair_a.u0, m) == pair_b.u0
            and mat_vec(candidate, pair_a.u1, m) == pair_b.u1
        ):
            return candidate
    return None


def _det_one_pairs(n):
    """All generator pairs mod n with determinant exactly 1, sorted."""
    vectors = [(x, y) for x in range(n) for y in range(n)]
    pairs = []
    for u0 in vectors:
        for u1 in vectors:
            if (u0[0] * u1[1] - u0[1] * u1[0]) % n == 1:
                pairs.append((u0, u1))
    return pairs


def _acting_generators(n, subgroup):
    if isinstance(subgroup, FullSL2):
        return list(sl2_generators(n))
    if isinstance(subgroup, CongruenceSL2):
        return list(congruence_elements(n, subgroup.level))
    if isinstance(subgroup, ExplicitGenerators):
        mats = [tuple(x % n for x in m) for m in subgroup.matrices]
        for m in mats:
            if mat_det(m, n) != 1 % n:
                raise ValueError(f"generator {m} does not have determinant 1")
        return mats
    raise TypeError(f"unknown subgroup spec {subgroup!r}")


def orbit_count(modulus, subgroup=FullSL2()):
    """Orbits of the subgroup on determinant-1 generator pairs.

    Returns (count, representatives); representatives are the
    lexicographically least pair of each orbit, sorted.
    """
    if modulus**4 > enum_budget(ORBIT_ITEMS):
        raise EnumerationTooLarge(
            f"modulus {modulus} exceeds the pair-enumeration budget"
        )
    pairs = _det_one_pairs(modulus)
    gens = _acting_generators(modulus, subgroup)
    index = {pair: i for i, pair in enumerate(pairs)}
    seen = [False] * len(pairs)
    reps = []
    for start, pair in enumerate(pairs):
        if seen[start]:
            continue
        reps.append(pair)
        stack = [pair]
        seen[start] = True
        while stack:
            u0, u1 = stack.pop()
            for g in gens:
                image = (mat_vec(g, u0, modulus), mat_vec(g, u1, modulus))
                i = index[image]
                if not seen[i]:
                    seen[i] = True
                    stack.append(image)
    reps.sort()
    return len(reps), reps


def complement_morphism(basis, ambient_rank=None):
    """A morphism with the given saturated sublattice as kernel component.

    For a saturated rank-r sublattice of Z^n given by the columns of
    `basis`, returns an (n - r) x n integer matrix f with f * basis = 0,
    rank n - r, and ker f saturating to the column span of `basis`.
    """
    n = basis.rows
    if ambient_rank is not None and ambient_rank != n:
        raise ValueError("ambient rank must equal the row count")
    nonzero_cols = [
        basis.column(j) for j in range(basis.cols) if any(basis.column(j))
    ]
    if not nonzero_cols:
        return IntMatrix.identity(n)
    trimmed = IntMatrix.from_rows(
        [[col[i] for col in nonzero_cols] for i in range(n)]
    )
    u, d, _, _, _ = _snf_with_inverses(trimmed.to_rows())
    diag = [d[i][i] for i in range(min(n, trimmed.cols))]
    rank = sum(1 for x in diag if x)
    if rank < trimmed.cols:
        raise RankDeficientInput("nonzero input columns are linearly dependent")
    if any(x != 1 for x in diag[:rank]):
        raise NotSaturated(
            f"invariant factors {diag[:rank]} are not all 1; saturate first"
        )
    # with U*M*V = D, the rows of U below the pivot block annihilate col-span(M)
    if rank == n:
        return IntMatrix(0, n, ())
    return IntMatrix.from_rows([u[i] for i in range(rank, n)])


def kernel_basis(matrix):
    """Columns spanning {v : matrix * v = 0} over Z.

    With U*M*V = D diagonal, M*(V e_j) = d_j * (U^-1 e_j), so the kernel is
    spanned by the columns of V sitting over zero diagonal entries.
    """
    _, d, v, _, _ = _snf_with_inverses(matrix.to_rows())
    n = matrix.cols
    diag = [d[i][i] if i < min(matrix.rows, n) else 0 for i in range(n)]
    cols = [j for j in range(n) if diag[j] == 0]
    if not cols:
        return IntMatrix(n, 0, ())
    rows = [[v[i][j] for j in cols] for i in range(n)]
    return IntMatrix.from_rows(rows)
