"""Matching of truncated extension data by a back-and-forth construction.

The objects here are finite stand-ins for a uniquely divisible extension of
the point group by a rank-2 kernel, cut off at level q = ell^m:

* the kernel basis becomes a GeneratorPair mod q: the coordinates, in a
  fixed reference basis of the q-torsion, of the images of the two kernel
  generators under q-fold division;
* each of r module generators contributes a division vector in (Z/q)^2:
  the offset of its chosen q-th division point from a fixed reference
  division point;
* the Galois side becomes an explicit affine group: a linear part acting
  on torsion coordinates and a translation part moving division vectors
  (the finite shadow of the divisibility theory that feeds the inductive
  steps).

Matching extension data V and W means finding sigma = (gamma, tau) in the
affine group and a basis change A with determinant +-1 mod q (the
truncation of an integral basis change) such that

    gamma * B_V = B_W * A          (base step)
    gamma * d_i + tau_i = d'_i     (one inductive step per generator).

`base_step` resolves the first equation - it can only fail on a
determinant-class obstruction - and `inductive_step` bridges one division
vector at a time using translations that fix everything matched so far.
Generators are consumed alternately from the two ends of the index list
(the "back" steps select from the far side), which is what a surjectivity-
forcing construction looks like at finite level; with generator lists
paired by index the alternation affects the trace and the chosen bridges,
never the existence of a match.  `orbit_census` exhaustively enumerates
all extension data and counts orbits of the simultaneous action, which
cross-validates `run_match`: two data sets match exactly when they share
an orbit.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from . import cm
from .config import CENSUS_MODULUS, CENSUS_RANK, enum_budget
from .errors import EnumerationTooLarge, KummerDeficient, NoMatch
from .kummer import AffineGaloisModel
from .lattices import GeneratorPair
from .modmat import (
    IDENT,
    gl2_elements,
    mat_det,
    mat_inv,
    mat_mul,
    mat_vec,
    sl2_generators,
)

__all__ = [
    "TruncatedExtension",
    "MatchState",
    "MatchResult",
    "base_step",
    "inductive_step",
    "run_match",
    "orbit_census",
    "preset_model",
]


@dataclass(frozen=True)
class TruncatedExtension:
    """Extension data at level ell^level: a kernel basis pair mod ell^level
    plus one division vector per module generator."""

    ell: int
    level: int
    basis: GeneratorPair
    division: tuple

    def __post_init__(self):
        q = self.ell**self.level
        if self.basis.modulus != q:
            raise ValueError(
                f"basis modulus {self.basis.modulus} != ell^level = {q}"
            )
        object.__setattr__(
            self,
            "division",
            tuple((v[0] % q, v[1] % q) for v in self.division),
        )

    @property
    def modulus(self):
        return self.ell**self.level

    @property
    def rank(self):
        return len(self.division)

    def basis_matrix(self):
        return self.basis.as_matrix()


@dataclass(frozen=True)
class MatchState:
    """Partial match: matched generator indices, the basis change h, the
    per-generator bridge translations, and sigma = (linear, translation)."""

    matched: tuple
    h_matrix: tuple
    corrections: tuple
    sigma_linear: tuple
    sigma_translation: tuple


@dataclass(frozen=True)
class MatchResult:
    h_matrix: tuple
    corrections: tuple
    sigma_linear: tuple
    sigma_translation: tuple
    trace: tuple


def _check_shapes(ext_v, ext_w, model):
    if (ext_v.ell, ext_v.level, ext_v.rank) != (ext_w.ell, ext_w.level, ext_w.rank):
        raise ValueError("extensions must share (ell, level, rank)")
    if model.modulus != ext_v.modulus or model.rank != ext_v.rank:
        raise ValueError("model does not act on these extensions")


def base_step(ext_v, ext_w, model):
    """Match the basis pairs: find gamma in the linear part and a basis
    change A with det +-1 such that gamma * B_V = B_W * A.

    The identity is tried first, then the linear part in lexicographic
    order, so the witness is deterministic.  Fails only when the two
    determinant classes differ by something outside the available
    determinants: that is the NoMatch obstruction.
    """
    _check_shapes(ext_v, ext_w, model)
    q = ext_v.modulus
    b_v = ext_v.basis_matrix()
    b_w_inv = mat_inv(ext_w.basis_matrix(), q)
    targets = {1 % q, (q - 1) % q}
    candidates = [IDENT] + [g for g in model.linear_elements if g != IDENT]
    for gamma in candidates:
        h = mat_mul(b_w_inv, mat_mul(gamma, b_v, q), q)
        if mat_det(h, q) in targets:
            zero = tuple((0, 0) for _ in range(ext_v.rank))
            return MatchState((), h, (), gamma, zero)
    raise NoMatch(
        int(mat_det(b_v, q)),
        int(mat_det(ext_w.basis_matrix(), q)),
    )


def inductive_step(state, ext_v, ext_w, model, index):
    """Extend the match to generator `index`.

    Needs a translation that fixes every already-matched division vector
    and moves generator `index` by exactly the current gap; the
    lexicographically least such element of the translation part is used.
    """
    _check_shapes(ext_v, ext_w, model)
    if index in state.matched:
        raise ValueError(f"generator {index} already matched")
    q = ext_v.modulus
    gamma = state.sigma_linear
    tau = state.sigma_translation
    current = mat_vec(gamma, ext_v.division[index], q)
    current = ((current[0] + tau[index][0]) % q, (current[1] + tau[index][1]) % q)
    goal = ext_w.division[index]
    gap = ((goal[0] - current[0]) % q, (goal[1] - current[1]) % q)
    bridge = None
    for t in model.translations:
        if t[index] != gap:
            continue
        if any(t[j] != (0, 0) for j in state.matched):
            continue
        bridge = t
        break
    if bridge is None:
        raise KummerDeficient(index, gap)
    new_tau = tuple(
        ((tau[i][0] + bridge[i][0]) % q, (tau[i][1] + bridge[i][1]) % q)
        for i in range(ext_v.rank)
    )
    return MatchState(
        state.matched + (index,),
        state.h_matrix,
        state.corrections + (gap,),
        gamma,
        new_tau,
    )


def _diagram_holds(state, ext_v, ext_w):
    q = ext_v.modulus
    lhs = mat_mul(state.sigma_linear, ext_v.basis_matrix(), q)
    rhs = mat_mul(ext_w.basis_matrix(), state.h_matrix, q)
    if lhs != rhs:
        return False
    for i in state.matched:
        moved = mat_vec(state.sigma_linear, ext_v.division[i], q)
        moved = (
            (moved[0] + state.sigma_translation[i][0]) % q,
            (moved[1] + state.sigma_translation[i][1]) % q,
        )
        if moved != ext_w.division[i]:
            return False
    return True


def run_match(ext_v, ext_w, model):
    """Full match: base step, then one inductive step per generator,
    consuming indices alternately from the front (forth) and the back
    (back).  Raises NoMatch or KummerDeficient; on success the diagram
    condition is re-verified on every stored datum before returning."""
    state = base_step(ext_v, ext_w, model)
    trace = [
        {
            "step": "base",
            "sigma_linear": list(state.sigma_linear),
            "h": list(state.h_matrix),
        }
    ]
    remaining = list(range(ext_v.rank))
    forth = True
    while remaining:
        index = remaining.pop(0) if forth else remaining.pop()
        side = "forth" if forth else "back"
        state = inductive_step(state, ext_v, ext_w, model, index)
        trace.append(
            {
                "step": f"generator {index}",
                "side": side,
                "bridge": list(state.corrections[-1]),
            }
        )
        forth = not forth
    if not _diagram_holds(state, ext_v, ext_w):
        raise AssertionError("internal error: matched state fails the diagram")
    return MatchResult(
        state.h_matrix,
        state.corrections,
        state.sigma_linear,
        state.sigma_translation,
        tuple(trace),
    )


# ---------------------------------------------------------------------------
# exhaustive census


def _all_extension_data(q, rank):
    basis_matrices = gl2_elements(q)
    vectors = [(x, y) for x in range(q) for y in range(q)]
    divisions = [()]
    for _ in range(rank):
        divisions = [d + (v,) for d in divisions for v in vectors]
    return [(b, d) for b in basis_matrices for d in divisions]


def orbit_census(ell, level, rank, model):
    """Orbit count of the simultaneous (Galois x basis-change) action on
    all extension data at level ell^level with the given generator count.

    Returns (count, representatives) with lexicographically least
    representatives, sorted.
    """
    q = ell**level
    if model.modulus != q or model.rank != rank:
        raise ValueError("model does not act at this level")
    if os.environ.get("GDL_ENUM_BUDGET") is None:
        if q > CENSUS_MODULUS or rank > CENSUS_RANK:
            raise EnumerationTooLarge(
                f"census limited to modulus {CENSUS_MODULUS}, rank {CENSUS_RANK}"
            )
    data = _all_extension_data(q, rank)
    if len(data) > enum_budget(len(data)):
        raise EnumerationTooLarge(f"{len(data)} extension data exceed the budget")
    index = {x: i for i, x in enumerate(data)}

    moves = []
    for gamma in model.linear_gens:
        moves.append(("lin", gamma))
    for t in model.translation_gens:
        moves.append(("tr", t))
    for a in sl2_generators(q):
        moves.append(("bc", a))
    moves.append(("bc", (1, 0, 0, q - 1)))  # determinant -1 basis change

    def apply(move, datum):
        kind, g = move
        b, d = datum
        if kind == "lin":
            return (
                mat_mul(g, b, q),
                tuple(mat_vec(g, v, q) for v in d),
            )
        if kind == "tr":
            return (
                b,
                tuple(
                    ((v[0] + g[i][0]) % q, (v[1] + g[i][1]) % q)
                    for i, v in enumerate(d)
                ),
            )
        return (mat_mul(b, g, q), d)

    seen = [False] * len(data)
    reps = []
    for start, datum in enumerate(data):
        if seen[start]:
            continue
        reps.append(datum)
        seen[start] = True
        stack = [datum]
        while stack:
            current = stack.pop()
            for move in moves:
                image = apply(move, current)
                i = index[image]
                if not seen[i]:
                    seen[i] = True
                    stack.append(image)
    reps.sort()
    return len(reps), reps


def preset_model(name, ell, level, rank):
    """Affine models used by the command line and the demos.

    "full":    linear part SL2(Z/q), full translations;
    "trivial": both parts trivial;
    "cm:D":    linear part the unit group of the discriminant-D order
               acting on (Z/q)^2 through its regular representation,
               full translations.
    """
    q = ell**level
    full_translations = []
    for i in range(rank):
        for e in ((1, 0), (0, 1)):
            full_translations.append(
                tuple(e if j == i else (0, 0) for j in range(rank))
            )
    if name == "full":
        return AffineGaloisModel(q, rank, sl2_generators(q), tuple(full_translations))
    if name == "trivial":
        return AffineGaloisModel(q, rank, (), ())
    if name.startswith("cm:"):
        disc = int(name.split(":", 1)[1])
        order = cm.QuadOrder(disc)
        units = cm.unit_group(order, q)
        mats = tuple(cm.unit_matrix(order, u, q) for u in units.representatives)
        return AffineGaloisModel(q, rank, mats, tuple(full_translations))
    raise ValueError(f"unknown model preset {name!r}")
