"""Exception types shared across the library."""


class GdlError(Exception):
    """Base class for all library-specific errors."""


class NotInvertible(GdlError):
    """A residue was asked for an inverse it does not have."""


class SingularCurve(GdlError):
    """Weierstrass coefficients with vanishing discriminant are rejected."""


class PointNotOnCurve(GdlError):
    """A point fails the exact curve equation."""


class BadReduction(GdlError):
    """The prime divides the discriminant or a coefficient denominator."""


class ModulusMismatch(GdlError):
    """Operands live over incompatible moduli."""


class EnumerationTooLarge(GdlError):
    """An exhaustive enumeration would exceed the configured budget."""


class NotUnits(GdlError):
    """Subgroup generators must be invertible residues."""


class NonMaximalModulus(GdlError):
    """The modulus shares a factor with the order's conductor."""


class TorsionPoint(GdlError):
    """A non-torsion point was required."""


class ModelTooLarge(GdlError):
    """The affine model exceeds the enumeration budget."""


class NotSaturated(GdlError):
    """The input lattice basis must be saturated first."""


class RankDeficientInput(GdlError):
    """Nonzero input columns must be linearly independent."""


class ConsistencyError(GdlError):
    """Two independent computations of the same value disagreed."""


class NoMatch(GdlError):
    """Base-step failure: the determinant classes cannot be reconciled."""

    def __init__(self, det_left, det_right):
        self.det_left = det_left
        self.det_right = det_right
        super().__init__(
            f"no basis match: determinant classes {det_left} vs {det_right}"
        )


class KummerDeficient(GdlError):
    """Inductive-step failure: the translation part cannot bridge the gap."""

    def __init__(self, step, gap):
        self.step = step
        self.gap = gap
        super().__init__(f"translations cannot reach coset {gap} at step {step}")
