"""Exception types shared across the package.

Most are thin subclasses of ValueError so that callers who do not care
about the fine-grained failure mode can still catch something familiar.
"""


class FlagTetError(ValueError):
    """Base class for all package-specific errors."""


# arithmetic

class ZeroInput(FlagTetError):
    """Factorization or inversion of zero requested."""


# flag configurations

class DegenerateConfiguration(FlagTetError):
    """Flags fail a genericity condition (zero pairing or determinant)."""


class InvalidShape(FlagTetError):
    """A cross-ratio coordinate lies in the forbidden set {0, 1}."""


class NotOnSphere(FlagTetError):
    """Point does not lie on the null cone of the Hermitian form."""


class SigmaUndefined(FlagTetError):
    """The duality involution hits a pole (a face 3-ratio equals -1)."""


class InvalidTripleRatio(FlagTetError):
    """A face 3-ratio is zero where a rotation matrix needs to invert it."""


# triangulation documents

class SchemaError(FlagTetError):
    """Malformed triangulation document."""


class NonOrientable(FlagTetError):
    """A face gluing has even parity, breaking coherent orientations."""


class OrderingMismatch(FlagTetError):
    """A vertex bijection does not carry the glued face onto the target face."""


class UnmatchedFace(FlagTetError):
    """A face is glued twice, or a gluing is not involutive."""


class BoundaryEdge(FlagTetError):
    """An edge wheel runs into the boundary; no closed wheel exists."""


class SphereLink(FlagTetError):
    """Operation needs a torus or annulus link but got a sphere."""


class UnsupportedLinks(FlagTetError):
    """A vertex link is a surface this code does not handle."""


# solving

class PoleEncountered(FlagTetError):
    """A derived coordinate hit 0, 1 or infinity during evaluation."""


class NoConvergence(FlagTetError):
    """Newton iteration failed to reach the residual tolerance."""


class SingularJacobian(FlagTetError):
    """Jacobian rank collapsed below what the corrector can use."""


class PathSingular(FlagTetError):
    """Continuation met a rank change of the solution variety."""


class Backtracking(FlagTetError):
    """A path immediately reverses a turn, or its markers do not chain."""


# invariants

class NonRationalSupport(FlagTetError):
    """Exact wedge image requested for a non-rational pre-Bloch element."""


class OddPairing(FlagTetError):
    """A halved bilinear pairing failed to be integral."""


class DegenerateFiveTerm(FlagTetError):
    """Five-term relation arguments collide with {0, 1} or each other."""


class FamilyTooShort(FlagTetError):
    """Not enough family members for the requested finite differences."""


class VerificationFailed(FlagTetError):
    """An exact certification check did not hold."""
