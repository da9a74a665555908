"""Exception hierarchy for the toolkit.

Every library error derives from :class:`EtaIndexError`, so callers (and the
CLI, which maps them to exit code 3) can catch one type.
"""


class EtaIndexError(Exception):
    """Base class for all toolkit errors."""


# --- linear algebra ---------------------------------------------------------

class NonHermitianInput(EtaIndexError):
    """Matrix violates the Hermitian symmetry invariant beyond tolerance."""


# --- operator models --------------------------------------------------------

class MatrixBackingUnsupported(EtaIndexError):
    """Operation needs an exact lattice tail model, not a truncated matrix."""


class UnsupportedBacking(EtaIndexError):
    """Operator backing does not support the requested transform."""


class UnregularizableModel(EtaIndexError):
    """Spectrum model has no convergent regularization (bad exception data)."""


class LoopMismatch(EtaIndexError):
    """Endpoint spectra of a declared loop differ beyond tolerance."""


class DiscontinuousCurve(EtaIndexError):
    """Eigenvalue curve data has a jump and cannot define a continuous family."""


# --- spectral flow ----------------------------------------------------------

class NoGapFound(EtaIndexError):
    """No weight with the required spectral gap exists at this sampling density."""


class EndpointNotInvertible(EtaIndexError):
    """Family endpoint has an eigenvalue within gap tolerance of zero."""


class PartitionDepthExceeded(EtaIndexError):
    """Adaptive bisection exceeded the maximum refinement depth."""


class TangencyDetected(EtaIndexError):
    """A curve touches zero without a sign change; crossing count undefined."""


class NowhereInvertible(EtaIndexError):
    """Every parameter value of a loop has a near-zero eigenvalue."""


# --- eta / zeta -------------------------------------------------------------

class PoleAtOne(EtaIndexError):
    """Hurwitz zeta evaluated at its pole s = 1."""


class ParityViolated(EtaIndexError):
    """Operator order and base dimension do not satisfy ord + dim = 1 (mod 2)."""


class NotDyadic(EtaIndexError):
    """Computed invariant is not a dyadic rational within tolerance."""


# --- symbol calculus --------------------------------------------------------

class NonConstantLeadingCoefficient(EtaIndexError):
    """Resolvent recursion requires an x-independent leading coefficient."""


class DivergentLambdaIntegral(EtaIndexError):
    """Closed-form integral over the resolvent parameter does not converge."""


# --- boundary value problems ------------------------------------------------

class TailViolation(EtaIndexError):
    """Mode window too small: an edge mode is not singly constrained."""


class NotCoverCompatible(EtaIndexError):
    """Problem's tangential data is not structurally tied to the given cover."""


# --- CLI --------------------------------------------------------------------

class ConfigParseError(EtaIndexError):
    """Scenario configuration is malformed or references unknown names."""


class UnknownSuite(EtaIndexError):
    """Requested verification suite name does not exist."""
