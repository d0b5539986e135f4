"""Exception types shared across the package.

Every failure the library can signal deliberately derives from
:class:`TensorError`, so callers can catch one base class.  The CLI maps
these onto process exit codes (see ``tsketch.cli``).
"""


class TensorError(Exception):
    """Base class for all errors raised by tsketch."""


class ShapeMismatch(TensorError):
    """Operand dimensions are incompatible for the requested operation."""


class ImaginaryResidual(TensorError):
    """Inverse mode-3 DFT produced a non-negligible imaginary part.

    Raised when a spectral tensor is not (numerically) the transform of a
    real tensor, which signals corrupted data or a logic bug upstream.
    """


class SvdNoConvergence(TensorError):
    """The SVD iteration failed to converge on some spectral slice."""


class IndexOutOfRange(TensorError):
    """An index argument (truncation rank, tail index) is out of range."""


class InvalidParams(TensorError):
    """Parameter validation failed before any computation was attempted."""


class ZeroReference(TensorError):
    """A relative metric was requested against an all-zero reference."""


class TriangularBreakdown(TensorError):
    """A triangular solve met a diagonal entry too small to trust.

    Signals rank deficiency of the sketched system, which has probability
    zero for Gaussian test tensors but must not pass silently.
    """


class FormatError(TensorError):
    """A binary tensor file is malformed (bad magic, truncation, junk)."""
