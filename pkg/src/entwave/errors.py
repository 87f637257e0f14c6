"""Exception types shared across the package."""


class EntwaveError(Exception):
    """Base class for library errors."""


class NonAdmissibleError(EntwaveError):
    """Wavelet fails the zero-mean admissibility condition."""


class DivergentIntegralError(EntwaveError):
    """An improper integral did not converge under refinement."""


class BoundaryDecayError(EntwaveError):
    """Field magnitude at the grid boundary exceeds the decay threshold."""


class FileFormatError(EntwaveError):
    """Malformed or truncated EWG1/EWC1/CSV input."""


class ConvergenceError(EntwaveError):
    """A truncated series failed to reach the requested tolerance."""
