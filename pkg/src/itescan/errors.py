"""Exception hierarchy with stable machine-readable error codes.

Every domain error carries a ``code`` string that the CLI emits verbatim
in its JSON error object, so scripts can dispatch on it.
"""


class ItescanError(Exception):
    """Base class for all domain errors raised by this package."""

    code = "error"

    def __init__(self, message: str, code: str | None = None):
        super().__init__(message)
        if code is not None:
            self.code = code


class ParseError(ItescanError):
    code = "parse_error"


class EmptyHamiltonianError(ItescanError):
    code = "empty_hamiltonian"


class DimensionError(ItescanError):
    code = "dimension_mismatch"


class CapExceededError(ItescanError):
    code = "cap_exceeded"


class BackendError(ItescanError):
    """Requested backend cannot serve the given parameters (e.g. beta too large)."""

    code = "backend_invalid"


class DegenerateOverlapError(ItescanError):
    """The bra/ket overlap vanishes, so the log-series expansion is undefined."""

    code = "degenerate_overlap"


class ScanExhaustedError(ItescanError):
    """The scan walked the whole interval without the residue dropping below
    threshold: one of the promises (overlap, gap, interval) is violated."""

    code = "scan_exhausted"


class CertificateError(ItescanError):
    """Analytic-continuation request on an instance without a zero-free certificate."""

    code = "certificate_failed"
