"""Exception hierarchy shared by all workbench modules.

Every exception carries the process exit code the command line front end
reports when the exception escapes a command.
"""

from typing import Any, Dict, Optional


class WorkbenchError(Exception):
    """Base class for all workbench failures."""

    exit_code = 1
    error_type = "workbench_error"

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}


class UsageError(WorkbenchError):
    """Bad arguments, unreadable files or schema violations."""

    exit_code = 1
    error_type = "usage_error"


class VerificationError(WorkbenchError):
    """An exact identity or theorem check failed."""

    exit_code = 2
    error_type = "verification_failure"

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None,
                 counterexample: Optional[Dict[str, Any]] = None):
        super().__init__(message, details)
        self.counterexample = counterexample or {}


class InadmissibleCutoffError(WorkbenchError):
    """A spectral cutoff sits too close to the spectrum."""

    exit_code = 3
    error_type = "inadmissible_cutoff"


class DimensionMismatchError(UsageError):
    """Ambient dimensions or shapes disagree."""

    error_type = "dimension_mismatch"


class NonSymmetricError(UsageError):
    """A self-adjoint model was requested for a non-symmetric matrix."""

    error_type = "non_symmetric"


class DegeneratePairingError(VerificationError):
    """A determinant pairing or change of basis is singular."""

    error_type = "degenerate_pairing"


class GradingMismatchError(VerificationError):
    """Torsor morphism between different gradings, or mismatched group pairs."""

    error_type = "grading_mismatch"


class AdaptednessError(VerificationError):
    """An operator violates its adaptedness constraints."""

    error_type = "adaptedness_violation"


class TransportError(InadmissibleCutoffError):
    """No shared chart could be found along a path after refinement."""

    error_type = "transport_failure"
