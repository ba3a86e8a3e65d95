"""Exception and warning types shared across the package.

The command-line front end maps these onto process exit codes
(see :mod:`potrecon.cli`): configuration problems exit with 2, solver
failures with 3, and phase-coverage problems with 4.
"""

from __future__ import annotations


class ConfigurationError(ValueError):
    """A config file or CLI flag combination is malformed or inconsistent."""


class DomainGeometryError(ValueError):
    """The requested grid/disk geometry is unusable.

    Raised e.g. when the disk radius does not fit inside the square, or when
    the grid is too coarse for the boundary-trace stencils near the circle.
    """


class SolverFailure(RuntimeError):
    """The sparse factorization or linear solve failed outright."""


class CoverageError(ValueError):
    """A synthesis truncation radius exceeds the sampled phase-space band."""

    def __init__(self, message: str, k_max_available: float, k_requested: float):
        super().__init__(message)
        self.k_max_available = k_max_available
        self.k_requested = k_requested


class DegenerateDirectionError(ValueError):
    """A probe was requested for the zero frequency vector (no direction)."""


class TheoremHypothesisError(ValueError):
    """A stability-bound hypothesis is violated; the message names the inequality."""


class AttenuationModeError(ValueError):
    """The attenuated bound was called without attenuation (use the b = 0 bound)."""


class NearEigenvalueWarning(UserWarning):
    """The Helmholtz solve looks near-resonant; results are kept but flagged.

    Attributes
    ----------
    residual : float
        Achieved relative residual ``||A u - f|| / ||f||``.
    amplification : float
        Interior-to-boundary norm ratio that triggered the heuristic, if any.
    """

    def __init__(self, message: str, residual: float, amplification: float = 0.0):
        super().__init__(message)
        self.residual = residual
        self.amplification = amplification
