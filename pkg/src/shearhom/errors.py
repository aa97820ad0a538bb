"""Exception hierarchy shared by all shearhom modules."""

from __future__ import annotations


class ShearHomError(Exception):
    """Base class for every error raised by shearhom."""


class InvalidGeometryError(ShearHomError, ValueError):
    """Shapes that do not fit the cell, overlap inconsistently or give negative fractions."""


class ConfigError(ShearHomError, ValueError):
    """Malformed lattice, sweep or series configuration."""


class AliasingError(ShearHomError, ValueError):
    """Sampled field too coarse for the requested Fourier range."""


class ZeroModulusError(ShearHomError, ZeroDivisionError):
    """Harmonic-type average requested on a line where the modulus vanishes."""


class DivergenceError(ShearHomError, ArithmeticError):
    """Neumann series terms grow or become non-finite."""

    def __init__(self, term_index: int, message: str | None = None):
        self.term_index = term_index
        super().__init__(
            message
            or f"Neumann series diverged at term {term_index}; "
            "try a larger mu0 or a larger truncation j"
        )


class SingularSystemError(ShearHomError, ArithmeticError):
    """Dense PWE matrix is numerically singular."""


class InvalidResultError(ShearHomError, ArithmeticError):
    """A computed effective modulus is negative (undertruncated or diverged run)."""


class InvalidRegimeError(ShearHomError, ValueError):
    """Closed-form estimate evaluated outside its domain of validity."""


class ConvergenceConditionError(ShearHomError, ValueError):
    """The sufficient convergence condition is violated, so the remainder bound is undefined."""
