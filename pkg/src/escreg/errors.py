"""Exception types raised across the package."""


class EscRegError(Exception):
    """Base class for all package errors."""


class SingularMatrix(EscRegError, ArithmeticError):
    pass


class DegenerateRow(EscRegError, ArithmeticError):
    """A Routh array row vanished identically (roots on the imaginary axis)."""


class NotHurwitz(EscRegError, ValueError):
    pass


class DuplicateFrequency(EscRegError, ValueError):
    pass


class NonFinite(EscRegError, FloatingPointError):
    pass


class IntegrationDiverged(EscRegError, RuntimeError):
    """State norm crossed the divergence threshold during integration."""

    def __init__(self, t: float, norm: float):
        super().__init__(f"state norm {norm:.3g} exceeded threshold at t={t:.6g}")
        self.t = t
        self.norm = norm


class ConfigError(EscRegError, ValueError):
    """Invalid scenario or controller configuration."""
