"""
Exception types shared by the library and the command line front end. The CLI
maps each family to an exit code.
"""


class TwinterfError(Exception):
    """Base class for every error raised on purpose by this package."""
    exit_code = 1


class ConfigError(TwinterfError):
    """Missing, unknown or malformed experiment parameters."""


class DomainError(TwinterfError, ValueError):
    """Input that cannot describe a physical two-particle experiment."""


class VerificationError(TwinterfError):
    """Main engine and oracle disagree beyond tolerance."""
    exit_code = 2


class InvariantViolation(TwinterfError, ArithmeticError):
    """An internal invariant failed. This is a bug, not a user error."""
    exit_code = 3
