"""
Exception types shared by the scalability tools.

Tools raise these; agents catch them and turn them into error messages;
the CLI maps them onto exit codes.
"""


class ScalabilityError(ValueError):
    """Base class for every error raised by the toolkit."""

    error_type = "scalability_error"


class DomainError(ScalabilityError):
    """A parameter lies outside the domain of a model."""

    error_type = "domain_error"


class NoFiniteMaximumError(ScalabilityError):
    """The capacity curve has no finite maximum (kappa = 0)."""

    error_type = "no_finite_maximum"


class InsufficientDataError(ScalabilityError):
    """Too few distinct samples for the requested fit."""

    error_type = "insufficient_data"


class DataFileError(ScalabilityError):
    """A benchmark data file could not be parsed."""

    error_type = "data_file_error"

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SimulationError(ScalabilityError):
    """A simulation could not be configured or completed."""

    error_type = "simulation_error"


class ConfigError(ScalabilityError):
    """A configuration value is missing or invalid."""

    error_type = "config_error"
