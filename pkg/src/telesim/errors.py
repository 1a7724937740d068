"""Exception hierarchy shared by all telesim layers."""


class TelesimError(Exception):
    """Base class for all telesim errors."""


class ValidationError(TelesimError, ValueError):
    """An input violates a numeric or structural contract."""


class DomainError(ValidationError):
    """An input is well-formed but outside the supported family of states."""


class ProtocolOrderError(TelesimError, RuntimeError):
    """Protocol steps were invoked out of order (e.g. an EPR pair reused)."""


class ConfigError(TelesimError, ValueError):
    """Experiment configuration is invalid; carries every violation found."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
