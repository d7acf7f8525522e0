"""Exception types raised by the library."""


class MisoWiretapError(Exception):
    """Base class for all library errors."""


class InvalidInputError(MisoWiretapError, ValueError):
    """Malformed numeric input: wrong shape, non-finite or non-Hermitian."""


class NotPSDError(InvalidInputError):
    """A matrix required to be positive semi-definite is not."""


class DomainError(MisoWiretapError, ValueError):
    """Argument outside the mathematical domain of a function."""


class UnsupportedSpectrumError(MisoWiretapError, ValueError):
    """Eigenvalue structure outside what a specialised solver handles."""


class ConfigError(MisoWiretapError, ValueError):
    """Invalid scenario configuration file."""

    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
