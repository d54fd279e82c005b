"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A scalar argument is outside its valid range."""


class ShapeError(ValueError):
    """Matrix/vector dimensions do not agree."""


class DataError(ValueError):
    """A dataset or matrix violates a structural requirement."""


class DivergenceError(RuntimeError):
    """A solver's step-size search exceeded its safety cap."""


class CsvParseError(ValueError):
    """A CSV file could not be parsed; message carries the line number."""
