"""Exception and warning types raised across the package."""


class MoeaStatError(Exception):
    """Base class for all package errors."""


class FormatError(MoeaStatError, ValueError):
    """Malformed input file (bad header, wrong arity)."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InvalidValueError(FormatError):
    """Unparsable or non-finite numeric cell."""


class DuplicateKeyError(MoeaStatError, ValueError):
    pass


class CompletenessError(MoeaStatError, ValueError):
    """Some (algorithm, run, indicator) combination is missing."""

    def __init__(self, missing):
        self.missing = list(missing)
        shown = ", ".join(map(str, self.missing[:10]))
        more = "" if len(self.missing) <= 10 else f" (+{len(self.missing) - 10} more)"
        super().__init__(f"missing values for {shown}{more}")


class DimensionError(MoeaStatError, ValueError):
    pass


class CapabilityError(MoeaStatError):
    """Requested computation exceeds a configured capability limit."""


class ParameterError(MoeaStatError, ValueError):
    pass


class DegenerateDataError(MoeaStatError, ValueError):
    """Input carries no information for the requested statistic."""


class ConsistencyError(MoeaStatError, ValueError):
    pass


class ReferenceLookupError(MoeaStatError, LookupError):
    pass


class DegenerateScaleWarning(UserWarning):
    """An indicator is constant over a scenario and was mapped to 0.5."""
