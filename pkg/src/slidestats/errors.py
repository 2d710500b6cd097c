"""Exception types shared across the package."""

__all__ = [
    "SlideStatsError",
    "ConfigError",
    "DivergenceError",
    "DuplicatePointError",
    "ParseError",
]


class SlideStatsError(Exception):
    """Base class for errors raised by this package."""


class ConfigError(SlideStatsError):
    """Invalid configuration: unknown catalog entry, process kind, or option."""


class DivergenceError(SlideStatsError):
    """An integral failed to converge within the refinement budget.

    The message names the offending sub-interval (or the slide parameter t
    whose normalizing integral diverged) so the caller can tell a genuinely
    divergent integrand from a budget that is simply too small.
    """


class DuplicatePointError(SlideStatsError):
    """A point set contains coinciding points where distinct ones are required."""


class ParseError(SlideStatsError):
    """A point file or report file could not be parsed.

    For line-oriented formats the message carries the 1-based line number.
    """
