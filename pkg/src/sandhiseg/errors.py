"""Exception types shared across the package."""


class SandhisegError(Exception):
    """Base class for all package-specific errors."""


class EmptyInput(SandhisegError):
    """Input string is empty or whitespace-only."""


class InvalidConfig(SandhisegError):
    """A configuration value violates its contract."""


class UnmappableCandidate(SandhisegError):
    """No surface span close enough to a candidate word."""


class NoPath(SandhisegError):
    """No candidate path tiles the chunk."""


class NumericalError(SandhisegError):
    """Non-finite values encountered in encoder math."""


class DegenerateRow(SandhisegError):
    """An attention row has an all-zero mask."""


class AlignmentOverflow(SandhisegError):
    """Gold alignment requires a label longer than the cap."""


class AlignmentMismatch(SandhisegError):
    """Prediction and input disagree on chunk structure."""


class EmptyCorpus(SandhisegError):
    """Training requires at least one usable sentence."""


class EmptyText(SandhisegError):
    """Scoring requires a nonempty string."""


class UnknownLabel(SandhisegError):
    """A gold label is missing from the label vocabulary."""


class IoError(SandhisegError):
    """A data file could not be read or parsed."""
