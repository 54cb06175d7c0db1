"""Exception hierarchy. Each class carries a distinct process exit code for the CLI."""


class LatcritError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class NormSpecError(LatcritError):
    """Malformed norm spec, lattice literal, x literal, or config file."""

    exit_code = 2


class CapacityError(LatcritError):
    """An enumeration would exceed the configured point cap."""

    exit_code = 3


class FlowRangeError(LatcritError):
    """Flow time outside the supported range."""

    exit_code = 4


class BracketError(LatcritError):
    """A bracketing root search could not find a sign change."""

    exit_code = 5


class UnsupportedDomainError(LatcritError):
    """Operation undefined for this domain (e.g. parallelogram gauges)."""

    exit_code = 6


class CriticalityError(LatcritError):
    """A lattice offered as critical failed the covolume or admissibility check."""

    exit_code = 7


class DegeneracyError(LatcritError):
    """A geometric construction found too few usable boundary points."""

    exit_code = 8
