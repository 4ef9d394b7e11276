"""Exception hierarchy shared by all gmidkit modules."""

from __future__ import annotations


class GmidKitError(Exception):
    """Base class for every error raised by this package."""


class InvalidArgumentError(GmidKitError, ValueError):
    """An argument violates a documented precondition (non-positive size, bad range, ...)."""


class GridRangeError(GmidKitError, ValueError):
    """A lookup coordinate falls outside the chart grid.

    Attributes:
        axis: name of the offending axis ("l" or "vgs").
        value: the rejected coordinate.
        lo, hi: grid bounds on that axis.
    """

    def __init__(self, axis: str, value: float, lo: float, hi: float, unit: str = ""):
        self.axis = axis
        self.value = value
        self.lo = lo
        self.hi = hi
        suffix = f" {unit}" if unit else ""
        super().__init__(
            f"{axis} = {value!r}{suffix} outside grid range [{lo!r}, {hi!r}]{suffix}"
        )


class InfeasibleError(GmidKitError):
    """A requested operating point or spec cannot be met."""


class InfeasibleTargetError(InfeasibleError):
    """A gm/id target lies outside the range achievable on the chart.

    Attributes:
        target: requested gm/id (1/V).
        lo, hi: achievable gm/id interval at the queried length.
    """

    def __init__(self, target: float, lo: float, hi: float, l: float):
        self.target = target
        self.lo = lo
        self.hi = hi
        self.l = l
        super().__init__(
            f"gm/id target {target!r} 1/V not achievable at L = {l!r} m; "
            f"achievable interval is [{lo!r}, {hi!r}] 1/V"
        )


class InfeasibleGainError(InfeasibleError):
    """No grid length reaches the required intrinsic gain at the given gm/id.

    Attributes:
        required: requested gm/gds.
        best: best achievable gm/gds over the grid.
        best_l: length at which the best value occurs.
    """

    def __init__(self, required: float, best: float, best_l: float):
        self.required = required
        self.best = best
        self.best_l = best_l
        super().__init__(
            f"no grid length reaches gm/gds = {required!r}; "
            f"best achievable is {best!r} at L = {best_l!r} m"
        )


class SynthesisError(GmidKitError):
    """A synthesis stage failed; no partial design is returned.

    Attributes:
        stage: name of the failing stage.
    """

    def __init__(self, stage: str, message: str):
        self.stage = stage
        super().__init__(f"synthesis failed at stage '{stage}': {message}")


class InvalidDesignError(GmidKitError, ValueError):
    """A design record is degenerate (zero compensation cap, bad pole ordering, ...)."""


class LutParseError(GmidKitError, ValueError):
    """A sizing-chart CSV file violates the documented format.

    Attributes:
        line: 1-based line number of the offending row, or None for file-level faults.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class KvParseError(GmidKitError, ValueError):
    """A key=value report file is malformed or misses a required key."""


class ConfigError(GmidKitError, ValueError):
    """The tool config file is malformed; message carries the path to the field."""
