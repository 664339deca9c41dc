"""Custom exception hierarchy for the collapsar package."""

from __future__ import annotations

from typing import Optional


class CollapsarError(Exception):
    """Base exception for the collapsar package."""


class ConfigError(CollapsarError):
    """Invalid configuration or command-line usage."""


class DataError(CollapsarError):
    """Experiment-record loading or output writing failure."""


class NumericalError(CollapsarError):
    """A computation could not produce a trustworthy number."""


class GridNodeOnNodeError(NumericalError):
    """A grid node sits on (or next to) a zero of the symmetric state."""

    def __init__(self, index: int, x: float) -> None:
        self.index = index
        self.x = x
        super().__init__(
            f"Grid node {index} at x={x:.6g} lies within dx/2 of a node of cos(kx)"
        )


class NodeTooSmallError(NumericalError):
    """|psi| fell below the node floor where a log-derivative is needed."""

    def __init__(self, index: int, modulus: float, floor: float) -> None:
        self.index = index
        self.modulus = modulus
        self.floor = floor
        super().__init__(
            f"|psi| = {modulus:.3g} at node {index} is below the floor {floor:.3g}; "
            "the momentum field is singular there"
        )


class NonFiniteError(NumericalError):
    """A field contains NaN or infinite values."""


class ZeroFieldError(NumericalError):
    """A field has (numerically) zero norm."""


class DivergedError(NumericalError):
    """Explicit evolution blew up: max|p| passed the blow-up threshold or needed too many sub-steps."""

    def __init__(self, t: float, max_abs: float, label: str = "") -> None:
        self.t = t
        self.max_abs = max_abs
        self.label = label
        prefix = f"[{label}] " if label else ""
        super().__init__(f"{prefix}Evolution diverged at t={t:.6g} (max|p|={max_abs:.3g})")

    def with_label(self, label: str) -> DivergedError:
        return DivergedError(self.t, self.max_abs, label)


class LinearSolveFailure(NumericalError):
    """The banded Crank-Nicolson solve degenerated."""


class SingularityError(NumericalError):
    """The closed-form collapse solution hits its pole."""

    def __init__(self, t_star: float) -> None:
        self.t_star = t_star
        super().__init__(f"Closed-form momentum is singular at t*={t_star:.9g}")


class NeverConvergesError(NumericalError):
    """An exactly symmetric initial state never selects an outcome."""


class FitDegenerateError(NumericalError):
    """Least-squares design matrix is rank deficient."""

    def __init__(self, reason: str, rank: Optional[int] = None) -> None:
        self.reason = reason
        self.rank = rank
        super().__init__(f"Degenerate fit: {reason}")
