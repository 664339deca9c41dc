"""Fourth-order finite-difference stencils on a uniform grid.

Central five-point stencils in the interior, one-sided fourth-order closures
on the two outermost nodes at each end. All functions take and return numpy
arrays (real or complex) and need at least 6 samples.
"""

from __future__ import annotations

import numpy as np
from scipy import integrate

# d/dx at nodes 0 and 1 (denominator 12 dx), applied to f[0:5]
_D1_EDGE0 = np.array([-25.0, 48.0, -36.0, 16.0, -3.0])
_D1_EDGE1 = np.array([-3.0, -10.0, 18.0, -6.0, 1.0])
# d2/dx2 at nodes 0 and 1 (denominator 12 dx^2), applied to f[0:6]
_D2_EDGE0 = np.array([45.0, -154.0, 214.0, -156.0, 61.0, -10.0])
_D2_EDGE1 = np.array([10.0, -15.0, -4.0, 14.0, -6.0, 1.0])


def first_derivative(f: np.ndarray, dx: float) -> np.ndarray:
    """Fourth-order first derivative."""
    f = np.asarray(f)
    out = np.empty_like(f, dtype=np.result_type(f, float))
    out[2:-2] = (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / (12.0 * dx)
    out[0] = _D1_EDGE0 @ f[:5] / (12.0 * dx)
    out[1] = _D1_EDGE1 @ f[:5] / (12.0 * dx)
    # mirrored closure flips sign for an odd derivative
    out[-1] = -(_D1_EDGE0 @ f[::-1][:5]) / (12.0 * dx)
    out[-2] = -(_D1_EDGE1 @ f[::-1][:5]) / (12.0 * dx)
    return out


def second_derivative(f: np.ndarray, dx: float) -> np.ndarray:
    """Fourth-order second derivative."""
    f = np.asarray(f)
    h2 = 12.0 * dx * dx
    out = np.empty_like(f, dtype=np.result_type(f, float))
    out[2:-2] = (-f[:-4] + 16.0 * f[1:-3] - 30.0 * f[2:-2] + 16.0 * f[3:-1] - f[4:]) / h2
    out[0] = _D2_EDGE0 @ f[:6] / h2
    out[1] = _D2_EDGE1 @ f[:6] / h2
    out[-1] = _D2_EDGE0 @ f[::-1][:6] / h2
    out[-2] = _D2_EDGE1 @ f[::-1][:6] / h2
    return out


def central_first_derivative(f: np.ndarray, dx: float) -> np.ndarray:
    """Five-point first derivative on nodes 2..n-3 only (length n-4)."""
    return (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / (12.0 * dx)


def central_second_derivative(f: np.ndarray, dx: float) -> np.ndarray:
    """Five-point second derivative on nodes 2..n-3 only (length n-4)."""
    return (-f[:-4] + 16.0 * f[1:-3] - 30.0 * f[2:-2] + 16.0 * f[3:-1] - f[4:]) / (
        12.0 * dx * dx
    )


def trapezoid(f: np.ndarray, dx: float) -> complex | float:
    """Composite trapezoid rule."""
    return integrate.trapezoid(np.asarray(f), dx=dx)


def cumulative_trapezoid(f: np.ndarray, dx: float) -> np.ndarray:
    """Running trapezoid integral from the first node; starts at 0."""
    return integrate.cumulative_trapezoid(np.asarray(f), dx=dx, initial=0)
