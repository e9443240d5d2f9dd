"""Pure numpy implementation of the bounded-axis derivative kernel.

Drop-in fallback for the compiled extension in ``_stencils.pyx``.  Either
implementation is deterministic run to run; across the two only agreement
to floating-point rounding is guaranteed, not bitwise identity.
"""

import numpy as np

# Diagonal-norm summation-by-parts first-derivative operator, fourth-order
# interior stencil with four one-sided closure rows per end.  The closure
# rows are the classical coefficients compatible with the norm weights
# (17/48, 59/48, 43/48, 49/48); together they satisfy H*D + (H*D)^T = B
# exactly, which the rest of the package relies on for discrete integration
# by parts.
CLOSURE = np.array(
    [
        [-24.0 / 17.0, 59.0 / 34.0, -4.0 / 17.0, -3.0 / 34.0, 0.0, 0.0],
        [-1.0 / 2.0, 0.0, 1.0 / 2.0, 0.0, 0.0, 0.0],
        [4.0 / 43.0, -59.0 / 86.0, 0.0, 59.0 / 86.0, -4.0 / 43.0, 0.0],
        [3.0 / 98.0, 0.0, -59.0 / 98.0, 0.0, 32.0 / 49.0, -4.0 / 49.0],
    ]
)
NORM_WEIGHTS = np.array([17.0 / 48.0, 59.0 / 48.0, 43.0 / 48.0, 49.0 / 48.0])


def diff_bounded(f: np.ndarray, axis: int, h: float) -> np.ndarray:
    """First derivative of a 2D nodal array along a bounded axis."""
    if f.ndim != 2:
        raise ValueError("expected a 2D array")
    n = f.shape[axis]
    if n < 8:
        raise ValueError("bounded axis needs at least 8 nodes")
    out = np.empty_like(f)
    c1 = 1.0 / 12.0
    c2 = 2.0 / 3.0
    if axis == 0:
        out[4 : n - 4] = c1 * (f[2 : n - 6] - f[6 : n - 2]) + c2 * (
            f[5 : n - 3] - f[3 : n - 5]
        )
        out[:4] = CLOSURE @ f[:6]
        out[n - 4 :] = -(CLOSURE @ f[n - 6 :][::-1])[::-1]
    elif axis == 1:
        out[:, 4 : n - 4] = c1 * (f[:, 2 : n - 6] - f[:, 6 : n - 2]) + c2 * (
            f[:, 5 : n - 3] - f[:, 3 : n - 5]
        )
        out[:, :4] = f[:, :6] @ CLOSURE.T
        out[:, n - 4 :] = -(f[:, n - 6 :][:, ::-1] @ CLOSURE.T)[:, ::-1]
    else:
        raise ValueError("axis must be 0 or 1")
    out *= 1.0 / h
    return out
