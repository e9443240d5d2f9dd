"""Derivative and quadrature kernels shared by the form operations.

Periodic axes are differentiated in Fourier space, which is exact for every
mode the grid resolves and keeps the operator exactly antisymmetric against
the rectangle-rule weights.  Bounded axes use the summation-by-parts stencil
from the compiled extension when it is available (set PHFLUID_PURE_PYTHON=1
to force the numpy fallback).
"""

from __future__ import annotations

import os

import numpy as np

from . import _stencils_py

if os.environ.get("PHFLUID_PURE_PYTHON", "0") not in ("", "0"):
    _impl = _stencils_py
    USING_COMPILED = False
else:
    try:
        from . import _stencils as _impl  # type: ignore[no-redef]

        USING_COMPILED = True
    except ImportError:
        _impl = _stencils_py
        USING_COMPILED = False

CLOSURE_WIDTH = 4
_NORM_WEIGHTS = _stencils_py.NORM_WEIGHTS


def diff_bounded(values: np.ndarray, axis: int, spacing: float) -> np.ndarray:
    """Derivative along a bounded axis (summation-by-parts operator)."""
    return np.asarray(
        _impl.diff_bounded(np.ascontiguousarray(values, dtype=np.float64), axis, spacing)
    )


def diff_periodic(values: np.ndarray, axis: int, extent: float) -> np.ndarray:
    """Derivative along a periodic axis (Fourier differentiation).

    The Nyquist multiplier is zeroed so the real-space operator stays
    antisymmetric; odd derivatives of the Nyquist mode are not resolvable
    anyway.
    """
    n = values.shape[axis]
    wavenumbers = 2.0 * np.pi * np.fft.rfftfreq(n, d=extent / n)
    multiplier = 1j * wavenumbers
    if n % 2 == 0:
        multiplier[-1] = 0.0
    shape = [1, 1]
    shape[axis] = multiplier.size
    spectrum = np.fft.rfft(values, axis=axis)
    spectrum *= multiplier.reshape(shape)
    return np.fft.irfft(spectrum, n=n, axis=axis)


def quadrature_weights(n: int, spacing: float, periodic: bool) -> np.ndarray:
    """Nodal quadrature weights for one axis.

    Rectangle rule on periodic axes; on bounded axes the norm weights that
    match the summation-by-parts derivative, i.e. a trapezoid-like rule with
    corrected end weights.  Using the matching norm is what closes discrete
    integration by parts exactly.
    """
    if periodic:
        weights = np.full(n, spacing)
    else:
        if n < 8:
            raise ValueError("bounded axis needs at least 8 nodes")
        weights = np.ones(n)
        weights[:4] = _NORM_WEIGHTS
        weights[-4:] = _NORM_WEIGHTS[::-1]
        weights *= spacing
    weights.flags.writeable = False
    return weights
