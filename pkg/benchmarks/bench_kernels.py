"""Time the compiled stencil kernel against the numpy fallback.

Run from the repository root:

    python3 benchmarks/bench_kernels.py

Two measurements: the raw bounded-axis derivative (where the compiled
kernel does its work) and a full right-hand-side evaluation on a walled
grid (where the derivative sits inside the rest of the pipeline). On a
fully periodic grid there is nothing to compare; differentiation is done
with FFTs in both builds.
"""

from __future__ import annotations

import time

import numpy as np

from phfluid import _stencils_py
from phfluid.energetics import VelocityState, rhs_velocity
from phfluid.fields import density_form, velocity_form
from phfluid.forms import Grid

try:
    from phfluid import _stencils as _compiled
except ImportError:
    _compiled = None


def _time(fn, *args, repeat: int = 5, loops: int = 20) -> float:
    best = np.inf
    for _ in range(repeat):
        start = time.perf_counter()
        for _ in range(loops):
            fn(*args)
        best = min(best, (time.perf_counter() - start) / loops)
    return best


def bench_derivative(n: int) -> None:
    rng = np.random.default_rng(11)
    values = rng.standard_normal((n, n))
    spacing = 1.0 / (n - 1)
    t_py = _time(_stencils_py.diff_bounded, values, 0, spacing)
    line = f"diff_bounded {n:4d}x{n:<4d}  numpy {t_py * 1e3:8.3f} ms"
    if _compiled is not None:
        t_c = _time(_compiled.diff_bounded, values, 0, spacing)
        line += f"  compiled {t_c * 1e3:8.3f} ms  speedup {t_py / t_c:5.2f}x"
        d_py = _stencils_py.diff_bounded(values, 0, spacing)
        d_c = np.asarray(_compiled.diff_bounded(values, 0, spacing))
        line += f"  max|diff| {np.max(np.abs(d_py - d_c)):.2e}"
    print(line)


def bench_rhs(n: int) -> None:
    grid = Grid(
        extents=(2.0 * np.pi, 2.0 * np.pi),
        resolution=(n, n),
        periodic=(False, False),
    )
    state = VelocityState(
        velocity_form(grid, "taylor_green", amplitude=0.3),
        density_form(grid, "trig", amplitude=0.1),
    )
    import phfluid.kernels as kernels

    saved_impl = kernels._impl
    try:
        kernels._impl = _stencils_py
        t_py = _time(rhs_velocity, state, repeat=3, loops=5)
        line = f"rhs_velocity {n:4d}x{n:<4d}  numpy {t_py * 1e3:8.3f} ms"
        if _compiled is not None:
            kernels._impl = _compiled
            t_c = _time(rhs_velocity, state, repeat=3, loops=5)
            line += f"  compiled {t_c * 1e3:8.3f} ms  speedup {t_py / t_c:5.2f}x"
    finally:
        kernels._impl = saved_impl
    print(line)


def main() -> None:
    if _compiled is None:
        print("compiled extension not available; timing the numpy kernel only")
    for n in (64, 128, 256, 512):
        bench_derivative(n)
    print()
    for n in (64, 128, 256):
        bench_rhs(n)


if __name__ == "__main__":
    main()
