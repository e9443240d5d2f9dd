"""Named analytic fields and seeded random trigonometric test fields."""

from __future__ import annotations

import numpy as np

from .forms import DiscreteForm, Grid, VectorFieldSample

__all__ = [
    "random_trig_scalar",
    "random_trig_form",
    "velocity_form",
    "density_form",
    "force_profile",
]


def _axis_scale(grid: Grid, axis: int) -> float:
    # One full period across a periodic axis; on a bounded axis a half
    # period, so samples do not wrap and boundary terms stay nontrivial.
    factor = 2.0 * np.pi if grid.periodic[axis] else np.pi
    return factor / grid.extents[axis]


def random_trig_scalar(
    grid: Grid, rng: np.random.Generator, max_wavenumber: int = 3
) -> np.ndarray:
    """Smooth random scalar, unit max amplitude, wavenumbers <= max_wavenumber."""
    x, y = grid.meshes
    sx, sy = _axis_scale(grid, 0), _axis_scale(grid, 1)
    values = np.zeros(grid.resolution)
    for kx in range(max_wavenumber + 1):
        for ky in range(max_wavenumber + 1):
            coeff = rng.standard_normal() / (1.0 + kx + ky)
            phase_x, phase_y = rng.uniform(0.0, 2.0 * np.pi, size=2)
            values += coeff * np.cos(kx * sx * x + phase_x) * np.cos(ky * sy * y + phase_y)
    return values / np.max(np.abs(values))


def random_trig_form(
    grid: Grid, degree: int, rng: np.random.Generator, max_wavenumber: int = 3
) -> DiscreteForm:
    ncomp = {0: 1, 1: 2, 2: 1}[degree]
    return DiscreteForm(
        grid, degree,
        tuple(random_trig_scalar(grid, rng, max_wavenumber) for _ in range(ncomp)),
    )


def velocity_form(grid: Grid, profile: str, amplitude: float = 1.0,
                  seed: int = 0) -> DiscreteForm:
    """Velocity 1-form for a named profile.

    'uniform'       constant flow along x
    'shear'         amplitude*sin(y') dx, one period across the y extent
    'taylor_green'  the classic cellular flow, tangent to all four walls
    'random_trig'   seeded smooth random components
    """
    x, y = grid.meshes
    sx = 2.0 * np.pi / grid.extents[0]
    sy = 2.0 * np.pi / grid.extents[1]
    if profile == "uniform":
        return DiscreteForm(
            grid, 1, (np.full(grid.resolution, amplitude), np.zeros(grid.resolution))
        )
    if profile == "shear":
        return DiscreteForm(
            grid, 1, (amplitude * np.sin(sy * y), np.zeros(grid.resolution))
        )
    if profile == "taylor_green":
        return DiscreteForm(
            grid, 1,
            (
                amplitude * np.sin(sx * x) * np.cos(sy * y),
                -amplitude * np.cos(sx * x) * np.sin(sy * y),
            ),
        )
    if profile == "random_trig":
        rng = np.random.default_rng(seed)
        return amplitude * random_trig_form(grid, 1, rng)
    raise ValueError(f"unknown velocity profile '{profile}'")


def density_form(grid: Grid, profile: str, amplitude: float = 0.0,
                 base: float = 1.0) -> DiscreteForm:
    """Mass top-form with dual density 'constant' or 'trig'-perturbed."""
    x, y = grid.meshes
    sx = 2.0 * np.pi / grid.extents[0]
    sy = 2.0 * np.pi / grid.extents[1]
    if profile == "constant":
        density = np.full(grid.resolution, base)
    elif profile == "trig":
        density = base * (1.0 + amplitude * np.cos(sx * x) * np.cos(sy * y))
    else:
        raise ValueError(f"unknown density profile '{profile}'")
    if density.min() < 0.1:
        raise ValueError(
            f"density profile dips to {density.min():.3g}; keep it at or above 0.1"
        )
    return DiscreteForm(grid, 2, (density * grid.volume_scale,))


def force_profile(grid: Grid, kind: str, amplitude: float = 0.0,
                  time_factor: dict | None = None):
    """Distributed force as a function of time, returning a 1-form or None.

    kind 'zero' means no force; 'sine_x' is amplitude*sin(x') dx.  The
    optional time_factor dict scales the profile: {'kind': 'constant'},
    {'kind': 'cosine', 'omega': w} or {'kind': 'ramp', 'tau': t}.
    """
    if kind == "zero":
        return lambda t: None
    if kind == "sine_x":
        x, _ = grid.meshes
        sx = 2.0 * np.pi / grid.extents[0]
        base = DiscreteForm(
            grid, 1, (amplitude * np.sin(sx * x), np.zeros(grid.resolution))
        )
    else:
        raise ValueError(f"unknown force kind '{kind}'")

    options = time_factor or {"kind": "constant"}
    factor_kind = options.get("kind", "constant")
    if factor_kind == "constant":
        return lambda t: base
    if factor_kind == "cosine":
        omega = float(options["omega"])
        return lambda t: base * float(np.cos(omega * t))
    if factor_kind == "ramp":
        tau = float(options["tau"])
        if tau <= 0.0:
            raise ValueError("ramp time constant must be positive")
        return lambda t: base * min(t / tau, 1.0)
    raise ValueError(f"unknown time factor '{factor_kind}'")
