"""Port extraction, structure-membership residuals, and power accounting.

A port tuple collects the storage, boundary, and distributed flow/effort
pairs of one state snapshot.  All ports are oriented into the
interconnection structure, and the storage flow is minus the state rate,
so power continuity reads: storage power plus boundary power plus
distributed power equals zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .energetics import (
    EffortPair,
    MomentumState,
    RatePair,
    VelocityState,
    density_scalar,
    dual_product,
    efforts_momentum,
    efforts_velocity,
    rhs_momentum,
    rhs_velocity,
    structure_map_momentum,
    structure_map_velocity,
)
from .forms import (
    BoundaryForm,
    DiscreteForm,
    boundary_integral,
    boundary_product,
    flux_velocity,
    interior_product,
    pairing,
    trace,
)

__all__ = [
    "PortSet",
    "EnergyReport",
    "ports_momentum",
    "ports_velocity",
    "dirac_residual",
    "boundary_power",
    "distributed_power",
    "storage_power",
    "power_continuity",
    "energy_rate_series",
    "power_balance",
]


@dataclass(frozen=True)
class PortSet:
    """Flow/effort pairs of the storage, boundary, and distributed ports."""

    representation: str
    f_storage: RatePair
    e_storage: EffortPair
    f_boundary: BoundaryForm
    e_boundary: BoundaryForm
    f_distributed: DiscreteForm
    e_distributed: DiscreteForm

    def __post_init__(self) -> None:
        if self.representation not in ("momentum", "velocity"):
            raise ValueError("representation must be 'momentum' or 'velocity'")
        if self.f_boundary.degree != 1 or self.e_boundary.degree != 0:
            raise ValueError("boundary ports must be a 1-form flow and 0-form effort")
        if self.f_distributed.degree != 1 or self.e_distributed.degree != 1:
            raise ValueError("distributed ports must be 1-forms")


def _zero_one_form(grid) -> DiscreteForm:
    z = np.zeros(grid.resolution)
    return DiscreteForm(grid, 1, (z, z.copy()))


def _momentum_boundary_efforts(
    state: MomentumState, efforts: EffortPair
) -> tuple[BoundaryForm, BoundaryForm]:
    rho = density_scalar(state.mass).components[0]
    carrier = flux_velocity(efforts.flow)
    stagnation = interior_product(carrier, state.momentum) * (1.0 / rho) + efforts.mass
    e_boundary = trace(stagnation)
    f_boundary = -1.0 * trace(efforts.flow * rho)
    return e_boundary, f_boundary


def ports_momentum(
    state: MomentumState, force: DiscreteForm | None = None
) -> PortSet:
    """Extract the full port tuple of a momentum-representation state.

    The boundary effort is the trace of the transported specific energy;
    the boundary flow is minus the trace of the mass flux.
    """
    efforts = efforts_momentum(state)
    rates = rhs_momentum(state, force)
    e_boundary, f_boundary = _momentum_boundary_efforts(state, efforts)
    e_dist = force if force is not None else _zero_one_form(state.momentum.grid)
    return PortSet(
        representation="momentum",
        f_storage=RatePair(-1.0 * rates.flow, -1.0 * rates.mass),
        e_storage=efforts,
        f_boundary=f_boundary,
        e_boundary=e_boundary,
        f_distributed=efforts.flow,
        e_distributed=e_dist,
    )


def ports_velocity(
    state: VelocityState, force: DiscreteForm | None = None
) -> PortSet:
    """Extract the full port tuple of a velocity-representation state.

    The boundary effort traces the specific kinetic energy (the dynamic
    pressure); the boundary flow is minus the trace of the mass flux; the
    distributed flow is the mass flux divided by density, i.e. the flux
    image of the velocity.
    """
    efforts = efforts_velocity(state)
    rates = rhs_velocity(state, force)
    rho = density_scalar(state.mass).components[0]
    e_dist = force if force is not None else _zero_one_form(state.velocity.grid)
    return PortSet(
        representation="velocity",
        f_storage=RatePair(-1.0 * rates.flow, -1.0 * rates.mass),
        e_storage=efforts,
        f_boundary=-1.0 * trace(efforts.flow),
        e_boundary=trace(efforts.mass),
        f_distributed=efforts.flow * (1.0 / rho),
        e_distributed=e_dist,
    )


def dirac_residual(ports: PortSet, state) -> Mapping[str, float]:
    """Max-norm residual of each defining relation of the structure.

    A tuple produced by the matching ports_* function from a consistent
    state returns residuals at rounding level; perturbing any port slot
    shows up linearly in the corresponding row.
    """
    efforts = ports.e_storage
    if ports.representation == "momentum":
        if not isinstance(state, MomentumState):
            state = MomentumState(*state)
        rho = density_scalar(state.mass).components[0]
        expected = structure_map_momentum(state, efforts)
        flow_rate = expected.flow + ports.e_distributed
        e_bnd, f_bnd = _momentum_boundary_efforts(state, efforts)
    else:
        if not isinstance(state, VelocityState):
            state = VelocityState(*state)
        rho = density_scalar(state.mass).components[0]
        expected = structure_map_velocity(state, efforts)
        flow_rate = expected.flow + ports.e_distributed * (1.0 / rho)
        e_bnd = trace(efforts.mass)
        f_bnd = -1.0 * trace(efforts.flow)

    if ports.representation == "momentum":
        dist_reference = efforts.flow
    else:
        dist_reference = efforts.flow * (1.0 / rho)

    return {
        "flow_rate": (ports.f_storage.flow + flow_rate).max_abs(),
        "mass_rate": (ports.f_storage.mass + expected.mass).max_abs(),
        "distributed_flow": (ports.f_distributed - dist_reference).max_abs(),
        "boundary_flow": (ports.f_boundary - f_bnd).max_abs(),
        "boundary_effort": (ports.e_boundary - e_bnd).max_abs(),
    }


def boundary_power(ports: PortSet) -> float:
    """Power entering through the boundary port: the oriented boundary
    integral of effort times flow."""
    return boundary_integral(boundary_product(ports.e_boundary, ports.f_boundary))


def distributed_power(ports: PortSet) -> float:
    """Power supplied by the distributed port."""
    return pairing(ports.e_distributed, ports.f_distributed)


def storage_power(ports: PortSet) -> float:
    """Power absorbed by the storage port, minus the energy rate."""
    return dual_product(ports.f_storage, ports.e_storage)


def power_continuity(ports: PortSet) -> float:
    """Net power over all ports; zero for members of the structure."""
    return storage_power(ports) + boundary_power(ports) + distributed_power(ports)


_END_STENCILS = np.array(
    [
        [-25.0 / 12.0, 4.0, -3.0, 4.0 / 3.0, -1.0 / 4.0],
        [-1.0 / 4.0, -5.0 / 6.0, 3.0 / 2.0, -1.0 / 2.0, 1.0 / 12.0],
    ]
)


def energy_rate_series(energies: np.ndarray, dt: float) -> np.ndarray:
    """Differentiate a sampled energy series in time.

    Uses fourth-order centered differences inside and matching one-sided
    stencils at the ends, falling back to lower order for short series, so
    the differencing error stays below the integrator error it is meant to
    expose.
    """
    h = np.asarray(energies, dtype=float)
    n = h.size
    out = np.zeros(n)
    if n < 2:
        return out
    if n < 5:
        out[1:-1] = (h[2:] - h[:-2]) / (2.0 * dt)
        out[0] = (h[1] - h[0]) / dt if n < 3 else (-3 * h[0] + 4 * h[1] - h[2]) / (2 * dt)
        out[-1] = (h[-1] - h[-2]) / dt if n < 3 else (3 * h[-1] - 4 * h[-2] + h[-3]) / (2 * dt)
        return out
    out[2:-2] = (h[:-4] - 8.0 * h[1:-3] + 8.0 * h[3:-1] - h[4:]) / (12.0 * dt)
    out[0] = _END_STENCILS[0] @ h[:5] / dt
    out[1] = _END_STENCILS[1] @ h[:5] / dt
    out[-1] = -(_END_STENCILS[0] @ h[-5:][::-1]) / dt
    out[-2] = -(_END_STENCILS[1] @ h[-5:][::-1]) / dt
    return out


@dataclass(frozen=True)
class EnergyReport:
    """Time series of the energy budget: rates, port powers, and the
    continuity residual rate = boundary + distributed."""

    time: np.ndarray
    energy: np.ndarray
    energy_rate: np.ndarray
    boundary_power: np.ndarray
    distributed_power: np.ndarray
    residual: np.ndarray

    def __len__(self) -> int:
        return self.time.size


def power_balance(
    ports: Sequence[PortSet], times: np.ndarray, energies: np.ndarray
) -> EnergyReport:
    """Assemble the energy budget of a trajectory from its port snapshots.

    The residual column is the finite-difference energy rate minus the
    boundary and distributed powers; for a consistent trajectory it is
    bounded by the time-differencing error alone.
    """
    times = np.asarray(times, dtype=float)
    energies = np.asarray(energies, dtype=float)
    if not (len(ports) == times.size == energies.size):
        raise ValueError("ports, times, and energies must have equal length")
    if times.size > 1:
        steps = np.diff(times)
        if not np.allclose(steps, steps[0], rtol=1e-12, atol=0.0):
            raise ValueError("time samples must be uniform")
        dt = float(steps[0])
    else:
        dt = 1.0
    p_bnd = np.array([boundary_power(p) for p in ports])
    p_dist = np.array([distributed_power(p) for p in ports])
    rate = energy_rate_series(energies, dt)
    return EnergyReport(
        time=times,
        energy=energies,
        energy_rate=rate,
        boundary_power=p_bnd,
        distributed_power=p_dist,
        residual=rate - p_bnd - p_dist,
    )
