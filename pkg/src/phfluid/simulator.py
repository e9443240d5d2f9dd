"""Batch time integration of the open kinetic-energy subsystem.

Fixed-step classical Runge-Kutta in either representation, with per-step
energy/mass/vorticity bookkeeping, port snapshots at an output stride,
impermeable-wall projection on bounded axes, and a watchdog that aborts
cleanly when the pressureless dynamics start to steepen into a shock.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import fields
from .dirac import (
    EnergyReport,
    PortSet,
    boundary_power,
    distributed_power,
    energy_rate_series,
    ports_momentum,
    ports_velocity,
)
from .energetics import (
    MomentumState,
    VelocityState,
    density_scalar,
    efforts_momentum,
    efforts_velocity,
    kinetic_energy_momentum,
    kinetic_energy_velocity,
    rhs_momentum,
    rhs_velocity,
    to_momentum,
    total_mass,
)
from .forms import (
    BoundaryForm,
    DiscreteForm,
    Grid,
    boundary_integral,
    boundary_product,
    exterior_derivative,
    flux_velocity,
    interior_product,
    pairing,
    sharp,
    trace,
)

__all__ = [
    "ConfigError",
    "SimConfig",
    "SimulationResult",
    "WATCHDOG_REASON",
    "build_grid",
    "build_initial_state",
    "build_force",
    "project_walls",
    "rk4_step",
    "simulate",
    "vorticity_diagnostic",
    "rhs_momentum",
    "rhs_velocity",
]

WATCHDOG_REASON = "density/gradient watchdog"


class ConfigError(ValueError):
    """Invalid simulation configuration."""


def _pair(value, kind, name):
    try:
        a, b = value
        return (kind(a), kind(b))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name} must be a pair") from exc


@dataclass(frozen=True)
class SimConfig:
    """Complete description of one batch run."""

    extents: tuple[float, float] = (2.0 * np.pi, 2.0 * np.pi)
    resolution: tuple[int, int] = (64, 64)
    periodic: tuple[bool, bool] = (True, True)
    metric: tuple[float, float] = (1.0, 1.0)
    representation: str = "velocity"
    velocity_profile: str = "taylor_green"
    velocity_amplitude: float = 0.3
    density_profile: str = "trig"
    density_amplitude: float = 0.1
    density_base: float = 1.0
    force_kind: str = "zero"
    force_amplitude: float = 0.0
    force_time: str = "constant"
    force_omega: float = 1.0
    force_ramp: float = 1.0
    dt: float = 1e-3
    steps: int = 1000
    output_stride: int = 100
    seed: int = 0
    density_floor: float = 1e-10
    gradient_factor: float = 100.0

    def __post_init__(self) -> None:
        if self.representation not in ("momentum", "velocity"):
            raise ConfigError("representation must be 'momentum' or 'velocity'")
        if not (self.dt > 0.0 and np.isfinite(self.dt)):
            raise ConfigError("dt must be positive and finite")
        if self.steps < 1:
            raise ConfigError("steps must be at least 1")
        if self.output_stride < 1:
            raise ConfigError("output_stride must be at least 1")
        if not (self.density_floor > 0.0):
            raise ConfigError("density_floor must be positive")
        if not (self.gradient_factor > 1.0):
            raise ConfigError("gradient_factor must exceed 1")

    @classmethod
    def from_dict(cls, raw: dict) -> "SimConfig":
        if not isinstance(raw, dict):
            raise ConfigError("configuration must be a JSON object")
        known = dict(raw)
        grid = known.pop("grid", {})
        if not isinstance(grid, dict):
            raise ConfigError("'grid' must be an object")
        initial = known.pop("initial", {})
        if not isinstance(initial, dict):
            raise ConfigError("'initial' must be an object")
        force = known.pop("force", {})
        if not isinstance(force, dict):
            raise ConfigError("'force' must be an object")
        watchdog = known.pop("watchdog", {})
        if not isinstance(watchdog, dict):
            raise ConfigError("'watchdog' must be an object")

        kwargs = {}
        for section, allowed in (
            (grid, ("extents", "resolution", "periodic", "metric")),
            (initial, ("velocity", "velocity_amplitude", "density",
                       "density_amplitude", "density_base")),
            (force, ("kind", "amplitude", "time", "omega", "ramp")),
            (watchdog, ("density_floor", "gradient_factor")),
        ):
            unknown = set(section) - set(allowed)
            if unknown:
                raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
        if "extents" in grid:
            kwargs["extents"] = _pair(grid["extents"], float, "grid.extents")
        if "resolution" in grid:
            kwargs["resolution"] = _pair(grid["resolution"], int, "grid.resolution")
        if "periodic" in grid:
            kwargs["periodic"] = _pair(grid["periodic"], bool, "grid.periodic")
        if "metric" in grid:
            kwargs["metric"] = _pair(grid["metric"], float, "grid.metric")
        text_fields = {
            "velocity": ("velocity_profile", str),
            "velocity_amplitude": ("velocity_amplitude", float),
            "density": ("density_profile", str),
            "density_amplitude": ("density_amplitude", float),
            "density_base": ("density_base", float),
        }
        for key, (attr, kind) in text_fields.items():
            if key in initial:
                kwargs[attr] = kind(initial[key])
        force_fields = {
            "kind": ("force_kind", str),
            "amplitude": ("force_amplitude", float),
            "time": ("force_time", str),
            "omega": ("force_omega", float),
            "ramp": ("force_ramp", float),
        }
        for key, (attr, kind) in force_fields.items():
            if key in force:
                kwargs[attr] = kind(force[key])
        for key, kind in (("density_floor", float), ("gradient_factor", float)):
            if key in watchdog:
                kwargs[key] = kind(watchdog[key])
        scalar_fields = {
            "representation": str,
            "dt": float,
            "steps": int,
            "output_stride": int,
            "seed": int,
        }
        for key, kind in scalar_fields.items():
            if key in known:
                kwargs[key] = kind(known.pop(key))
        leftovers = set(known) - set(scalar_fields)
        if leftovers:
            raise ConfigError(f"unknown configuration keys: {sorted(leftovers)}")
        try:
            return cls(**kwargs)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from exc

    def to_dict(self) -> dict:
        return {
            "grid": {
                "extents": list(self.extents),
                "resolution": list(self.resolution),
                "periodic": list(self.periodic),
                "metric": list(self.metric),
            },
            "representation": self.representation,
            "initial": {
                "velocity": self.velocity_profile,
                "velocity_amplitude": self.velocity_amplitude,
                "density": self.density_profile,
                "density_amplitude": self.density_amplitude,
                "density_base": self.density_base,
            },
            "force": {
                "kind": self.force_kind,
                "amplitude": self.force_amplitude,
                "time": self.force_time,
                "omega": self.force_omega,
                "ramp": self.force_ramp,
            },
            "watchdog": {
                "density_floor": self.density_floor,
                "gradient_factor": self.gradient_factor,
            },
            "dt": self.dt,
            "steps": self.steps,
            "output_stride": self.output_stride,
            "seed": self.seed,
        }


def build_grid(config: SimConfig) -> Grid:
    try:
        return Grid(
            extents=config.extents,
            resolution=config.resolution,
            periodic=config.periodic,
            metric=config.metric,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def build_initial_state(config: SimConfig, grid: Grid | None = None):
    """Construct the seeded initial state in the configured representation."""
    grid = grid if grid is not None else build_grid(config)
    try:
        v_form = fields.velocity_form(
            grid,
            config.velocity_profile,
            amplitude=config.velocity_amplitude,
            seed=config.seed,
        )
        mass = fields.density_form(
            grid,
            config.density_profile,
            amplitude=config.density_amplitude,
            base=config.density_base,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    state = VelocityState(project_walls(v_form), mass)
    if config.representation == "momentum":
        return to_momentum(state)
    return state


def build_force(config: SimConfig, grid: Grid) -> Callable[[float], DiscreteForm | None]:
    try:
        return fields.force_profile(
            grid,
            config.force_kind,
            amplitude=config.force_amplitude,
            time_factor=None if config.force_kind == "zero" else {
                "kind": config.force_time,
                "omega": config.force_omega,
                "tau": config.force_ramp,
            },
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def project_walls(flow: DiscreteForm) -> DiscreteForm:
    """Zero the wall-normal component rows of a 1-form on bounded axes.

    Leaves fully periodic forms untouched.  The normal component of a
    (velocity or momentum) 1-form against the x walls is the first
    coefficient, against the y walls the second.
    """
    grid = flow.grid
    if all(grid.periodic):
        return flow
    p, q = (np.array(c) for c in flow.components)
    if not grid.periodic[0]:
        p[0, :] = 0.0
        p[-1, :] = 0.0
    if not grid.periodic[1]:
        q[:, 0] = 0.0
        q[:, -1] = 0.0
    return DiscreteForm(grid, 1, (p, q))


def _project_state(state):
    flow, mass = state
    return type(state)(project_walls(flow), mass)


def rk4_step(state, force_at: Callable[[float], DiscreteForm | None], dt: float, t: float = 0.0):
    """One classical Runge-Kutta step of the configured representation.

    On bounded axes every stage state is projected back onto the
    impermeable-wall constraint before its rate is evaluated, and so is
    the final update.
    """
    rhs = rhs_momentum if isinstance(state, MomentumState) else rhs_velocity
    cls = type(state)

    def rate(s, time):
        return rhs(_project_state(s), force_at(time))

    k1 = rate(state, t)
    k2 = rate(cls(state[0] + k1.flow * (0.5 * dt), state[1] + k1.mass * (0.5 * dt)), t + 0.5 * dt)
    k3 = rate(cls(state[0] + k2.flow * (0.5 * dt), state[1] + k2.mass * (0.5 * dt)), t + 0.5 * dt)
    k4 = rate(cls(state[0] + k3.flow * dt, state[1] + k3.mass * dt), t + dt)
    sixth = dt / 6.0
    flow = state[0] + (k1.flow + (k2.flow + k3.flow) * 2.0 + k4.flow) * sixth
    mass = state[1] + (k1.mass + (k2.mass + k3.mass) * 2.0 + k4.mass) * sixth
    return _project_state(cls(flow, mass))


@dataclass
class SimulationResult:
    """Everything a run produces, in memory."""

    config: SimConfig
    grid: Grid
    times: np.ndarray
    report: EnergyReport
    mass_total: np.ndarray
    max_vorticity: np.ndarray
    snapshots: list[tuple[int, object]] = field(default_factory=list)
    ports: list[tuple[int, PortSet]] = field(default_factory=list)
    completed_steps: int = 0
    aborted: bool = False
    abort_reason: str | None = None


def _velocity_view(state) -> tuple[DiscreteForm, np.ndarray]:
    """Velocity 1-form and density of a state in either representation."""
    rho = density_scalar(state[1]).components[0]
    if isinstance(state, MomentumState):
        return state.momentum * (1.0 / rho), rho
    return state.velocity, rho


def _step_diagnostics(state, force):
    """Scalars recorded every step: H, P_bnd, P_dist, mass, max |vorticity|."""
    if isinstance(state, MomentumState):
        energy = kinetic_energy_momentum(state)
        efforts = efforts_momentum(state)
        rho = density_scalar(state.mass).components[0]
        f_dist = efforts.flow
        stagnation = (
            interior_product(flux_velocity(efforts.flow), state.momentum)
            * (1.0 / rho)
            + efforts.mass
        )
        e_bnd = trace(stagnation)
        f_bnd = -1.0 * trace(efforts.flow * rho)
    else:
        energy = kinetic_energy_velocity(state)
        efforts = efforts_velocity(state)
        rho = density_scalar(state.mass).components[0]
        f_dist = efforts.flow * (1.0 / rho)
        e_bnd = trace(efforts.mass)
        f_bnd = -1.0 * trace(efforts.flow)
    p_bnd = boundary_integral(boundary_product(e_bnd, f_bnd))
    p_dist = 0.0 if force is None else pairing(force, f_dist)
    v_form, _ = _velocity_view(state)
    w = exterior_derivative(v_form)
    return energy, p_bnd, p_dist, total_mass(state[1]), w.max_abs()


def _watchdog(state, floor: float, gradient_cap: float) -> bool:
    flow, mass = state
    dens = mass.components[0] / flow.grid.volume_scale
    if not np.all(np.isfinite(dens)) or np.min(dens) < floor:
        return True
    v_form, _ = _velocity_view_safe(state)
    if v_form is None:
        return True
    grad = exterior_derivative(v_form).max_abs()
    return not np.isfinite(grad) or grad > gradient_cap


def _velocity_view_safe(state):
    try:
        return _velocity_view(state)
    except ValueError:
        return None, None


def simulate(config: SimConfig) -> SimulationResult:
    """Advance the configured number of steps, recording diagnostics.

    Every step logs energy, port powers, total mass, and peak vorticity;
    state and port snapshots are kept at the output stride (always
    including step 0 and the final step).  A density or gradient blow-up
    aborts the run with the series truncated at the last healthy step.
    """
    grid = build_grid(config)
    state = build_initial_state(config, grid)
    force_at = build_force(config, grid)

    v_form, _ = _velocity_view(state)
    v0 = sharp(v_form)
    vmax = v0.max_norm()
    if vmax > 0.0:
        h = min(grid.spacing)
        if config.dt > 0.5 * h / vmax:
            raise ConfigError(
                f"dt={config.dt:g} violates the advective guard "
                f"0.5*h/max|v| = {0.5 * h / vmax:g}"
            )
    gradient_cap = config.gradient_factor * max(
        1.0, exterior_derivative(v_form).max_abs()
    )

    steps = config.steps
    times = np.arange(steps + 1) * config.dt
    energies = np.zeros(steps + 1)
    p_bnd = np.zeros(steps + 1)
    p_dist = np.zeros(steps + 1)
    mass_tot = np.zeros(steps + 1)
    vort = np.zeros(steps + 1)
    result = SimulationResult(
        config=config,
        grid=grid,
        times=times,
        report=None,
        mass_total=mass_tot,
        max_vorticity=vort,
    )

    ports_fn = ports_momentum if config.representation == "momentum" else ports_velocity

    def record(step: int) -> None:
        force = force_at(times[step])
        (
            energies[step],
            p_bnd[step],
            p_dist[step],
            mass_tot[step],
            vort[step],
        ) = _step_diagnostics(state, force)
        if step % config.output_stride == 0 or step == steps:
            result.snapshots.append((step, state))
            result.ports.append((step, ports_fn(state, force)))

    record(0)
    completed = 0
    for step in range(1, steps + 1):
        try:
            state = rk4_step(state, force_at, config.dt, times[step - 1])
        except ValueError:
            # a stage state already left the admissible set
            result.aborted = True
            result.abort_reason = WATCHDOG_REASON
            break
        if _watchdog(state, config.density_floor, gradient_cap):
            result.aborted = True
            result.abort_reason = WATCHDOG_REASON
            break
        record(step)
        completed = step

    result.completed_steps = completed
    n = completed + 1
    result.times = times[:n]
    result.mass_total = mass_tot[:n]
    result.max_vorticity = vort[:n]
    rate = energy_rate_series(energies[:n], config.dt)
    result.report = EnergyReport(
        time=times[:n],
        energy=energies[:n],
        energy_rate=rate,
        boundary_power=p_bnd[:n],
        distributed_power=p_dist[:n],
        residual=rate - p_bnd[:n] - p_dist[:n],
    )
    return result


def vorticity_diagnostic(
    state: VelocityState, force: DiscreteForm | None = None
) -> tuple[DiscreteForm, DiscreteForm]:
    """Vorticity 2-form and the residual of its transport equation.

    Applying the exterior derivative to the velocity equation kills the
    exact gradient term, leaving vorticity advection balanced by the curl
    of the specific force; the residual returned here measures how well
    the assembled right-hand side honors that.
    """
    if not isinstance(state, VelocityState):
        state = VelocityState(*state)
    w = exterior_derivative(state.velocity)
    rates = rhs_velocity(state, force)
    v = sharp(state.velocity)
    residual = exterior_derivative(rates.flow) + exterior_derivative(
        interior_product(v, w)
    )
    if force is not None:
        rho = density_scalar(state.mass).components[0]
        residual = residual - exterior_derivative(force * (1.0 / rho))
    return w, residual
