"""Kinetic-energy storage and interconnection maps in two representations.

The state is always a pair (1-form, mass 2-form).  In the momentum
representation the 1-form is the mass-weighted velocity flat; in the
velocity representation it is the velocity flat itself.  Each
representation carries its own Hamiltonian, variational derivatives
(efforts), and state-modulated skew structure map, plus exact conversion
maps between the two, so simulations can be cross-checked rate for rate
and effort for effort.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .forms import (
    DegreeError,
    DiscreteForm,
    divergence,
    exterior_derivative,
    flux_velocity,
    hodge_star,
    integrate,
    interior_product,
    lie_derivative,
    pairing,
    sharp,
    wedge,
)

__all__ = [
    "MomentumState",
    "VelocityState",
    "EffortPair",
    "RatePair",
    "density_scalar",
    "kinetic_energy_momentum",
    "kinetic_energy_velocity",
    "efforts_momentum",
    "efforts_velocity",
    "structure_map_momentum",
    "structure_map_velocity",
    "rhs_momentum",
    "rhs_velocity",
    "to_velocity",
    "to_momentum",
    "pushforward_rates",
    "pullback_efforts",
    "dual_product",
    "total_mass",
]


class MomentumState(NamedTuple):
    """State (momentum 1-form, mass 2-form)."""

    momentum: DiscreteForm
    mass: DiscreteForm


class VelocityState(NamedTuple):
    """State (velocity 1-form, mass 2-form)."""

    velocity: DiscreteForm
    mass: DiscreteForm


class EffortPair(NamedTuple):
    """Variational derivatives: a 1-form and a 0-form."""

    flow: DiscreteForm
    mass: DiscreteForm


class RatePair(NamedTuple):
    """State rates: a 1-form and a 2-form, same slots as the state."""

    flow: DiscreteForm
    mass: DiscreteForm


def _check_state(flow: DiscreteForm, mass: DiscreteForm) -> None:
    if flow.degree != 1:
        raise DegreeError(f"flow slot must hold a 1-form, got degree {flow.degree}")
    if mass.degree != 2:
        raise DegreeError(f"mass slot must hold a 2-form, got degree {mass.degree}")
    if flow.grid is not mass.grid and flow.grid != mass.grid:
        raise ValueError("state components live on different grids")


def density_scalar(mass: DiscreteForm) -> DiscreteForm:
    """Pointwise density: the Hodge dual of the mass form.  Must be positive."""
    if mass.degree != 2:
        raise DegreeError("mass form must have degree 2")
    rho = hodge_star(mass)
    if not np.all(rho.components[0] > 0.0):
        raise ValueError("density must be strictly positive")
    return rho


def kinetic_energy_momentum(state: MomentumState) -> float:
    """Energy of a momentum-representation state: half the squared momentum
    norm weighted by inverse density."""
    _check_state(*state)
    rho = density_scalar(state.mass).components[0]
    integrand = wedge(state.momentum, hodge_star(state.momentum)) * (0.5 / rho)
    return integrate(integrand)


def kinetic_energy_velocity(state: VelocityState) -> float:
    """Energy of a velocity-representation state: half the density-weighted
    squared velocity norm."""
    _check_state(*state)
    rho = density_scalar(state.mass).components[0]
    integrand = wedge(state.velocity, hodge_star(state.velocity)) * (0.5 * rho)
    return integrate(integrand)


def efforts_momentum(state: MomentumState) -> EffortPair:
    """Variational derivatives of the momentum-representation energy.

    The flow effort is the mass-flux 1-form of the transport velocity; the
    mass effort is minus half the squared transport speed.
    """
    _check_state(*state)
    alpha = state.momentum
    rho = density_scalar(state.mass).components[0]
    e_flow = hodge_star(alpha) * (1.0 / rho)
    speed_sq = interior_product(sharp(alpha), alpha)
    e_mass = speed_sq * (-0.5 / rho**2)
    return EffortPair(e_flow, e_mass)


def efforts_velocity(state: VelocityState) -> EffortPair:
    """Variational derivatives of the velocity-representation energy.

    The flow effort is the mass flux; the mass effort is half the squared
    speed (the specific kinetic energy).
    """
    _check_state(*state)
    v_form = state.velocity
    rho = density_scalar(state.mass).components[0]
    e_flow = hodge_star(v_form) * rho
    e_mass = interior_product(sharp(v_form), v_form) * 0.5
    return EffortPair(e_flow, e_mass)


def structure_map_momentum(state: MomentumState, efforts: EffortPair) -> RatePair:
    """Skew structure map of the momentum representation.

    Maps an effort pair to state rates: coadjoint transport of the momentum
    along the flow effort plus the density-weighted mass-effort gradient,
    and minus the divergence of the density-weighted flow effort.
    """
    _check_state(*state)
    alpha = state.momentum
    rho = density_scalar(state.mass).components[0]
    carrier = flux_velocity(efforts.flow)
    f_flow = -1.0 * (
        lie_derivative(carrier, alpha)
        + wedge(divergence(carrier), alpha)
        + exterior_derivative(efforts.mass) * rho
    )
    f_mass = -1.0 * exterior_derivative(efforts.flow * rho)
    return RatePair(f_flow, f_mass)


def structure_map_velocity(state: VelocityState, efforts: EffortPair) -> RatePair:
    """Skew structure map of the velocity representation.

    The flow rate combines the mass-effort gradient with vorticity
    transport along the flow effort; the mass rate is minus the
    divergence of the flow effort.
    """
    _check_state(*state)
    rho = density_scalar(state.mass).components[0]
    carrier = flux_velocity(efforts.flow)
    vorticity = exterior_derivative(state.velocity)
    f_flow = -1.0 * (
        exterior_derivative(efforts.mass)
        + interior_product(carrier, vorticity) * (1.0 / rho)
    )
    f_mass = -1.0 * exterior_derivative(efforts.flow)
    return RatePair(f_flow, f_mass)


def rhs_momentum(state: MomentumState, force: DiscreteForm | None = None) -> RatePair:
    """Full state rate in the momentum representation, with optional force."""
    rates = structure_map_momentum(state, efforts_momentum(state))
    if force is not None:
        rates = RatePair(rates.flow + force, rates.mass)
    return rates


def rhs_velocity(state: VelocityState, force: DiscreteForm | None = None) -> RatePair:
    """Full state rate in the velocity representation.

    A distributed force is a momentum supply, so it enters divided by the
    density.
    """
    rates = structure_map_velocity(state, efforts_velocity(state))
    if force is not None:
        rho = density_scalar(state.mass).components[0]
        rates = RatePair(rates.flow + force * (1.0 / rho), rates.mass)
    return rates


def to_velocity(state: MomentumState) -> VelocityState:
    """Convert a momentum-representation state to the velocity representation."""
    _check_state(*state)
    rho = density_scalar(state.mass).components[0]
    return VelocityState(state.momentum * (1.0 / rho), state.mass)


def to_momentum(state: VelocityState) -> MomentumState:
    """Convert a velocity-representation state to the momentum representation."""
    _check_state(*state)
    rho = density_scalar(state.mass).components[0]
    return MomentumState(state.velocity * rho, state.mass)


def pushforward_rates(state: MomentumState, rates: RatePair) -> RatePair:
    """Convert momentum-representation rates to velocity-representation rates.

    Differentiating velocity = momentum / density in time gives the chain
    rule below; the mass rate is shared by both representations.
    """
    _check_state(*state)
    rho = density_scalar(state.mass).components[0]
    rho_rate = hodge_star(rates.mass).components[0]
    v_form = state.momentum * (1.0 / rho)
    v_rate = (rates.flow - v_form * rho_rate) * (1.0 / rho)
    return RatePair(v_rate, rates.mass)


def pullback_efforts(state: VelocityState, efforts: EffortPair) -> EffortPair:
    """Convert velocity-representation efforts to momentum-representation ones.

    The flow effort rescales by inverse density; the mass effort picks up
    the cross term from differentiating through the conversion map.
    """
    _check_state(*state)
    rho = density_scalar(state.mass).components[0]
    e_flow = efforts.flow * (1.0 / rho)
    cross = hodge_star(wedge(state.velocity, efforts.flow)) * (1.0 / rho)
    return EffortPair(e_flow, efforts.mass - cross)


def dual_product(rates: RatePair, efforts: EffortPair) -> float:
    """Duality product of a rate pair against an effort pair.

    With efforts equal to the variational derivatives this is the exact
    time derivative of the discrete energy along the given rates.
    """
    return pairing(rates.flow, efforts.flow) + pairing(rates.mass, efforts.mass)


def total_mass(mass: DiscreteForm) -> float:
    """Integral of the mass form over the domain."""
    if mass.degree != 2:
        raise DegreeError("mass form must have degree 2")
    return integrate(mass)
