"""Lie algebra structure on flux 1-forms and its semidirect extension.

The algebra consists of (n-1)-forms (1-forms in 2D) regarded as mass-flux
images of vector fields; the dual space consists of plain 1-forms.  All
brackets and coadjoint maps reduce to Lie derivatives along the unflattened
vector field plus divergence corrections, and every duality defect is the
oriented boundary integral of an explicit surface form, which these
functions also expose.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .forms import (
    BoundaryForm,
    DegreeError,
    DiscreteForm,
    VectorFieldSample,
    divergence,
    exterior_derivative,
    flux_velocity,
    hodge_star,
    interior_product,
    lie_derivative,
    pairing,
    trace,
    wedge,
)

__all__ = [
    "AdvectedQuantity",
    "SemidirectElement",
    "SemidirectDual",
    "vector_bracket",
    "lie_bracket",
    "coadjoint",
    "coadjoint_surface",
    "advect",
    "advect_dual",
    "advect_surface",
    "diamond",
    "semidirect_bracket",
    "semidirect_coadjoint",
    "semidirect_surface",
    "semidirect_pairing",
]


@dataclass(frozen=True)
class AdvectedQuantity:
    """An advected state: a density (top form) or a scalar function.

    The kind tag exists because in 2D the degree alone cannot distinguish
    the two advection bundles once forms start moving through generic code.
    """

    form: DiscreteForm
    kind: str

    _DEGREES = {"density": 2, "function": 0}

    def __post_init__(self) -> None:
        if self.kind not in self._DEGREES:
            raise ValueError("kind must be 'density' or 'function'")
        expected = self._DEGREES[self.kind]
        if self.form.degree != expected:
            raise DegreeError(
                f"advected {self.kind} must have degree {expected}, "
                f"got {self.form.degree}"
            )


class SemidirectElement(NamedTuple):
    """Element (flux 1-form, advected-dual partner) of the extended algebra."""

    flow: DiscreteForm
    advected: DiscreteForm


class SemidirectDual(NamedTuple):
    """Dual element (momentum 1-form, advected state)."""

    momentum: DiscreteForm
    advected: DiscreteForm


def _as_form(a) -> DiscreteForm:
    return a.form if isinstance(a, AdvectedQuantity) else a


def _advected_degree(a: DiscreteForm, what: str) -> int:
    if a.degree not in (0, 2):
        raise DegreeError(f"{what} must have degree 0 or 2, got {a.degree}")
    return a.degree


def vector_bracket(u: VectorFieldSample, v: VectorFieldSample) -> VectorFieldSample:
    """Right Lie-algebra bracket of vector fields: minus the Jacobi bracket."""
    grid = u.grid
    ux, uy = u.components
    vx, vy = v.components
    d = grid.derivative
    adv_v = (ux * d(vx, 0) + uy * d(vx, 1), ux * d(vy, 0) + uy * d(vy, 1))
    adv_u = (vx * d(ux, 0) + vy * d(ux, 1), vx * d(uy, 0) + vy * d(uy, 1))
    return VectorFieldSample(grid, (adv_u[0] - adv_v[0], adv_u[1] - adv_v[1]))


def lie_bracket(omega: DiscreteForm, beta: DiscreteForm) -> DiscreteForm:
    """Algebra bracket on flux 1-forms: -L_w beta + div(w) beta, w the flow of omega."""
    w = flux_velocity(omega)
    return wedge(divergence(w), beta) - lie_derivative(w, beta)


def coadjoint(omega: DiscreteForm, alpha: DiscreteForm) -> DiscreteForm:
    """Coadjoint action on momentum 1-forms: L_w alpha + div(w) alpha."""
    w = flux_velocity(omega)
    return lie_derivative(w, alpha) + wedge(divergence(w), alpha)


def coadjoint_surface(
    omega: DiscreteForm, alpha: DiscreteForm, beta: DiscreteForm
) -> BoundaryForm:
    """Surface form closing the coadjoint duality defect: i_w(alpha^beta)."""
    return trace(interior_product(flux_velocity(omega), wedge(alpha, beta)))


def advect(omega: DiscreteForm, a) -> DiscreteForm:
    """Advection rate map: the Lie derivative of the advected state along omega.

    The advected state evolves as da/dt = -advect(omega, a).
    """
    form = _as_form(a)
    _advected_degree(form, "advected state")
    return lie_derivative(flux_velocity(omega), form)


def advect_dual(a, abar: DiscreteForm) -> DiscreteForm:
    """Dual of the advection rate map against the advected-state pairing.

    For an advected density (degree 2) with degree-0 partner: -(*a) d(abar);
    for an advected function (degree 0) with top-degree partner: (*abar) d(a).
    """
    form = _as_form(a)
    degree = _advected_degree(form, "advected state")
    if abar.degree != 2 - degree:
        raise DegreeError(
            f"dual partner must have degree {2 - degree}, got {abar.degree}"
        )
    if degree == 2:
        scale = hodge_star(form)
        return -1.0 * wedge(scale, exterior_derivative(abar))
    scale = hodge_star(abar)
    return wedge(scale, exterior_derivative(form))


def advect_surface(a, omega: DiscreteForm, abar: DiscreteForm) -> BoundaryForm:
    """Surface form for the advection duality defect.

    Identically zero for an advected function; for an advected density it is
    (*a) omega^abar pulled back to the boundary.
    """
    form = _as_form(a)
    degree = _advected_degree(form, "advected state")
    if degree == 0:
        grid = form.grid
        zeros = {
            name: np.zeros(grid.resolution[0 if name in ("south", "north") else 1])
            for name in grid.edge_names
        }
        return BoundaryForm(grid, 1, zeros)
    eta = wedge(hodge_star(form), wedge(omega, abar))
    return trace(eta)


def diamond(abar: DiscreteForm, a) -> DiscreteForm:
    """Diamond operator: signed dual advection map, landing in momentum 1-forms."""
    k = abar.degree
    c = k * (2 - k)
    sign = -1.0 if c % 2 == 0 else 1.0
    return sign * advect_dual(a, abar)


def _check_semidirect_pair(element: SemidirectElement, dual: SemidirectDual) -> None:
    if element.flow.degree != 1 or dual.momentum.degree != 1:
        raise DegreeError("flow and momentum slots must hold 1-forms")
    ka = _advected_degree(dual.advected, "advected state")
    if element.advected.degree != 2 - ka:
        raise DegreeError(
            "advected slots of element and dual must have complementary degrees"
        )


def semidirect_bracket(
    first: SemidirectElement, second: SemidirectElement
) -> SemidirectElement:
    """Bracket on the semidirect extension by the advected-dual slot."""
    w1 = flux_velocity(first.flow)
    w2 = flux_velocity(second.flow)
    return SemidirectElement(
        lie_bracket(first.flow, second.flow),
        lie_derivative(w2, first.advected) - lie_derivative(w1, second.advected),
    )


def semidirect_coadjoint(
    element: SemidirectElement, dual: SemidirectDual
) -> SemidirectDual:
    """Coadjoint action of the semidirect algebra on its dual."""
    _check_semidirect_pair(element, dual)
    return SemidirectDual(
        coadjoint(element.flow, dual.momentum)
        + diamond(element.advected, dual.advected),
        lie_derivative(flux_velocity(element.flow), dual.advected),
    )


def semidirect_surface(
    element: SemidirectElement, dual: SemidirectDual, second: SemidirectElement
) -> BoundaryForm:
    """Surface form closing the semidirect coadjoint duality defect."""
    _check_semidirect_pair(element, dual)
    _check_semidirect_pair(second, dual)
    k = element.advected.degree
    c = k * (2 - k)
    sign = 1.0 if c % 2 == 0 else -1.0
    w1 = flux_velocity(element.flow)
    w2 = flux_velocity(second.flow)
    eta = coadjoint_surface(element.flow, dual.momentum, second.flow)
    eta = eta + sign * advect_surface(dual.advected, second.flow, element.advected)
    eta = eta - trace(interior_product(w2, wedge(dual.advected, element.advected)))
    eta = eta + trace(interior_product(w1, wedge(dual.advected, second.advected)))
    return eta


def semidirect_pairing(dual: SemidirectDual, element: SemidirectElement) -> float:
    """Duality pairing of the semidirect algebra with its dual."""
    _check_semidirect_pair(element, dual)
    return pairing(dual.momentum, element.flow) + pairing(
        dual.advected, element.advected
    )
