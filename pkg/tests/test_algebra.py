"""Bracket, coadjoint, advection, and semidirect operators.

The fixed-value expectations below were derived by hand from the operator
definitions on simple trigonometric fields (one sine mode, unit metric,
2*pi-periodic domain), where every Lie derivative reduces to a single
partial derivative that the spectral stencil reproduces to roundoff.
"""

import numpy as np
import pytest

from phfluid import (
    AdvectedQuantity,
    DegreeError,
    SemidirectDual,
    SemidirectElement,
    advect,
    advect_dual,
    advect_surface,
    boundary_integral,
    coadjoint,
    coadjoint_surface,
    diamond,
    flux_form,
    flux_velocity,
    lie_bracket,
    pairing,
    random_trig_form,
    semidirect_bracket,
    semidirect_coadjoint,
    semidirect_pairing,
    semidirect_surface,
    sharp,
    vector_bracket,
    velocity_form,
    wedge,
)
from phfluid.forms import DiscreteForm, VectorFieldSample

from conftest import make_grid

ROUNDOFF = 1e-12


def one_form(grid, p, q):
    zeros = np.zeros(grid.resolution)
    return DiscreteForm(grid, 1, (np.asarray(p) + zeros, np.asarray(q) + zeros))


def constant_dy(grid):
    return one_form(grid, 0.0, 1.0)


class TestLieBracket:
    def test_self_bracket_of_constants_vanishes(self, periodic_grid):
        dy = constant_dy(periodic_grid)
        assert lie_bracket(dy, dy).max_abs() < ROUNDOFF

    def test_unit_flow_against_sine(self, periodic_grid):
        # omega = dy has flow (1, 0); transporting sin(x) dy gives the
        # bracket -cos(x) dy since the divergence term drops.
        x, _ = periodic_grid.meshes
        omega = constant_dy(periodic_grid)
        beta = one_form(periodic_grid, 0.0, np.sin(x))
        result = lie_bracket(omega, beta)
        assert np.max(np.abs(result.components[0])) < ROUNDOFF
        assert np.max(np.abs(result.components[1] + np.cos(x))) < ROUNDOFF

    def test_antisymmetry(self, periodic_grid, rng):
        a = random_trig_form(periodic_grid, 1, rng)
        b = random_trig_form(periodic_grid, 1, rng)
        assert (lie_bracket(a, b) + lie_bracket(b, a)).max_abs() < ROUNDOFF

    def test_matches_vector_field_bracket(self, rng):
        # The flux map intertwines the form bracket with the (right) vector
        # field bracket.  Trig data of wavenumber <= 3 keeps all products
        # below the Nyquist mode, so the spectral grid sees no truncation.
        grid = make_grid(64)
        omega = random_trig_form(grid, 1, rng)
        beta = random_trig_form(grid, 1, rng)
        via_vectors = flux_form(vector_bracket(flux_velocity(omega), flux_velocity(beta)))
        assert (via_vectors - lie_bracket(omega, beta)).max_abs() < 1e-6

    def test_vector_bracket_antisymmetric(self, periodic_grid, rng):
        def sample(seed):
            local = np.random.default_rng(seed)
            return VectorFieldSample(
                periodic_grid,
                tuple(random_trig_form(periodic_grid, 0, local).components[0] for _ in "xy"),
            )

        u, v = sample(1), sample(2)
        w = vector_bracket(u, v)
        flipped = vector_bracket(v, u)
        for c, d in zip(w.components, flipped.components):
            assert np.max(np.abs(c + d)) < ROUNDOFF


class TestCoadjoint:
    def test_constants_annihilated(self, periodic_grid):
        dy = constant_dy(periodic_grid)
        dx = one_form(periodic_grid, 1.0, 0.0)
        assert coadjoint(dy, dx).max_abs() < ROUNDOFF

    def test_unit_flow_against_sine(self, periodic_grid):
        x, _ = periodic_grid.meshes
        omega = constant_dy(periodic_grid)
        alpha = one_form(periodic_grid, np.sin(x), 0.0)
        result = coadjoint(omega, alpha)
        assert np.max(np.abs(result.components[0] - np.cos(x))) < ROUNDOFF
        assert np.max(np.abs(result.components[1])) < ROUNDOFF

    def test_surface_form_on_basis_data(self):
        grid = make_grid(16, periodic=(False, False))
        omega = constant_dy(grid)  # flow (1, 0)
        alpha = one_form(grid, 1.0, 0.0)
        beta = constant_dy(grid)
        eta = coadjoint_surface(omega, alpha, beta)
        # i_(1,0)(dx^dy) = dy: tangential on vertical edges, zero on the rest
        assert np.allclose(eta.edges["west"], 1.0)
        assert np.allclose(eta.edges["east"], 1.0)
        assert np.allclose(eta.edges["south"], 0.0)
        assert np.allclose(eta.edges["north"], 0.0)

    @pytest.mark.parametrize("periodic", [(True, True), (False, False), (False, True)])
    def test_duality_closes(self, periodic, rng):
        grid = make_grid(48, periodic=periodic)
        omega = random_trig_form(grid, 1, rng)
        alpha = random_trig_form(grid, 1, rng)
        beta = random_trig_form(grid, 1, rng)
        lhs = pairing(coadjoint(omega, alpha), beta)
        rhs = pairing(alpha, lie_bracket(omega, beta))
        surface = boundary_integral(coadjoint_surface(omega, alpha, beta))
        scale = max(abs(lhs), abs(rhs), 1.0)
        assert abs(lhs - rhs - surface) < 1e-11 * scale


class TestAdvection:
    def test_constant_function_is_transported_trivially(self, periodic_grid, rng):
        omega = random_trig_form(periodic_grid, 1, rng)
        a = AdvectedQuantity(
            DiscreteForm(periodic_grid, 0, (np.ones(periodic_grid.resolution),)),
            "function",
        )
        assert advect(omega, a).max_abs() < ROUNDOFF

    def test_density_against_compressive_flow(self, periodic_grid):
        # flow (sin x, 0) compresses the volume form at rate cos x.
        x, _ = periodic_grid.meshes
        omega = one_form(periodic_grid, 0.0, np.sin(x))
        a = AdvectedQuantity(periodic_grid.volume_form(), "density")
        result = advect(omega, a)
        assert np.max(np.abs(result.components[0] - np.cos(x))) < ROUNDOFF

    def test_volume_form_held_by_incompressible_flow(self, periodic_grid):
        omega = flux_form(sharp(velocity_form(periodic_grid, "taylor_green")))
        a = AdvectedQuantity(periodic_grid.volume_form(), "density")
        assert advect(omega, a).max_abs() < ROUNDOFF

    def test_dual_density_case(self, periodic_grid):
        _, y = periodic_grid.meshes
        a = AdvectedQuantity(periodic_grid.volume_form() * 2.0, "density")
        abar = DiscreteForm(periodic_grid, 0, (np.sin(y),))
        result = advect_dual(a, abar)
        assert np.max(np.abs(result.components[0])) < ROUNDOFF
        assert np.max(np.abs(result.components[1] + 2.0 * np.cos(y))) < ROUNDOFF

    def test_dual_density_constant_partner(self, periodic_grid):
        a = AdvectedQuantity(periodic_grid.volume_form(), "density")
        abar = DiscreteForm(periodic_grid, 0, (np.full(periodic_grid.resolution, 3.0),))
        assert advect_dual(a, abar).max_abs() < ROUNDOFF

    def test_dual_function_case(self, periodic_grid):
        x, _ = periodic_grid.meshes
        a = AdvectedQuantity(DiscreteForm(periodic_grid, 0, (np.sin(x),)), "function")
        result = advect_dual(a, periodic_grid.volume_form())
        assert np.max(np.abs(result.components[0] - np.cos(x))) < ROUNDOFF
        assert np.max(np.abs(result.components[1])) < ROUNDOFF

    def test_function_surface_identically_zero(self, bounded_grid, rng):
        a = AdvectedQuantity(random_trig_form(bounded_grid, 0, rng), "function")
        omega = random_trig_form(bounded_grid, 1, rng)
        abar = random_trig_form(bounded_grid, 2, rng)
        assert advect_surface(a, omega, abar).max_abs() == 0.0

    @pytest.mark.parametrize("kind", ["density", "function"])
    @pytest.mark.parametrize("periodic", [(True, True), (False, False)])
    def test_duality_closes(self, kind, periodic, rng):
        grid = make_grid(48, periodic=periodic)
        degree = 2 if kind == "density" else 0
        a = AdvectedQuantity(random_trig_form(grid, degree, rng), kind)
        abar = random_trig_form(grid, 2 - degree, rng)
        omega = random_trig_form(grid, 1, rng)
        lhs = pairing(advect(omega, a), abar)
        rhs = pairing(advect_dual(a, abar), omega)
        surface = boundary_integral(advect_surface(a, omega, abar))
        scale = max(abs(lhs), abs(rhs), 1.0)
        assert abs(lhs - rhs - surface) < 1e-11 * scale

    def test_kind_tag_checked(self, periodic_grid, rng):
        with pytest.raises(DegreeError):
            AdvectedQuantity(random_trig_form(periodic_grid, 0, rng), "density")
        with pytest.raises(ValueError):
            AdvectedQuantity(random_trig_form(periodic_grid, 2, rng), "mass")
        a = AdvectedQuantity(random_trig_form(periodic_grid, 2, rng), "density")
        with pytest.raises(DegreeError):
            advect_dual(a, random_trig_form(periodic_grid, 1, rng))


class TestDiamond:
    def test_linearity_through_zero(self, periodic_grid):
        a = AdvectedQuantity(periodic_grid.volume_form(), "density")
        zero = DiscreteForm(periodic_grid, 0, (np.zeros(periodic_grid.resolution),))
        assert diamond(zero, a).max_abs() == 0.0

    def test_scalar_partner_sign(self, periodic_grid):
        # For a degree-0 partner the sign prefactor is -1, flipping the dual
        # advection map: the result is +(*a) d(abar).
        _, y = periodic_grid.meshes
        a = AdvectedQuantity(periodic_grid.volume_form(), "density")
        abar = DiscreteForm(periodic_grid, 0, (np.sin(y),))
        result = diamond(abar, a)
        assert np.max(np.abs(result.components[1] - np.cos(y))) < ROUNDOFF

    def test_degree_mismatch(self, periodic_grid, rng):
        a = AdvectedQuantity(random_trig_form(periodic_grid, 2, rng), "density")
        with pytest.raises(DegreeError):
            diamond(random_trig_form(periodic_grid, 2, rng), a)

    @pytest.mark.parametrize("kind", ["density", "function"])
    def test_pairing_identity(self, kind, rng):
        grid = make_grid(48, periodic=(False, False))
        degree = 2 if kind == "density" else 0
        k = 2 - degree
        sign = -1.0 if (k * (2 - k)) % 2 == 0 else 1.0
        a = AdvectedQuantity(random_trig_form(grid, degree, rng), kind)
        abar = random_trig_form(grid, 2 - degree, rng)
        omega = random_trig_form(grid, 1, rng)
        lhs = pairing(diamond(abar, a), omega)
        rhs = sign * (
            pairing(advect(omega, a), abar)
            - boundary_integral(advect_surface(a, omega, abar))
        )
        assert abs(lhs - rhs) < 1e-11 * max(abs(lhs), 1.0)


class TestSemidirect:
    def test_bracket_self_annihilates(self, periodic_grid, rng):
        element = SemidirectElement(
            random_trig_form(periodic_grid, 1, rng),
            random_trig_form(periodic_grid, 0, rng),
        )
        out = semidirect_bracket(element, element)
        assert out.flow.max_abs() < ROUNDOFF
        assert out.advected.max_abs() < ROUNDOFF

    def test_bracket_mixed_slots(self, periodic_grid):
        # First element carries pure flow (1, 0); second carries only the
        # scalar slot sin(x).  Only the transport of that scalar survives.
        x, _ = periodic_grid.meshes
        zero0 = DiscreteForm(periodic_grid, 0, (np.zeros(periodic_grid.resolution),))
        zero1 = one_form(periodic_grid, 0.0, 0.0)
        first = SemidirectElement(constant_dy(periodic_grid), zero0)
        second = SemidirectElement(zero1, DiscreteForm(periodic_grid, 0, (np.sin(x),)))
        out = semidirect_bracket(first, second)
        assert out.flow.max_abs() < ROUNDOFF
        assert np.max(np.abs(out.advected.components[0] + np.cos(x))) < ROUNDOFF

    def test_coadjoint_composes_the_pieces(self, periodic_grid):
        x, _ = periodic_grid.meshes
        zero0 = DiscreteForm(periodic_grid, 0, (np.zeros(periodic_grid.resolution),))
        element = SemidirectElement(constant_dy(periodic_grid), zero0)
        dual = SemidirectDual(
            one_form(periodic_grid, np.sin(x), 0.0), periodic_grid.volume_form()
        )
        out = semidirect_coadjoint(element, dual)
        assert np.max(np.abs(out.momentum.components[0] - np.cos(x))) < ROUNDOFF
        assert np.max(np.abs(out.momentum.components[1])) < ROUNDOFF
        assert out.advected.max_abs() < ROUNDOFF

    def test_pairing_on_basis_forms(self):
        grid = make_grid(32, extents=(2.0 * np.pi, 2.0 * np.pi))
        zero0 = DiscreteForm(grid, 0, (np.zeros(grid.resolution),))
        dual = SemidirectDual(one_form(grid, 1.0, 0.0), grid.volume_form() * 0.0)
        element = SemidirectElement(constant_dy(grid), zero0)
        value = semidirect_pairing(dual, element)
        assert np.isclose(value, (2.0 * np.pi) ** 2, rtol=1e-13)

    def test_pairing_additive_in_both_slots(self, periodic_grid, rng):
        def elem():
            return SemidirectElement(
                random_trig_form(periodic_grid, 1, rng),
                random_trig_form(periodic_grid, 0, rng),
            )

        dual = SemidirectDual(
            random_trig_form(periodic_grid, 1, rng),
            random_trig_form(periodic_grid, 2, rng),
        )
        a, b = elem(), elem()
        summed = SemidirectElement(a.flow + b.flow, a.advected + b.advected)
        total = semidirect_pairing(dual, summed)
        parts = semidirect_pairing(dual, a) + semidirect_pairing(dual, b)
        assert abs(total - parts) < 1e-10 * max(abs(total), 1.0)

    def test_degree_consistency_enforced(self, periodic_grid, rng):
        element = SemidirectElement(
            random_trig_form(periodic_grid, 1, rng),
            random_trig_form(periodic_grid, 0, rng),
        )
        bad_dual = SemidirectDual(
            random_trig_form(periodic_grid, 1, rng),
            random_trig_form(periodic_grid, 0, rng),
        )
        with pytest.raises(DegreeError):
            semidirect_coadjoint(element, bad_dual)

    @pytest.mark.parametrize("advected_kind", ["density", "function"])
    @pytest.mark.parametrize("periodic", [(True, True), (False, False)])
    def test_full_duality_closes(self, advected_kind, periodic, rng):
        grid = make_grid(48, periodic=periodic)
        degree = 2 if advected_kind == "density" else 0
        first = SemidirectElement(
            random_trig_form(grid, 1, rng), random_trig_form(grid, 2 - degree, rng)
        )
        second = SemidirectElement(
            random_trig_form(grid, 1, rng), random_trig_form(grid, 2 - degree, rng)
        )
        dual = SemidirectDual(
            random_trig_form(grid, 1, rng), random_trig_form(grid, degree, rng)
        )
        lhs = semidirect_pairing(semidirect_coadjoint(first, dual), second)
        rhs = semidirect_pairing(dual, semidirect_bracket(first, second))
        surface = boundary_integral(semidirect_surface(first, dual, second))
        scale = max(abs(lhs), abs(rhs), 1.0)
        assert abs(lhs - rhs - surface) < 1e-11 * scale

    def test_surface_reduces_to_coadjoint_surface(self, bounded_grid, rng):
        omega1 = random_trig_form(bounded_grid, 1, rng)
        alpha = random_trig_form(bounded_grid, 1, rng)
        omega2 = random_trig_form(bounded_grid, 1, rng)
        zeros2 = bounded_grid.volume_form() * 0.0
        zeros0 = DiscreteForm(bounded_grid, 0, (np.zeros(bounded_grid.resolution),))
        first = SemidirectElement(omega1, zeros0)
        second = SemidirectElement(omega2, zeros0)
        dual = SemidirectDual(alpha, zeros2)
        full = semidirect_surface(first, dual, second)
        plain = coadjoint_surface(omega1, alpha, omega2)
        assert (full - plain).max_abs() == 0.0
