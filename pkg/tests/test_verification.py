"""The identity suite: order fitting, classification, and full-family runs."""

import numpy as np
import pytest

from phfluid.verification import (
    EXACT_FLOOR,
    IdentityResult,
    SuiteResult,
    fitted_order,
    run_suite,
)

# Identities the discretization satisfies to rounding on periodic grids.
PERIODIC_EXACT = {
    "hodge_musical_consistency",
    "exterior_derivative_nilpotency",
    "stokes_theorem",
    "integration_by_parts",
    "flux_bracket_isomorphism",
    "coadjoint_duality",
    "advection_duality_density",
    "advection_duality_function",
    "semidirect_duality",
    "structure_skewness_momentum",
    "structure_skewness_velocity",
    "power_balance_momentum",
    "power_balance_velocity",
    "representation_conjugacy_efforts",
    "vorticity_transport",
}


class TestFittedOrder:
    @pytest.mark.parametrize("order", [1.5, 3.0, 4.0])
    def test_recovers_power_law_slopes(self, order):
        resolutions = [16, 32, 64, 128]
        defects = [2.7 * n ** (-order) for n in resolutions]
        assert abs(fitted_order(resolutions, defects) - order) < 1e-12

    def test_zero_defects_fit_flat(self):
        assert abs(fitted_order([16, 32], [0.0, 0.0])) < 1e-10


@pytest.fixture(scope="module")
def periodic_suite():
    return run_suite(periodic=(True, True), resolutions=(32, 48))


@pytest.fixture(scope="module")
def bounded_suite():
    return run_suite(periodic=(False, False))


class TestPeriodicSuite:
    @pytest.fixture
    def suite(self, periodic_suite):
        return periodic_suite

    def test_everything_passes(self, suite):
        assert suite.passed
        assert suite.family == "periodic"
        assert suite.resolutions == (32, 48)
        assert len(suite.identities) == 16
        names = [item.name for item in suite.identities]
        assert len(set(names)) == len(names)

    def test_rounding_level_identities(self, suite):
        by_name = {item.name: item for item in suite.identities}
        for name in PERIODIC_EXACT:
            item = by_name[name]
            assert item.classification == "exact", name
            assert item.fitted_order is None, name
            assert all(v <= EXACT_FLOOR for v in item.defects.values()), name

    def test_defects_recorded_per_resolution(self, suite):
        for item in suite.identities:
            assert set(item.defects) == {32, 48}

    def test_runs_are_deterministic(self, suite):
        again = run_suite(periodic=(True, True), resolutions=(32, 48))
        for a, b in zip(suite.identities, again.identities):
            assert a == b


class TestBoundedSuite:
    @pytest.fixture
    def suite(self, bounded_suite):
        return bounded_suite

    def test_everything_passes(self, suite):
        assert suite.passed
        assert suite.family == "bounded"
        assert suite.resolutions == (32, 64, 128)

    def test_truncation_limited_identities_refine(self, suite):
        limited = [
            item for item in suite.identities
            if item.classification == "truncation-limited"
        ]
        assert limited, "expected at least one truncation-limited identity"
        for item in limited:
            assert item.fitted_order is not None and item.fitted_order >= 3.0
            finest = item.defects[max(item.defects)]
            assert finest <= item.tolerance

    def test_exact_identities_use_bounded_tolerance(self, suite):
        for item in suite.identities:
            if item.classification == "exact":
                assert item.tolerance == 1e-8


class TestSuiteShape:
    def test_family_label_override(self):
        suite = run_suite(
            periodic=(False, True), resolutions=(32,), family="channel"
        )
        assert suite.family == "channel"
        assert suite.periodic == (False, True)

    def test_mixed_axes_default_to_bounded(self):
        suite = run_suite(periodic=(False, True), resolutions=(32,))
        assert suite.family == "bounded"

    def test_single_resolution_skips_order_fit(self):
        suite = run_suite(periodic=(True, True), resolutions=(32,))
        assert suite.passed
        for item in suite.identities:
            assert item.fitted_order is None

    def test_empty_ladder_is_rejected(self):
        with pytest.raises(ValueError, match="resolution"):
            run_suite(resolutions=())

    def test_result_types(self):
        suite = run_suite(periodic=(True, True), resolutions=(32,))
        assert isinstance(suite, SuiteResult)
        assert all(isinstance(item, IdentityResult) for item in suite.identities)
        assert all(
            isinstance(v, float)
            for item in suite.identities
            for v in item.defects.values()
        )
