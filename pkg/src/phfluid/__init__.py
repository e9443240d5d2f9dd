"""Discrete exterior calculus on flat 2D grids with a port-based energy
accounting layer for the kinetic-energy subsystem of compressible flow.

The package keeps every identity it relies on observable: duality of
advection operators, skewness of the interconnection maps, exactness of
the discrete Stokes theorem, and the per-step power balance of simulated
trajectories. `phfluid verify` checks the lot; `phfluid simulate` runs a
trajectory while recording the balance it is supposed to satisfy.
"""

from .algebra import (
    AdvectedQuantity,
    SemidirectDual,
    SemidirectElement,
    advect,
    advect_dual,
    advect_surface,
    coadjoint,
    coadjoint_surface,
    diamond,
    lie_bracket,
    semidirect_bracket,
    semidirect_coadjoint,
    semidirect_pairing,
    semidirect_surface,
    vector_bracket,
)
from .dirac import (
    PortSet,
    boundary_power,
    dirac_residual,
    distributed_power,
    energy_rate_series,
    EnergyReport,
    ports_momentum,
    ports_velocity,
    power_balance,
    power_continuity,
    storage_power,
)
from .energetics import (
    EffortPair,
    MomentumState,
    RatePair,
    VelocityState,
    dual_product,
    efforts_momentum,
    efforts_velocity,
    kinetic_energy_momentum,
    kinetic_energy_velocity,
    pullback_efforts,
    pushforward_rates,
    rhs_momentum,
    rhs_velocity,
    structure_map_momentum,
    structure_map_velocity,
    to_momentum,
    to_velocity,
    total_mass,
)
from .fields import (
    density_form,
    force_profile,
    random_trig_form,
    random_trig_scalar,
    velocity_form,
)
from .forms import (
    BoundaryForm,
    DegreeError,
    DiscreteForm,
    Grid,
    GridMismatchError,
    VectorFieldSample,
    boundary_integral,
    boundary_product,
    divergence,
    exterior_derivative,
    flat,
    flux_form,
    flux_velocity,
    hodge_star,
    integrate,
    interior_product,
    lie_derivative,
    musical,
    pairing,
    sharp,
    trace,
    wedge,
)
from .kernels import USING_COMPILED
from .simulator import (
    ConfigError,
    SimConfig,
    SimulationResult,
    build_force,
    build_grid,
    build_initial_state,
    project_walls,
    rk4_step,
    simulate,
    vorticity_diagnostic,
)
from .verification import IdentityResult, SuiteResult, run_suite

__version__ = "0.1.0"

__all__ = [
    "AdvectedQuantity",
    "BoundaryForm",
    "ConfigError",
    "DegreeError",
    "DiscreteForm",
    "EffortPair",
    "EnergyReport",
    "Grid",
    "GridMismatchError",
    "IdentityResult",
    "MomentumState",
    "PortSet",
    "RatePair",
    "SemidirectDual",
    "SemidirectElement",
    "SimConfig",
    "SimulationResult",
    "SuiteResult",
    "USING_COMPILED",
    "VectorFieldSample",
    "VelocityState",
    "advect",
    "advect_dual",
    "advect_surface",
    "boundary_integral",
    "boundary_power",
    "boundary_product",
    "build_force",
    "build_grid",
    "build_initial_state",
    "coadjoint",
    "coadjoint_surface",
    "density_form",
    "diamond",
    "dirac_residual",
    "distributed_power",
    "divergence",
    "dual_product",
    "efforts_momentum",
    "efforts_velocity",
    "energy_rate_series",
    "exterior_derivative",
    "flat",
    "flux_form",
    "flux_velocity",
    "force_profile",
    "hodge_star",
    "integrate",
    "interior_product",
    "kinetic_energy_momentum",
    "kinetic_energy_velocity",
    "lie_bracket",
    "lie_derivative",
    "musical",
    "pairing",
    "ports_momentum",
    "ports_velocity",
    "power_balance",
    "power_continuity",
    "project_walls",
    "pullback_efforts",
    "pushforward_rates",
    "random_trig_form",
    "random_trig_scalar",
    "rhs_momentum",
    "rhs_velocity",
    "rk4_step",
    "run_suite",
    "semidirect_bracket",
    "semidirect_coadjoint",
    "semidirect_pairing",
    "semidirect_surface",
    "sharp",
    "simulate",
    "storage_power",
    "structure_map_momentum",
    "structure_map_velocity",
    "to_momentum",
    "to_velocity",
    "total_mass",
    "trace",
    "vector_bracket",
    "velocity_form",
    "vorticity_diagnostic",
    "wedge",
]
