"""Discrete exterior calculus on flat rectangular 2D grids.

Differential forms of degree 0, 1, 2 are sampled at the nodes of a tensor
grid (collocated, no staggering).  Each axis is either periodic or bounded;
the metric is a constant diagonal (m1, m2), so all Hodge and musical maps
are pointwise rescalings.

Degree-1 components are coefficients against (dx, dy); the single degree-2
component is the coefficient against dx^dy.  Boundary data lives on up to
four edges ('west', 'east', 'south', 'north'), sampled in increasing
coordinate order; the induced boundary orientation is counterclockwise
(outward normal), applied as a per-edge sign inside integrals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Mapping

import numpy as np

from . import kernels

__all__ = [
    "DegreeError",
    "GridMismatchError",
    "Grid",
    "DiscreteForm",
    "VectorFieldSample",
    "BoundaryForm",
    "exterior_derivative",
    "wedge",
    "hodge_star",
    "flat",
    "sharp",
    "flux_form",
    "flux_velocity",
    "musical",
    "interior_product",
    "lie_derivative",
    "divergence",
    "trace",
    "integrate",
    "pairing",
    "boundary_integral",
    "boundary_product",
]


class DegreeError(ValueError):
    """An operation received a form of the wrong degree."""


class GridMismatchError(ValueError):
    """Operands sampled on different grids were combined."""


@dataclass(frozen=True)
class Grid:
    """Flat rectangular grid: extents, resolution, per-axis topology, metric.

    Periodic axes sample [0, L) with spacing L/N; bounded axes sample [0, L]
    with spacing L/(N-1) so both endpoints are nodes.
    """

    extents: tuple[float, float]
    resolution: tuple[int, int]
    periodic: tuple[bool, bool] = (True, True)
    metric: tuple[float, float] = (1.0, 1.0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "extents", tuple(float(v) for v in self.extents))
        object.__setattr__(self, "resolution", tuple(int(v) for v in self.resolution))
        object.__setattr__(self, "periodic", tuple(bool(v) for v in self.periodic))
        object.__setattr__(self, "metric", tuple(float(v) for v in self.metric))
        for name, pair in (("extents", self.extents), ("resolution", self.resolution),
                           ("periodic", self.periodic), ("metric", self.metric)):
            if len(pair) != 2:
                raise ValueError(f"{name} must have exactly two entries")
        if any(not math.isfinite(v) or v <= 0.0 for v in self.extents):
            raise ValueError(f"extents must be positive and finite, got {self.extents}")
        if any(n < 8 for n in self.resolution):
            raise ValueError(f"resolution must be at least 8 per axis, got {self.resolution}")
        if any(not math.isfinite(v) or v <= 0.0 for v in self.metric):
            raise ValueError(f"metric entries must be positive and finite, got {self.metric}")

    @cached_property
    def spacing(self) -> tuple[float, float]:
        return tuple(
            L / n if per else L / (n - 1)
            for L, n, per in zip(self.extents, self.resolution, self.periodic)
        )

    @cached_property
    def volume_scale(self) -> float:
        """Coefficient of the volume form against dx^dy: sqrt(m1*m2)."""
        return math.sqrt(self.metric[0] * self.metric[1])

    def nodes(self, axis: int) -> np.ndarray:
        out = self.spacing[axis] * np.arange(self.resolution[axis])
        out.flags.writeable = False
        return out

    @cached_property
    def meshes(self) -> tuple[np.ndarray, np.ndarray]:
        x, y = np.meshgrid(self.nodes(0), self.nodes(1), indexing="ij")
        x.flags.writeable = False
        y.flags.writeable = False
        return x, y

    @cached_property
    def axis_weights(self) -> tuple[np.ndarray, np.ndarray]:
        return tuple(
            kernels.quadrature_weights(n, h, per)
            for n, h, per in zip(self.resolution, self.spacing, self.periodic)
        )

    @cached_property
    def edge_names(self) -> tuple[str, ...]:
        names: list[str] = []
        if not self.periodic[0]:
            names += ["west", "east"]
        if not self.periodic[1]:
            names += ["south", "north"]
        return tuple(names)

    def derivative(self, values: np.ndarray, axis: int) -> np.ndarray:
        if self.periodic[axis]:
            return kernels.diff_periodic(values, axis, self.extents[axis])
        return kernels.diff_bounded(values, axis, self.spacing[axis])

    def volume_form(self) -> "DiscreteForm":
        return DiscreteForm(
            self, 2, (np.full(self.resolution, self.volume_scale),)
        )

    def sample_scalar(self, func: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> np.ndarray:
        x, y = self.meshes
        return np.broadcast_to(np.asarray(func(x, y), dtype=np.float64), self.resolution).copy()


_COMPONENT_COUNT = {0: 1, 1: 2, 2: 1}


def _check_components(grid: Grid, degree: int, components: tuple) -> tuple:
    if degree not in _COMPONENT_COUNT:
        raise DegreeError(f"degree must be 0, 1 or 2, got {degree}")
    if len(components) != _COMPONENT_COUNT[degree]:
        raise ValueError(
            f"degree {degree} needs {_COMPONENT_COUNT[degree]} component(s), "
            f"got {len(components)}"
        )
    out = []
    for comp in components:
        arr = np.asarray(comp, dtype=np.float64)
        if arr.shape != tuple(grid.resolution):
            raise ValueError(
                f"component shape {arr.shape} does not match grid resolution {grid.resolution}"
            )
        out.append(arr)
    return tuple(out)


@dataclass(frozen=True)
class DiscreteForm:
    """A differential form sampled at grid nodes.  Treat as immutable."""

    grid: Grid
    degree: int
    components: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "components", _check_components(self.grid, self.degree, self.components)
        )

    def max_abs(self) -> float:
        return max(float(np.max(np.abs(c))) for c in self.components)

    def __add__(self, other: "DiscreteForm") -> "DiscreteForm":
        _same_grid(self, other)
        if self.degree != other.degree:
            raise DegreeError("cannot add forms of different degree")
        return DiscreteForm(
            self.grid, self.degree,
            tuple(a + b for a, b in zip(self.components, other.components)),
        )

    def __sub__(self, other: "DiscreteForm") -> "DiscreteForm":
        return self + (-other)

    def __neg__(self) -> "DiscreteForm":
        return DiscreteForm(self.grid, self.degree, tuple(-c for c in self.components))

    def __mul__(self, factor) -> "DiscreteForm":
        return DiscreteForm(self.grid, self.degree, tuple(c * factor for c in self.components))

    __rmul__ = __mul__

    def __truediv__(self, factor) -> "DiscreteForm":
        return DiscreteForm(self.grid, self.degree, tuple(c / factor for c in self.components))


@dataclass(frozen=True)
class VectorFieldSample:
    """A vector field sampled at grid nodes, components against (d/dx, d/dy)."""

    grid: Grid
    components: tuple[np.ndarray, np.ndarray]

    def __post_init__(self) -> None:
        comps = []
        for comp in self.components:
            arr = np.asarray(comp, dtype=np.float64)
            if arr.shape != tuple(self.grid.resolution):
                raise ValueError(
                    f"component shape {arr.shape} does not match grid resolution "
                    f"{self.grid.resolution}"
                )
            comps.append(arr)
        if len(comps) != 2:
            raise ValueError("vector field needs exactly two components")
        object.__setattr__(self, "components", tuple(comps))

    def max_norm(self) -> float:
        vx, vy = self.components
        return float(np.max(np.sqrt(vx * vx + vy * vy)))

    def __sub__(self, other: "VectorFieldSample") -> "VectorFieldSample":
        _same_grid(self, other)
        return VectorFieldSample(
            self.grid, tuple(a - b for a, b in zip(self.components, other.components))
        )


# Edge bookkeeping: key -> (axis normal to the edge, node index along that
# axis, sign of the counterclockwise traversal along the edge tangent).
_EDGE_TABLE = {
    "west": (0, 0, -1.0),
    "east": (0, -1, +1.0),
    "south": (1, 0, +1.0),
    "north": (1, -1, -1.0),
}


@dataclass(frozen=True)
class BoundaryForm:
    """Per-edge boundary samples of degree 0 or 1 (already pulled back).

    Degree-1 data stores the tangential coefficient in increasing coordinate
    order; orientation signs are applied when integrating.  Fully periodic
    grids have no edges and the boundary form is empty.
    """

    grid: Grid
    degree: int
    edges: Mapping[str, np.ndarray]

    def __post_init__(self) -> None:
        if self.degree not in (0, 1):
            raise DegreeError("boundary forms have degree 0 or 1")
        cleaned = {}
        for name, samples in self.edges.items():
            if name not in self.grid.edge_names:
                raise ValueError(f"grid has no '{name}' edge")
            normal_axis, _, _ = _EDGE_TABLE[name]
            expected = self.grid.resolution[1 - normal_axis]
            arr = np.asarray(samples, dtype=np.float64)
            if arr.shape != (expected,):
                raise ValueError(
                    f"edge '{name}' expects {expected} samples, got {arr.shape}"
                )
            cleaned[name] = arr
        object.__setattr__(self, "edges", cleaned)

    @property
    def is_empty(self) -> bool:
        return not self.edges

    def max_abs(self) -> float:
        if self.is_empty:
            return 0.0
        return max(float(np.max(np.abs(v))) for v in self.edges.values())

    def __add__(self, other: "BoundaryForm") -> "BoundaryForm":
        _same_grid(self, other)
        if self.degree != other.degree:
            raise DegreeError("cannot add boundary forms of different degree")
        keys = set(self.edges) | set(other.edges)
        merged = {}
        for key in keys:
            a = self.edges.get(key)
            b = other.edges.get(key)
            merged[key] = (0.0 if a is None else a) + (0.0 if b is None else b)
        return BoundaryForm(self.grid, self.degree, merged)

    def __sub__(self, other: "BoundaryForm") -> "BoundaryForm":
        return self + (other * -1.0)

    def __mul__(self, factor: float) -> "BoundaryForm":
        return BoundaryForm(
            self.grid, self.degree, {k: v * factor for k, v in self.edges.items()}
        )

    __rmul__ = __mul__


def _same_grid(*objs) -> None:
    grid = objs[0].grid
    for obj in objs[1:]:
        if obj.grid != grid:
            raise GridMismatchError("operands live on different grids")


def _require_degree(form: DiscreteForm, *degrees: int, what: str = "form") -> None:
    if form.degree not in degrees:
        allowed = " or ".join(str(d) for d in degrees)
        raise DegreeError(f"{what} must have degree {allowed}, got {form.degree}")


def exterior_derivative(form: DiscreteForm) -> DiscreteForm:
    """d: degree k -> k+1.  Top-degree input is an error."""
    grid = form.grid
    if form.degree == 0:
        (f,) = form.components
        return DiscreteForm(grid, 1, (grid.derivative(f, 0), grid.derivative(f, 1)))
    if form.degree == 1:
        p, q = form.components
        return DiscreteForm(grid, 2, (grid.derivative(q, 0) - grid.derivative(p, 1),))
    raise DegreeError("exterior derivative of a top-degree form is not defined")


def wedge(a: DiscreteForm, b: DiscreteForm) -> DiscreteForm:
    _same_grid(a, b)
    if a.degree + b.degree > 2:
        raise DegreeError(
            f"wedge of degrees {a.degree} and {b.degree} exceeds the dimension"
        )
    if a.degree == 0:
        return DiscreteForm(
            a.grid, b.degree, tuple(a.components[0] * c for c in b.components)
        )
    if b.degree == 0:
        return DiscreteForm(
            a.grid, a.degree, tuple(c * b.components[0] for c in a.components)
        )
    p1, q1 = a.components
    p2, q2 = b.components
    return DiscreteForm(a.grid, 2, (p1 * q2 - q1 * p2,))


def hodge_star(form: DiscreteForm) -> DiscreteForm:
    """Metric Hodge star; ** = (-1)^(k(n-k)) holds exactly."""
    grid = form.grid
    m1, m2 = grid.metric
    s = grid.volume_scale
    if form.degree == 0:
        return DiscreteForm(grid, 2, (form.components[0] * s,))
    if form.degree == 1:
        p, q = form.components
        return DiscreteForm(
            grid, 1, (-q * math.sqrt(m1 / m2), p * math.sqrt(m2 / m1))
        )
    return DiscreteForm(grid, 0, (form.components[0] / s,))


def flat(v: VectorFieldSample) -> DiscreteForm:
    """Metric lowering: v -> M(v, .)."""
    m1, m2 = v.grid.metric
    vx, vy = v.components
    return DiscreteForm(v.grid, 1, (m1 * vx, m2 * vy))


def sharp(alpha: DiscreteForm) -> VectorFieldSample:
    """Metric raising of a 1-form."""
    _require_degree(alpha, 1, what="sharp input")
    m1, m2 = alpha.grid.metric
    p, q = alpha.components
    return VectorFieldSample(alpha.grid, (p / m1, q / m2))


def flux_form(v: VectorFieldSample) -> DiscreteForm:
    """Contraction of the volume form with v; the mass-flux 1-form of v."""
    s = v.grid.volume_scale
    vx, vy = v.components
    return DiscreteForm(v.grid, 1, (-s * vy, s * vx))


def flux_velocity(omega: DiscreteForm) -> VectorFieldSample:
    """Inverse of flux_form: the vector field whose flux 1-form is omega."""
    _require_degree(omega, 1, what="flux 1-form")
    s = omega.grid.volume_scale
    p, q = omega.components
    return VectorFieldSample(omega.grid, (q / s, -p / s))


def musical(x, direction: str, via_volume: bool = False):
    """Dispatch between the metric and volume-contraction isomorphisms.

    direction 'flat' lowers a vector field (to the metric 1-form, or with
    via_volume=True to its flux 1-form); 'sharp' raises a 1-form (with
    via_volume=True interpreting it as a flux form).
    """
    if direction == "flat":
        if not isinstance(x, VectorFieldSample):
            raise TypeError("flat expects a vector field sample")
        return flux_form(x) if via_volume else flat(x)
    if direction == "sharp":
        if not isinstance(x, DiscreteForm):
            raise TypeError("sharp expects a discrete form")
        return flux_velocity(x) if via_volume else sharp(x)
    raise ValueError("direction must be 'flat' or 'sharp'")


def interior_product(v: VectorFieldSample, form: DiscreteForm) -> DiscreteForm:
    _same_grid(v, form)
    vx, vy = v.components
    if form.degree == 1:
        p, q = form.components
        return DiscreteForm(form.grid, 0, (vx * p + vy * q,))
    if form.degree == 2:
        (w,) = form.components
        return DiscreteForm(form.grid, 1, (-w * vy, w * vx))
    raise DegreeError("interior product of a 0-form is not defined")


def lie_derivative(v: VectorFieldSample, form: DiscreteForm) -> DiscreteForm:
    """Cartan formula d(i_v a) + i_v(d a); degree-dependent terms drop out."""
    _same_grid(v, form)
    if form.degree == 0:
        return interior_product(v, exterior_derivative(form))
    if form.degree == 1:
        return exterior_derivative(interior_product(v, form)) + interior_product(
            v, exterior_derivative(form)
        )
    return exterior_derivative(interior_product(v, form))


def divergence(v: VectorFieldSample) -> DiscreteForm:
    """Divergence as a 0-form; with a constant metric this is dvx/dx + dvy/dy."""
    grid = v.grid
    vx, vy = v.components
    return DiscreteForm(grid, 0, (grid.derivative(vx, 0) + grid.derivative(vy, 1),))


def _edge_slice(values: np.ndarray, name: str) -> np.ndarray:
    axis, index, _ = _EDGE_TABLE[name]
    return values[index, :] if axis == 0 else values[:, index]


def trace(form: DiscreteForm) -> BoundaryForm:
    """Pullback to the boundary edges (empty on fully periodic grids)."""
    grid = form.grid
    if form.degree == 0:
        (f,) = form.components
        return BoundaryForm(
            grid, 0, {name: _edge_slice(f, name) for name in grid.edge_names}
        )
    if form.degree == 1:
        p, q = form.components
        edges = {}
        for name in grid.edge_names:
            # Tangential coefficient: dy on vertical edges, dx on horizontal.
            tangential = q if _EDGE_TABLE[name][0] == 0 else p
            edges[name] = _edge_slice(tangential, name)
        return BoundaryForm(grid, 1, edges)
    raise DegreeError("trace of a top-degree form is not defined")


def integrate(form: DiscreteForm) -> float:
    """Integral of a top-degree form over the domain."""
    _require_degree(form, 2, what="integrand")
    wx, wy = form.grid.axis_weights
    return float(np.einsum("i,ij,j->", wx, form.components[0], wy))


def pairing(a: DiscreteForm, b: DiscreteForm) -> float:
    """Duality pairing: integral of a^b for complementary degrees."""
    if a.degree + b.degree != 2:
        raise DegreeError(
            f"pairing needs complementary degrees, got {a.degree} and {b.degree}"
        )
    return integrate(wedge(a, b))


def boundary_product(e: BoundaryForm, f: BoundaryForm) -> BoundaryForm:
    """Pointwise product of a degree-0 and a degree-1 boundary form."""
    _same_grid(e, f)
    if e.degree != 0 or f.degree != 1:
        raise DegreeError("boundary product expects degrees (0, 1)")
    if set(e.edges) != set(f.edges):
        raise ValueError("boundary forms cover different edge sets")
    return BoundaryForm(
        e.grid, 1, {name: e.edges[name] * f.edges[name] for name in e.edges}
    )


def boundary_integral(eta: BoundaryForm) -> float:
    """Oriented integral over the boundary (counterclockwise).

    Exactly 0.0 on fully periodic grids.  Each edge uses the quadrature
    weights of its tangential axis, matching the interior quadrature.
    """
    if eta.degree != 1:
        raise DegreeError("boundary integral expects a degree-1 boundary form")
    total = 0.0
    for name in ("west", "east", "south", "north"):
        if name not in eta.edges:
            continue
        normal_axis, _, sign = _EDGE_TABLE[name]
        weights = eta.grid.axis_weights[1 - normal_axis]
        total += sign * float(np.dot(weights, eta.edges[name]))
    return total
