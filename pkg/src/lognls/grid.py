"""Uniform tensor-product grids on a centered box with Dirichlet exterior.

A Grid discretizes [-L, L]^dim (dim = 1 or 2) with an odd number of nodes per
axis so the origin is a node.  Fields are nodal samples; everything outside
the box is treated as identically zero.  Quadrature is the trapezoid rule;
the negative Laplacian is the central second-difference stencil with the
half-cell boundary factor that makes it exactly self-adjoint in the
trapezoid inner product (and exactly compatible with the link-sum form of
the kinetic energy in `dirichlet_form`).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "Grid",
    "Field",
    "sample_field",
    "integrate",
    "laplacian_apply",
    "dirichlet_form",
    "sample_potential",
    "rearrange_decreasing",
    "write_field_csv",
    "read_field_csv",
]


@dataclass(frozen=True)
class Grid:
    """Uniform grid on [-half_width, half_width]^dim, odd points per axis."""

    dim: int
    half_width: float
    points_per_axis: int

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError(f"dim must be 1 or 2, got {self.dim}")
        if not self.half_width > 0.0:
            raise ValueError("half_width must be positive")
        n = self.points_per_axis
        if n < 3 or n % 2 == 0:
            raise ValueError("points_per_axis must be odd and >= 3")

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / (self.points_per_axis - 1)

    @property
    def shape(self) -> tuple:
        return (self.points_per_axis,) * self.dim

    @property
    def num_nodes(self) -> int:
        return self.points_per_axis ** self.dim

    @cached_property
    def axis(self) -> np.ndarray:
        x = np.linspace(-self.half_width, self.half_width, self.points_per_axis)
        x.flags.writeable = False
        return x

    @cached_property
    def axis_weights(self) -> np.ndarray:
        w = np.full(self.points_per_axis, self.spacing)
        w[0] *= 0.5
        w[-1] *= 0.5
        w.flags.writeable = False
        return w

    @cached_property
    def weights(self) -> np.ndarray:
        w = self.axis_weights
        if self.dim == 1:
            return w
        ww = np.outer(w, w)
        ww.flags.writeable = False
        return ww

    @cached_property
    def points(self) -> np.ndarray:
        """Node coordinates, shape (*grid.shape, dim)."""
        if self.dim == 1:
            p = self.axis[:, None].copy()
        else:
            xx, yy = np.meshgrid(self.axis, self.axis, indexing="ij")
            p = np.stack([xx, yy], axis=-1)
        p.flags.writeable = False
        return p

    @cached_property
    def node_radii(self) -> np.ndarray:
        r = np.linalg.norm(self.points, axis=-1)
        r.flags.writeable = False
        return r

    def refine(self) -> "Grid":
        """Grid with doubled resolution (2n - 1 points, same box)."""
        return Grid(self.dim, self.half_width, 2 * self.points_per_axis - 1)


@dataclass(frozen=True)
class Field:
    """Nodal samples of a real-valued function on a Grid.  Immutable."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.grid.shape:
            raise ValueError(f"values shape {v.shape} does not match grid {self.grid.shape}")
        if not np.isfinite(v).all():
            raise ValueError("field values must be finite")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "values", v)


def sample_field(grid: Grid, fn) -> Field:
    """Field with values fn(points), fn vectorized over (..., dim) points."""
    return Field(grid, np.asarray(fn(grid.points), dtype=float))


def _check_grid(grid: Grid, *fields: Field):
    for f in fields:
        if f.grid != grid:
            raise ValueError("field lives on a different grid")


def integrate(grid: Grid, f: Field) -> float:
    """Trapezoid tensor quadrature of a field over the box."""
    _check_grid(grid, f)
    return float(np.sum(grid.weights * f.values))


def laplacian_apply(grid: Grid, u: Field) -> Field:
    """Apply the negative Laplacian with zero Dirichlet padding beyond the box.

    Interior nodes get the standard second-order central stencil; the
    outermost node layer of each axis carries the factor 2 of the half-cell
    trapezoid weight, which makes integrate(u * laplacian_apply(v)) exactly
    symmetric in u, v and equal to dirichlet_form at u = v.
    """
    _check_grid(grid, u)
    v = u.values
    h2 = grid.spacing ** 2
    out = np.zeros_like(v)
    for ax in range(grid.dim):
        term = 2.0 * v.copy()
        lead = [slice(None)] * grid.dim
        lag = [slice(None)] * grid.dim
        dest_lead = [slice(None)] * grid.dim
        dest_lag = [slice(None)] * grid.dim
        lead[ax] = slice(1, None)
        dest_lead[ax] = slice(None, -1)
        lag[ax] = slice(None, -1)
        dest_lag[ax] = slice(1, None)
        term[tuple(dest_lead)] -= v[tuple(lead)]
        term[tuple(dest_lag)] -= v[tuple(lag)]
        term /= h2
        first = [slice(None)] * grid.dim
        last = [slice(None)] * grid.dim
        first[ax] = 0
        last[ax] = -1
        term[tuple(first)] *= 2.0
        term[tuple(last)] *= 2.0
        out += term
    return Field(grid, out)


def dirichlet_form(grid: Grid, u: Field) -> float:
    """Kinetic quadratic form: the link sum of squared forward differences.

    Includes the links to the zero padding just outside the box, weighted by
    the trapezoid weights of the perpendicular axes, so that it equals
    integrate(u * laplacian_apply(u)) exactly.
    """
    _check_grid(grid, u)
    v = u.values
    h = grid.spacing
    total = 0.0
    for ax in range(grid.dim):
        d = np.diff(v, axis=ax, prepend=0.0, append=0.0)
        sq = np.sum(d * d, axis=ax) / h
        if grid.dim == 1:
            total += float(sq)
        else:
            total += float(np.sum(sq * grid.axis_weights))
    return total


def sample_potential(grid: Grid, pot, eps: float) -> Field:
    """Field of nodal values pot(eps * x), pot vectorized over (..., dim)."""
    if not eps > 0.0:
        raise ValueError("eps must be positive")
    return Field(grid, np.asarray(pot(eps * grid.points), dtype=float))


def rearrange_decreasing(grid: Grid, u: Field) -> Field:
    """Symmetric decreasing surrogate: reassign sorted |values| to nodes
    ordered by distance from the origin (ties broken by flat node index).

    Preserves the value multiset exactly and is idempotent; it only
    approximates the continuum rearrangement's gradient-decrease property.
    """
    _check_grid(grid, u)
    vals = np.sort(np.abs(u.values), axis=None)[::-1]
    r = grid.node_radii.ravel()
    order = np.lexsort((np.arange(r.size), r))
    out = np.empty(r.size)
    out[order] = vals
    return Field(grid, out.reshape(grid.shape))


def write_field_csv(field: Field, path):
    """Flat CSV, one row per node: index,x[,y],value in C node order."""
    grid = field.grid
    pts = grid.points.reshape(-1, grid.dim)
    vals = field.values.ravel()
    cols = "index,x,value" if grid.dim == 1 else "index,x,y,value"
    with open(path, "w", newline="\n") as fh:
        fh.write(cols + "\n")
        for i in range(vals.size):
            coords = ",".join(f"{c:.17g}" for c in pts[i])
            fh.write(f"{i},{coords},{vals[i]:.17g}\n")


def read_field_csv(path, grid: Grid) -> Field:
    """Inverse of write_field_csv for a known grid."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[0] != grid.num_nodes or data.shape[1] != grid.dim + 2:
        raise ValueError("field file does not match the grid")
    idx = data[:, 0].astype(int)
    if not np.array_equal(idx, np.arange(grid.num_nodes)):
        raise ValueError("field file rows are not in node order")
    return Field(grid, data[:, -1].reshape(grid.shape))
