"""Multi-well bounded potentials, seed construction, and the barycenter map.

The shipped potential family is a product of inverted Gaussian wells,

    V(x) = v0 + A * prod_i (1 - exp(-|x - y_i|^2 / w^2)),

which attains its minimum v0 exactly at the listed wells, is bounded by
v0 + A, and tends to v0 + A at infinity.  The minima set is therefore known
in closed form, and `minima_set` audits a sampled lattice to catch malformed
specs (overlapping wells).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .grid import Grid, Field, integrate
from .solver import project_mass

__all__ = [
    "PotentialSpec",
    "MinimaAuditError",
    "minima_set",
    "cutoff_eta",
    "build_seed",
    "barycenter",
]


class MinimaAuditError(ValueError):
    """The sampled-lattice audit of a potential's minima set failed."""


def _as_points(wells, dim=None):
    pts = np.asarray(wells, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2:
        raise ValueError("wells must be a list of points")
    if dim is not None and pts.shape[1] != dim:
        raise ValueError(f"wells must have dimension {dim}")
    return pts


@dataclass(frozen=True)
class PotentialSpec:
    """Bounded continuous potential with an exact finite minima set.

    v0 >= -1 is the minimum value, amplitude > 0 the well depth (so the value
    at infinity is v0 + amplitude), wells the list of minima positions, and
    width the common well width.
    """

    v0: float
    amplitude: float
    wells: tuple
    width: float

    def __post_init__(self):
        if self.v0 < -1.0:
            raise ValueError("v0 must be >= -1")
        if not self.amplitude > 0.0:
            raise ValueError("amplitude must be positive")
        if not self.width > 0.0:
            raise ValueError("width must be positive")
        pts = _as_points(self.wells)
        if pts.shape[0] < 1:
            raise ValueError("at least one well required")
        pts.flags.writeable = False
        object.__setattr__(self, "wells", pts)

    @property
    def dim(self) -> int:
        return self.wells.shape[1]

    @property
    def num_wells(self) -> int:
        return self.wells.shape[0]

    @property
    def v_infinity(self) -> float:
        return self.v0 + self.amplitude

    def __call__(self, points) -> np.ndarray:
        """Evaluate V at points of shape (..., dim) (or (...) when dim == 1)."""
        p = np.asarray(points, dtype=float)
        if p.ndim == 0 or p.shape[-1] != self.dim:
            p = p[..., None]
        prod = np.ones(p.shape[:-1])
        for well in self.wells:
            d2 = np.sum((p - well) ** 2, axis=-1)
            prod = prod * (1.0 - np.exp(-d2 / self.width ** 2))
        return self.v0 + self.amplitude * prod


def minima_set(pot: PotentialSpec, audit: bool = True) -> np.ndarray:
    """Return the minima positions, shape (k, dim), after a lattice audit.

    The audit samples V on a lattice covering the wells with margin and
    asserts that no sample away from a declared well dips below
    v0 + 1e-10, and that wells are pairwise separated by at least the well
    width (closer wells merge basins and the closed-form set is no longer
    trustworthy).  Raises MinimaAuditError on failure.
    """
    wells = pot.wells
    if audit:
        if wells.shape[0] > 1:
            diffs = wells[:, None, :] - wells[None, :, :]
            dist = np.sqrt(np.sum(diffs ** 2, axis=-1))
            dist[np.diag_indices_from(dist)] = np.inf
            if float(dist.min()) < pot.width:
                raise MinimaAuditError(
                    f"wells closer than the well width {pot.width:g}: merged basin")
        margin = 3.0 * pot.width
        lo = wells.min(axis=0) - margin
        hi = wells.max(axis=0) + margin
        per_axis = 81 if pot.dim == 2 else 2001
        axes = [np.linspace(lo[d], hi[d], per_axis) for d in range(pot.dim)]
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack(mesh, axis=-1).reshape(-1, pot.dim)
        vals = pot(pts)
        below = pts[vals < pot.v0 + 1e-10]
        if below.size:
            d = np.sqrt(((below[:, None, :] - wells[None, :, :]) ** 2).sum(-1)).min(axis=1)
            spacing = max((hi - lo) / (per_axis - 1))
            if float(d.max()) > 1.5 * spacing:
                raise MinimaAuditError("potential dips to its minimum away from the declared wells")
        at_wells = pot(wells)
        if float(np.max(np.abs(at_wells - pot.v0))) > 1e-12 * max(1.0, abs(pot.v0)):
            raise MinimaAuditError("potential does not attain v0 at the declared wells")
    return np.array(pot.wells, dtype=float)


def cutoff_eta(s, delta_cut: float):
    """C2 monotone cut-off: 1 on [0, delta_cut/2], 0 on [delta_cut, inf).

    Quintic smoothstep in between, so the first two derivatives vanish at
    both junctions.
    """
    if not delta_cut > 0.0:
        raise ValueError("delta_cut must be positive")
    t = np.clip((np.asarray(s, dtype=float) - 0.5 * delta_cut) / (0.5 * delta_cut), 0.0, 1.0)
    out = 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t)
    return out.item() if np.ndim(s) == 0 else out


def build_seed(grid: Grid, w_limit: Field, y, eps: float, a: float,
               delta_cut: float) -> Field:
    """Cut-off translate of a limit-problem profile, mass-projected.

    Samples w at x - y/eps by linear interpolation on w's own grid,
    multiplies by the cut-off in the slow variable, eta(|eps x - y|), and
    projects onto the mass-a sphere; the result is supported in
    |eps x - y| <= delta_cut.  Raises when y/eps falls outside the box.
    """
    if not eps > 0.0:
        raise ValueError("eps must be positive")
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if y.shape != (grid.dim,):
        raise ValueError(f"y must be a point of dimension {grid.dim}")
    center = y / eps
    if np.any(np.abs(center) >= grid.half_width):
        raise ValueError("well position y/eps lies outside the grid box")
    wg = w_limit.grid
    interp = RegularGridInterpolator(
        (wg.axis,) * wg.dim, w_limit.values, method="linear",
        bounds_error=False, fill_value=0.0)
    shifted = grid.points - center
    wvals = interp(shifted.reshape(-1, grid.dim)).reshape(grid.shape)
    radii = eps * np.linalg.norm(shifted, axis=-1)
    vals = cutoff_eta(radii, delta_cut) * wvals
    if not vals.any():
        raise ValueError("cut-off seed vanished; enlarge delta_cut or the box")
    return project_mass(grid, Field(grid, vals), a)


def barycenter(grid: Grid, u: Field, eps: float, chi_radius: float) -> np.ndarray:
    """Truncated center of mass of |u|^2 in the slow variable, shape (dim,).

    chi maps eps*x to itself inside the ball of radius chi_radius and
    radially clamps outside, so the output always satisfies |b| <= chi_radius.
    """
    if not eps > 0.0:
        raise ValueError("eps must be positive")
    if not chi_radius > 0.0:
        raise ValueError("chi_radius must be positive")
    m = integrate(grid, Field(grid, u.values * u.values))
    if m == 0.0:
        raise ValueError("barycenter of the zero field")
    slow = eps * grid.points
    norms = np.linalg.norm(slow, axis=-1)
    scale = np.where(norms > chi_radius, chi_radius / np.where(norms > 0, norms, 1.0), 1.0)
    chi = slow * scale[..., None]
    dens = (grid.weights * u.values * u.values)[..., None]
    return np.sum(chi * dens, axis=tuple(range(grid.dim))) / m
