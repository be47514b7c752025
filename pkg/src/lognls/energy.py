"""The constrained energy functional, its gradient, multiplier and residual.

For a potential field V (nodal samples of V(eps x)) and a field u the energy
is

    E(u) = 0.5 * int(|grad u|^2 + (V + 1) u^2) + int f1(u) - int f2(u),

whose nodal gradient in the quadrature inner product is

    g = -Lap u + (V + 1) u + df1(u) - df2(u)
      = -Lap u + V u - u log(u^2),

the two forms agreeing exactly by the split identity.  The multiplier
lam(u) = <g, u>/int(u^2) extends the Lagrange multiplier of the mass
constraint to arbitrary fields, and the residual is the weighted L2 norm of
the projected gradient g - lam(u) u.  All functions are pure.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict

import numpy as np

from .grid import Grid, Field, integrate, laplacian_apply, dirichlet_form
from .nonlinearity import NonlinearitySplit, DEFAULT_SPLIT, f1, f2, df1, df2, log_nl, luxemburg_gauge

__all__ = [
    "EnergyReport",
    "energy",
    "gradient",
    "multiplier",
    "residual",
    "xnorm",
    "energy_report",
    "mass",
    "sq_log_sq",
]

_FORM_AGREEMENT_TOL = 1e-10


def _check(grid: Grid, *fields: Field):
    for f in fields:
        if f.grid != grid:
            raise ValueError("field lives on a different grid")


def mass(grid: Grid, u: Field) -> float:
    """int u^2 under the grid quadrature."""
    _check(grid, u)
    return float(np.sum(grid.weights * u.values * u.values))


def sq_log_sq(values: np.ndarray) -> np.ndarray:
    """u^2 * log(u^2) with the removable zero closed (guarded below 1e-300)."""
    t = np.abs(values)
    safe = np.where(t > 1e-300, t, 1.0)
    return 2.0 * values * values * np.log(safe)


def energy(grid: Grid, vfield: Field, u: Field, split: NonlinearitySplit = DEFAULT_SPLIT) -> float:
    """Value of the constrained functional at u."""
    _check(grid, vfield, u)
    kin = 0.5 * dirichlet_form(grid, u)
    uv = u.values
    dens = 0.5 * (vfield.values + 1.0) * uv * uv + f1(uv, split) - f2(uv, split)
    val = kin + float(np.sum(grid.weights * dens))
    if not np.isfinite(val):
        raise ValueError("non-finite energy")
    return val


def gradient(grid: Grid, vfield: Field, u: Field, split: NonlinearitySplit = DEFAULT_SPLIT) -> Field:
    """Nodal gradient field of the energy in the quadrature inner product.

    Computed in the split form and checked, node by node, against the
    combined form -Lap u + V u - u log(u^2); disagreement beyond round-off
    indicates a broken split and raises.
    """
    _check(grid, vfield, u)
    lap = laplacian_apply(grid, u).values
    uv = u.values
    g = lap + (vfield.values + 1.0) * uv + df1(uv, split) - df2(uv, split)
    combined = lap + vfield.values * uv - log_nl(uv)
    dev = float(np.max(np.abs(g - combined)))
    if dev > _FORM_AGREEMENT_TOL:
        raise AssertionError(f"gradient forms disagree by {dev:.3e}")
    return Field(grid, g)


def multiplier(grid: Grid, vfield: Field, u: Field, split: NonlinearitySplit = DEFAULT_SPLIT) -> float:
    """Rayleigh-type multiplier [int(|grad u|^2 + V u^2 - u^2 log u^2)] / int u^2.

    At a constrained critical point this is the Lagrange multiplier of the
    mass constraint; it is defined for any nonzero field.
    """
    _check(grid, vfield, u)
    m = mass(grid, u)
    if m == 0.0:
        raise ValueError("multiplier of the zero field")
    uv = u.values
    num = dirichlet_form(grid, u) + float(
        np.sum(grid.weights * (vfield.values * uv * uv - sq_log_sq(uv)))
    )
    return num / m


def residual(grid: Grid, vfield: Field, u: Field, split: NonlinearitySplit = DEFAULT_SPLIT) -> float:
    """Weighted L2 norm of the projected gradient g - lam(u) u."""
    _check(grid, vfield, u)
    m = mass(grid, u)
    if m == 0.0:
        raise ValueError("residual of the zero field")
    g = gradient(grid, vfield, u, split).values
    lam = float(np.sum(grid.weights * g * u.values)) / m
    proj = g - lam * u.values
    return float(np.sqrt(np.sum(grid.weights * proj * proj)))


def xnorm(grid: Grid, u: Field, split: NonlinearitySplit = DEFAULT_SPLIT) -> float:
    """Discrete H1 norm plus the gauge norm of u (the working-space norm)."""
    _check(grid, u)
    h1 = float(np.sqrt(mass(grid, u) + dirichlet_form(grid, u)))
    if h1 == 0.0:
        return 0.0
    return h1 + luxemburg_gauge(u.values, grid.weights, split)


@dataclass(frozen=True)
class EnergyReport:
    """Decomposed energy evaluation of one field."""

    total: float
    kinetic: float
    potential: float
    f1_part: float
    f2_part: float
    multiplier: float
    residual: float
    mass: float

    def to_dict(self) -> dict:
        return asdict(self)

    def write_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def from_json(cls, path) -> "EnergyReport":
        with open(path) as fh:
            return cls(**json.load(fh))


def energy_report(grid: Grid, vfield: Field, u: Field, split: NonlinearitySplit = DEFAULT_SPLIT) -> EnergyReport:
    """Assemble the full decomposition; total recombines from the parts."""
    _check(grid, vfield, u)
    uv = u.values
    kin = 0.5 * dirichlet_form(grid, u)
    pot = 0.5 * float(np.sum(grid.weights * (vfield.values + 1.0) * uv * uv))
    p1 = float(np.sum(grid.weights * f1(uv, split)))
    p2 = float(np.sum(grid.weights * f2(uv, split)))
    return EnergyReport(
        total=kin + pot + p1 - p2,
        kinetic=kin,
        potential=pot,
        f1_part=p1,
        f2_part=p2,
        multiplier=multiplier(grid, vfield, u, split),
        residual=residual(grid, vfield, u, split),
        mass=mass(grid, u),
    )
