"""Flat key = value run configuration.

The config format is line-oriented text with dotted keys, chosen for
diff-friendliness and zero-dependency parsing:

    # comment
    grid.dim = 1
    grid.half_width = 12.0
    grid.points_per_axis = 1025
    potential.wells = -1; 1
    eps_values = 0.5, 0.25, 0.125

Lists are comma-separated; well points are semicolon-separated with
comma-separated coordinates.  Unknown keys are rejected by name so typos
fail loudly (CLI exit code 2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .grid import Grid
from .nonlinearity import NonlinearitySplit
from .potentials import PotentialSpec
from .solver import SolverOptions

__all__ = ["ConfigError", "RunConfig", "parse_entries", "load_config", "config_from_text"]


class ConfigError(ValueError):
    """Malformed or incomplete run configuration (CLI exit code 2)."""


_KNOWN_KEYS = {
    "grid.dim",
    "grid.half_width",
    "grid.points_per_axis",
    "split.delta",
    "solver.step0",
    "solver.shrink",
    "solver.grow",
    "solver.tol_residual",
    "solver.max_iters",
    "solver.symmetrize_every",
    "potential.v0",
    "potential.amplitude",
    "potential.width",
    "potential.wells",
    "eps_values",
    "a_values",
    "mu_values",
    "output_dir",
    "rng_seed",
    "experiment.delta_cut",
    "experiment.chi_radius",
    "experiment.m_delta",
    "experiment.distinct_tol",
    "experiment.perturb_seeds",
    "experiment.perturb_scale",
    "verify.a_zero_mu",
    "verify.a_zero_bracket",
}


def parse_entries(text: str) -> dict:
    """Parse the raw text into a {dotted key: raw value string} dict."""
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in entries:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        entries[key] = value.strip()
    return entries


def _get_float(entries, key, default=None):
    if key not in entries or entries[key] == "":
        if default is None:
            raise ConfigError(f"missing required field {key!r}")
        return default
    try:
        return float(entries[key])
    except ValueError as exc:
        raise ConfigError(f"field {key!r}: {exc}") from None


def _get_int(entries, key, default=None):
    if key not in entries or entries[key] == "":
        if default is None:
            raise ConfigError(f"missing required field {key!r}")
        return default
    try:
        return int(entries[key])
    except ValueError as exc:
        raise ConfigError(f"field {key!r}: {exc}") from None


def _get_float_list(entries, key):
    if key not in entries or entries[key] == "":
        return ()
    try:
        return tuple(float(tok) for tok in entries[key].split(",") if tok.strip())
    except ValueError as exc:
        raise ConfigError(f"field {key!r}: {exc}") from None


def _get_wells(entries, key, dim):
    if key not in entries or entries[key] == "":
        return None
    wells = []
    for tok in entries[key].split(";"):
        tok = tok.strip()
        if not tok:
            continue
        try:
            coords = tuple(float(c) for c in tok.split(","))
        except ValueError as exc:
            raise ConfigError(f"field {key!r}: {exc}") from None
        if len(coords) != dim:
            raise ConfigError(f"field {key!r}: well {tok!r} is not {dim}-dimensional")
        wells.append(coords)
    if not wells:
        raise ConfigError(f"field {key!r}: no wells given")
    return wells


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved configuration for one CLI run."""

    grid: Grid
    split: NonlinearitySplit
    solver: SolverOptions
    potential: PotentialSpec | None
    eps_values: tuple
    a_values: tuple
    mu_values: tuple
    output_dir: Path | None
    rng_seed: int
    delta_cut: float | None
    chi_radius: float | None
    m_delta: float
    distinct_tol: float
    perturb_seeds: int
    perturb_scale: float
    a_zero_mu: float | None
    a_zero_bracket: tuple
    raw_text: str = field(repr=False, default="")
    entries: dict = field(repr=False, default_factory=dict)

    def resolved_delta_cut(self) -> float:
        """Configured cut-off radius, or half the minimal well separation."""
        if self.delta_cut is not None:
            return self.delta_cut
        pot = self._require_potential()
        wells = pot.wells
        if wells.shape[0] < 2:
            return 1.0
        diffs = wells[:, None, :] - wells[None, :, :]
        dist = np.sqrt((diffs ** 2).sum(-1))
        dist[np.diag_indices_from(dist)] = np.inf
        return 0.5 * float(dist.min())

    def resolved_chi_radius(self) -> float:
        if self.chi_radius is not None:
            return self.chi_radius
        pot = self._require_potential()
        return 2.0 * (float(np.max(np.abs(pot.wells))) + self.m_delta)

    def _require_potential(self) -> PotentialSpec:
        if self.potential is None:
            raise ConfigError("missing required field 'potential.wells'")
        return self.potential

    def require(self, *fields: str):
        """Validate that the named list/config fields are usable, by name."""
        for name in fields:
            if name == "potential":
                self._require_potential()
            elif name in ("eps_values", "a_values", "mu_values"):
                if not getattr(self, name):
                    raise ConfigError(f"missing required field {name!r}")
            else:
                raise AssertionError(f"unknown requirement {name!r}")


def config_from_text(text: str) -> RunConfig:
    entries = parse_entries(text)

    dim = _get_int(entries, "grid.dim", 1)
    grid_kwargs = dict(
        dim=dim,
        half_width=_get_float(entries, "grid.half_width", 12.0),
        points_per_axis=_get_int(entries, "grid.points_per_axis", 1025),
    )
    try:
        grid = Grid(**grid_kwargs)
        split = NonlinearitySplit(_get_float(entries, "split.delta", math.exp(-2.0)))
        tol = entries.get("solver.tol_residual", "")
        sym = entries.get("solver.symmetrize_every", "")
        solver = SolverOptions(
            step0=_get_float(entries, "solver.step0", 0.1),
            shrink=_get_float(entries, "solver.shrink", 0.5),
            grow=_get_float(entries, "solver.grow", 1.1),
            tol_residual=float(tol) if tol else None,
            max_iters=_get_int(entries, "solver.max_iters", 20000),
            symmetrize_every=int(sym) if sym else None,
        )
        wells = _get_wells(entries, "potential.wells", dim)
        potential = None
        if wells is not None:
            potential = PotentialSpec(
                v0=_get_float(entries, "potential.v0", 0.0),
                amplitude=_get_float(entries, "potential.amplitude", 1.0),
                wells=tuple(wells),
                width=_get_float(entries, "potential.width", 0.3),
            )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    bracket = _get_float_list(entries, "verify.a_zero_bracket")
    if bracket and len(bracket) != 2:
        raise ConfigError("field 'verify.a_zero_bracket' must be two values: lo, hi")
    out = entries.get("output_dir", "")
    a_zero_mu = entries.get("verify.a_zero_mu", "")

    return RunConfig(
        grid=grid,
        split=split,
        solver=solver,
        potential=potential,
        eps_values=_get_float_list(entries, "eps_values"),
        a_values=_get_float_list(entries, "a_values"),
        mu_values=_get_float_list(entries, "mu_values"),
        output_dir=Path(out) if out else None,
        rng_seed=_get_int(entries, "rng_seed", 0),
        delta_cut=(float(entries["experiment.delta_cut"])
                   if entries.get("experiment.delta_cut") else None),
        chi_radius=(float(entries["experiment.chi_radius"])
                    if entries.get("experiment.chi_radius") else None),
        m_delta=_get_float(entries, "experiment.m_delta", 0.2),
        distinct_tol=_get_float(entries, "experiment.distinct_tol", 1e-2),
        perturb_seeds=_get_int(entries, "experiment.perturb_seeds", 0),
        perturb_scale=_get_float(entries, "experiment.perturb_scale", 0.01),
        a_zero_mu=float(a_zero_mu) if a_zero_mu else None,
        a_zero_bracket=bracket if bracket else (2.0, 5.0),
        raw_text=text,
        entries=entries,
    )


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from None
    return config_from_text(text)
