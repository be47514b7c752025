"""Concentration and multiplicity experiments over multi-well potentials.

The pipeline per (a, eps) cell: solve the constant-potential problem once at
mu = V0 (and at mu = V_infinity for the level gap), build one cut-off seed
per well from the limit profile, run a multistart minimization, and record
per-solution diagnostics: multiplier, energy, barycenter, distance of the
barycenter to the minima set, and the potential value at the solution's
global maximum node.  The measured autonomous level and the seed energies
also give the sublevel width h(eps) = max_y |E_eps(seed_y) - level0| used by
the sublevel membership checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import RunConfig
from .energy import energy
from .grid import Field, sample_potential
from .potentials import barycenter, build_seed, minima_set
from .solver import Solution, SolverOptions, multistart, solve_limit

__all__ = [
    "ExperimentRecord",
    "ConcentrationOutcome",
    "LevelCheck",
    "LevelReport",
    "run_concentration",
    "run_multiplicity",
    "run_eps_sweep",
    "verify_level_structure",
]


@dataclass(frozen=True)
class ExperimentRecord:
    """One recorded solution of a sweep cell."""

    eps: float
    a: float
    seed_id: str
    lam: float
    energy: float
    bary: tuple
    dist_to_m: float
    v_at_max: float
    converged: bool


@dataclass
class ConcentrationOutcome:
    """Records plus the measured levels and seed diagnostics of one run."""

    records: list = field(default_factory=list)
    level_zero: dict = field(default_factory=dict)       # a -> measured level at mu = V0
    level_inf: dict = field(default_factory=dict)        # a -> measured level at mu = V_inf
    limit_solutions: dict = field(default_factory=dict)  # a -> Solution at mu = V0
    seed_energy: dict = field(default_factory=dict)      # (eps, a, seed_id) -> E_eps(seed)
    seed_bary: dict = field(default_factory=dict)        # (eps, a, seed_id) -> tuple
    h_eps: dict = field(default_factory=dict)            # (eps, a) -> sublevel width
    solutions: dict = field(default_factory=dict)        # (eps, a) -> list[Solution]


def _argmax_node(values: np.ndarray) -> int:
    """Flat index of the global maximum of |values|, first on ties."""
    return int(np.argmax(np.abs(values).ravel()))


def _record_solution(config: RunConfig, vfield: Field, wells: np.ndarray,
                     eps: float, a: float, sol: Solution) -> ExperimentRecord:
    grid = config.grid
    b = barycenter(grid, sol.u, eps, config.resolved_chi_radius())
    dist = float(np.min(np.sqrt(((wells - b) ** 2).sum(axis=-1))))
    v_at_max = float(vfield.values.ravel()[_argmax_node(sol.u.values)])
    return ExperimentRecord(
        eps=eps, a=a, seed_id=sol.seed_id, lam=sol.lam, energy=sol.energy,
        bary=tuple(float(c) for c in b), dist_to_m=dist, v_at_max=v_at_max,
        converged=sol.converged,
    )


def run_concentration(config: RunConfig, jobs: int = 1, log=None) -> ConcentrationOutcome:
    """Full multiplicity/concentration run for every (a, eps) in the config."""
    config.require("potential", "eps_values", "a_values")
    grid = config.grid
    pot = config.potential
    wells = minima_set(pot)
    delta_cut = config.resolved_delta_cut()
    out = ConcentrationOutcome()
    rng = np.random.default_rng(config.rng_seed)

    for a in config.a_values:
        lim0 = solve_limit(grid, pot.v0, a, config.solver, split=config.split)
        liminf = solve_limit(grid, pot.v_infinity, a, config.solver, split=config.split)
        out.level_zero[a] = lim0.energy
        out.level_inf[a] = liminf.energy
        out.limit_solutions[a] = lim0
        if log:
            log(f"[limit] a={a:g} level0={lim0.energy:.6g} levelinf={liminf.energy:.6g}")

        for eps in config.eps_values:
            vfield = sample_potential(grid, pot, eps)
            seeds, ids = [], []
            for i, y in enumerate(wells):
                s = build_seed(grid, lim0.u, y, eps, a, delta_cut)
                seeds.append(s)
                ids.append(f"well{i}")
                for p in range(config.perturb_seeds):
                    noise = config.perturb_scale * rng.standard_normal(grid.shape)
                    seeds.append(Field(grid, s.values * (1.0 + noise)))
                    ids.append(f"well{i}p{p}")
            gap = 0.0
            for s, sid in zip(seeds, ids):
                e_seed = energy(grid, vfield, s, config.split)
                out.seed_energy[(eps, a, sid)] = e_seed
                out.seed_bary[(eps, a, sid)] = tuple(
                    float(c) for c in barycenter(grid, s, eps, config.resolved_chi_radius()))
                gap = max(gap, abs(e_seed - lim0.energy))
            out.h_eps[(eps, a)] = gap

            sols = multistart(grid, vfield, a, seeds, config.solver,
                              config.distinct_tol, split=config.split,
                              seed_ids=ids, jobs=jobs)
            out.solutions[(eps, a)] = sols
            for sol in sols:
                rec = _record_solution(config, vfield, wells, eps, a, sol)
                out.records.append(rec)
                if log:
                    log(f"[cell] eps={eps:g} a={a:g} {sol.seed_id} "
                        f"E={sol.energy:.6g} lambda={sol.lam:.6g} conv={sol.converged}")
    out.records.sort(key=lambda r: (r.eps, r.a, r.seed_id))
    return out


def run_multiplicity(config: RunConfig, jobs: int = 1) -> list:
    """All distinct converged solutions of the sweep, one record each."""
    return run_concentration(config, jobs=jobs).records


def run_eps_sweep(config: RunConfig, jobs: int = 1) -> list:
    """Lowest-energy record per (eps, a) cell, for the concentration limit."""
    outcome = run_concentration(config, jobs=jobs)
    best = []
    for (eps, a), sols in sorted(outcome.solutions.items()):
        recs = [r for r in outcome.records if r.eps == eps and r.a == a]
        if recs:
            best.append(min(recs, key=lambda r: r.energy))
    best.sort(key=lambda r: (r.eps, r.a, r.seed_id))
    return best


@dataclass(frozen=True)
class LevelCheck:
    """One verified inequality with its margin (positive = satisfied)."""

    name: str
    lhs: float
    rhs: float
    margin: float
    passed: bool


@dataclass
class LevelReport:
    """Outcome of the level-structure verification."""

    checks: list = field(default_factory=list)
    levels: dict = field(default_factory=dict)   # (mu, a) -> measured level
    a_zero: float | None = None
    records: list = field(default_factory=list)  # ExperimentRecord rows of the solves

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _strict_less(name: str, lhs: float, rhs: float) -> LevelCheck:
    return LevelCheck(name=name, lhs=lhs, rhs=rhs, margin=rhs - lhs, passed=lhs < rhs)


def verify_level_structure(config: RunConfig, log=None) -> LevelReport:
    """Measure levels across the configured mu and a lists and check the
    expected inequality structure.

    Rows emitted: negativity of every level, monotonicity in mu at each a,
    the scaled-mass comparison (a1/a2)^2 * level(a2) < level(a1) < 0 for
    consecutive a pairs at each mu, the level gap between mu = V0 and
    mu = V_infinity when a potential is configured, and a bisection estimate
    of the zero-energy mass threshold.  Failures are reported rows, never
    exceptions.
    """
    config.require("mu_values", "a_values")
    grid = config.grid
    report = LevelReport()

    def level(mu: float, a: float) -> float:
        key = (mu, a)
        if key not in report.levels:
            sol = solve_limit(grid, mu, a, config.solver, split=config.split)
            report.levels[key] = sol.energy
            report.records.append(ExperimentRecord(
                eps=1.0, a=a, seed_id=f"limit_mu{mu:g}_a{a:g}", lam=sol.lam,
                energy=sol.energy, bary=(0.0,) * grid.dim, dist_to_m=0.0,
                v_at_max=mu, converged=sol.converged))
            if log:
                log(f"[level] mu={mu:g} a={a:g} E={sol.energy:.8g} conv={sol.converged}")
        return report.levels[key]

    mus = sorted(config.mu_values)
    avals = sorted(config.a_values)

    for a in avals:
        for mu in mus:
            report.checks.append(_strict_less(f"negative level mu={mu:g} a={a:g}",
                                              level(mu, a), 0.0))
        for mu1, mu2 in zip(mus, mus[1:]):
            report.checks.append(_strict_less(
                f"mu-monotonicity mu={mu1:g}<{mu2:g} a={a:g}",
                level(mu1, a), level(mu2, a)))
    for mu in mus:
        for a1, a2 in zip(avals, avals[1:]):
            scaled = (a1 / a2) ** 2 * level(mu, a2)
            report.checks.append(_strict_less(
                f"scaled-mass comparison mu={mu:g} a={a1:g}<{a2:g}",
                scaled, level(mu, a1)))

    if config.potential is not None:
        pot = config.potential
        for a in avals:
            report.checks.append(_strict_less(
                f"level gap V0<Vinf a={a:g}", level(pot.v0, a), level(pot.v_infinity, a)))
            report.checks.append(_strict_less(
                f"level gap Vinf negative a={a:g}", level(pot.v_infinity, a), 0.0))

    mu0 = config.a_zero_mu if config.a_zero_mu is not None else mus[0]
    lo, hi = config.a_zero_bracket
    e_lo, e_hi = level(mu0, lo), level(mu0, hi)
    if e_lo > 0.0 > e_hi:
        for _ in range(40):
            if hi - lo <= 1e-3 * hi:
                break
            mid = 0.5 * (lo + hi)
            if level(mu0, mid) > 0.0:
                lo = mid
            else:
                hi = mid
        report.a_zero = 0.5 * (lo + hi)
        report.checks.append(LevelCheck(
            name=f"a_zero bracket mu={mu0:g}", lhs=lo, rhs=hi,
            margin=hi - lo, passed=True))
    else:
        report.checks.append(LevelCheck(
            name=f"a_zero bracket mu={mu0:g}", lhs=e_lo, rhs=e_hi,
            margin=0.0, passed=False))

    report.records.sort(key=lambda r: (r.eps, r.a, r.seed_id))
    return report
