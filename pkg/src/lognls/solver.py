"""Mass-constrained minimization by projected gradient descent.

The iteration is u <- project_mass(u - tau * grad E(u)), a step being
accepted only if the energy strictly decreases; otherwise tau is shrunk and
the step retried, with a capped recovery factor after each acceptance.
Explicit descent is deliberately simple: it is robust to the logarithmic
nonlinearity, every accepted iterate sits exactly on the mass sphere, and
the accepted energies are monotone by construction.

The constant-potential (limit) problem has the exact Gaussian solution

    u(x) = A exp(-|x|^2/2),  A = a / pi^(N/4),
    lam  = N + mu - 2 log a + (N/2) log pi,
    E    = a^2 (N/2 + (mu+1)/2 + (N/4) log pi - log a),

obtained by substituting the profile into the stationary equation and fixing
the amplitude by the mass constraint; `gausson` samples it and is the oracle
the solver is validated against.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .grid import Grid, Field, integrate, rearrange_decreasing
from .energy import energy, gradient, mass
from .nonlinearity import NonlinearitySplit, DEFAULT_SPLIT

__all__ = [
    "SolverOptions",
    "Solution",
    "project_mass",
    "minimize",
    "gausson",
    "solve_limit",
    "multistart",
]

_MAX_BACKTRACKS = 80


@dataclass(frozen=True)
class SolverOptions:
    """Step control and stopping rules for `minimize`.

    tol_residual = None resolves to 1e-6 * a at solve time.  The
    symmetrize_every cadence (decreasing rearrangement of |u| every so many
    iterations) is honoured only when the sampled potential is constant.
    """

    step0: float = 0.1
    shrink: float = 0.5
    grow: float = 1.1
    tol_residual: float | None = None
    max_iters: int = 20000
    symmetrize_every: int | None = None

    def __post_init__(self):
        if not self.step0 > 0.0:
            raise ValueError("step0 must be positive")
        if not 0.0 < self.shrink < 1.0:
            raise ValueError("shrink must lie in (0, 1)")
        if not self.grow > 1.0:
            raise ValueError("grow must exceed 1")
        if self.tol_residual is not None and not self.tol_residual > 0.0:
            raise ValueError("tol_residual must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.symmetrize_every is not None and self.symmetrize_every < 1:
            raise ValueError("symmetrize_every must be at least 1")


@dataclass(frozen=True)
class Solution:
    """A converged (or best-found) constrained critical point candidate."""

    u: Field
    mass_a: float
    lam: float
    energy: float
    residual: float
    iterations: int
    converged: bool
    seed_id: str = ""

    def is_positive(self, tol: float = 1e-8) -> bool:
        vmax = float(np.max(np.abs(self.u.values)))
        return float(np.min(self.u.values)) >= -tol * vmax

    def to_manifest(self, field_csv: str) -> dict:
        g = self.u.grid
        return {
            "seed_id": self.seed_id,
            "a": self.mass_a,
            "lambda": self.lam,
            "energy": self.energy,
            "residual": self.residual,
            "iterations": self.iterations,
            "converged": self.converged,
            "grid": {"dim": g.dim, "L": g.half_width, "n": g.points_per_axis},
            "field_csv": field_csv,
        }

    def write_manifest(self, path, field_csv: str):
        with open(path, "w") as fh:
            json.dump(self.to_manifest(field_csv), fh, indent=2, sort_keys=True)
            fh.write("\n")


def project_mass(grid: Grid, u: Field, a: float) -> Field:
    """Scale u onto the sphere int u^2 = a^2 (quadrature norm), exactly."""
    if not a > 0.0:
        raise ValueError("a must be positive")
    m = mass(grid, u)
    if m == 0.0:
        raise ValueError("cannot project the zero field")
    vals = (a / math.sqrt(m)) * u.values
    # One corrective rescale removes the last round-off drift in the mass.
    m2 = float(np.sum(grid.weights * vals * vals))
    if m2 != a * a:
        vals = vals * math.sqrt(a * a / m2)
    return Field(grid, vals)


def _is_constant(vfield: Field) -> bool:
    v = vfield.values
    return float(np.max(v)) - float(np.min(v)) <= 1e-13 * max(1.0, float(np.max(np.abs(v))))


def minimize(grid: Grid, vfield: Field, a: float, seed: Field,
             opts: SolverOptions = SolverOptions(), *,
             split: NonlinearitySplit = DEFAULT_SPLIT,
             seed_id: str = "", on_accept=None) -> Solution:
    """Minimize the energy over the mass sphere from the given seed.

    Terminates when the projected-gradient residual drops to tol_residual,
    after max_iters iterations, or at a genuine numerical stagnation.
    Returns the best iterate found.  Accepted energies decrease strictly
    until energy differences sink below float64 round-off, after which a
    polishing phase accepts steps on strict residual decrease with the
    energy held fixed to within round-off slack.  Non-finite trial energies
    are treated as rejected steps, so blow-ups surface as a non-converged
    result rather than an exception.

    on_accept, if given, is called as on_accept(iteration, energy, field)
    after every accepted step.
    """
    if not a > 0.0:
        raise ValueError("a must be positive")
    u = project_mass(grid, seed, a)
    e_cur = energy(grid, vfield, u, split)
    tol = opts.tol_residual if opts.tol_residual is not None else 1e-6 * a
    tau = opts.step0
    msq = a * a
    w = grid.weights

    def diagnostics(field):
        g = gradient(grid, vfield, field, split)
        lam = float(np.sum(w * g.values * field.values)) / msq
        proj = g.values - lam * field.values
        return g, lam, float(np.sqrt(np.sum(w * proj * proj)))

    g, lam, res = diagnostics(u)
    converged = res <= tol
    iterations = 0
    polishing = False
    # Energy differences of candidate steps shrink like tau * res^2 and sink
    # below float64 round-off of the energy sums before res reaches tight
    # tolerances; past that point (detected as stagnation or as a residual
    # plateau) steps are accepted on strict residual decrease instead, with
    # the energy pinned to within round-off slack.
    e_slack = 1e-12 * max(1.0, abs(e_cur))
    res_best = res
    since_best = 0
    _PLATEAU = 250

    while iterations < opts.max_iters and not converged:
        iterations += 1

        if not polishing:
            accepted = False
            for _ in range(_MAX_BACKTRACKS):
                trial_vals = u.values - tau * g.values
                if np.isfinite(trial_vals).all() and trial_vals.any():
                    trial = project_mass(grid, Field(grid, trial_vals), a)
                    try:
                        e_trial = energy(grid, vfield, trial, split)
                    except ValueError:
                        e_trial = math.inf
                    if e_trial < e_cur:
                        accepted = True
                        break
                tau *= opts.shrink
            if not accepted:
                polishing = True
                tau = opts.step0
                e_slack = 1e-12 * max(1.0, abs(e_cur))
                continue
            u, e_cur = trial, e_trial
            tau = min(tau * opts.grow, opts.step0)
            g, lam, res = diagnostics(u)
            converged = res <= tol
            if res < 0.999 * res_best:
                res_best = res
                since_best = 0
            else:
                since_best += 1
                if since_best >= _PLATEAU:
                    polishing = True
                    tau = opts.step0
                    e_slack = 1e-12 * max(1.0, abs(e_cur))
            if on_accept is not None:
                on_accept(iterations, e_cur, u)

            if (opts.symmetrize_every is not None
                    and iterations % opts.symmetrize_every == 0
                    and _is_constant(vfield)):
                sym = project_mass(grid, Field(grid, np.abs(u.values)), a)
                sym = project_mass(grid, rearrange_decreasing(grid, sym), a)
                e_sym = energy(grid, vfield, sym, split)
                if e_sym < e_cur:
                    u, e_cur = sym, e_sym
                    g, lam, res = diagnostics(u)
                    converged = res <= tol
                    if on_accept is not None:
                        on_accept(iterations, e_cur, u)
        else:
            accepted = False
            for _ in range(_MAX_BACKTRACKS):
                trial_vals = u.values - tau * g.values
                if np.isfinite(trial_vals).all() and trial_vals.any():
                    trial = project_mass(grid, Field(grid, trial_vals), a)
                    try:
                        e_trial = energy(grid, vfield, trial, split)
                    except ValueError:
                        e_trial = math.inf
                    if e_trial <= e_cur + e_slack:
                        g_t, lam_t, res_t = diagnostics(trial)
                        if res_t < res:
                            u = trial
                            e_cur = min(e_cur, e_trial)
                            g, lam, res = g_t, lam_t, res_t
                            accepted = True
                            break
                tau *= opts.shrink
            if not accepted:
                break
            # Regrowth is essential: without it occasional rejections ratchet
            # tau down to nothing.  The residual test rejects anything above
            # the stability edge of the stiffest (boundary) mode, which the
            # energy test alone cannot see, so regrowing to step0 is safe.
            tau = min(tau * opts.grow, opts.step0)
            converged = res <= tol
            if on_accept is not None:
                on_accept(iterations, e_cur, u)

    return Solution(u=u, mass_a=a, lam=lam, energy=e_cur, residual=res,
                    iterations=iterations, converged=converged, seed_id=seed_id)


def gausson(grid: Grid, mu: float, a: float):
    """Sampled Gaussian solution of the constant-potential problem.

    Returns (field, lam_exact, energy_exact); the field is mass-projected to
    remove the (exponentially small) box-truncation drift.
    """
    if mu < -1.0:
        raise ValueError("mu must be >= -1")
    if not a > 0.0:
        raise ValueError("a must be positive")
    n = grid.dim
    amp = a * math.pi ** (-0.25 * n)
    r2 = grid.node_radii ** 2
    field = project_mass(grid, Field(grid, amp * np.exp(-0.5 * r2)), a)
    lam = n + mu - 2.0 * math.log(a) + 0.5 * n * math.log(math.pi)
    en = a * a * (0.5 * n + 0.5 * (mu + 1.0) + 0.25 * n * math.log(math.pi) - math.log(a))
    return field, lam, en


def solve_limit(grid: Grid, mu: float, a: float,
                opts: SolverOptions = SolverOptions(), *,
                split: NonlinearitySplit = DEFAULT_SPLIT,
                seed_id: str | None = None) -> Solution:
    """Constant-potential minimization from a unit-width Gaussian seed."""
    if mu < -1.0:
        raise ValueError("mu must be >= -1")
    vfield = Field(grid, np.full(grid.shape, float(mu)))
    seed = Field(grid, np.exp(-0.5 * grid.node_radii ** 2))
    if seed_id is None:
        seed_id = f"limit_mu{mu:g}_a{a:g}"
    return minimize(grid, vfield, a, seed, opts, split=split, seed_id=seed_id)


def _l2_distance(grid: Grid, u: Field, v: Field) -> float:
    d = u.values - v.values
    return float(np.sqrt(np.sum(grid.weights * d * d)))


def multistart(grid: Grid, vfield: Field, a: float, seeds, opts: SolverOptions = SolverOptions(),
               distinct_tol: float = 1e-2, *, split: NonlinearitySplit = DEFAULT_SPLIT,
               seed_ids=None, jobs: int = 1):
    """Run `minimize` from every seed and keep the distinct converged results.

    Seeds run independently (optionally on a thread pool); results are merged
    in deterministic (energy, seed_id) order regardless of scheduling.
    Predominantly negative solutions are sign-flipped before deduplication,
    and two solutions count as the same when either the relative L2 distance
    of u_i - u_j or of u_i + u_j falls below distinct_tol.  May return an
    empty list when nothing converged.
    """
    seeds = list(seeds)
    if not seeds:
        raise ValueError("multistart needs at least one seed")
    if seed_ids is None:
        seed_ids = [f"seed{i}" for i in range(len(seeds))]
    if len(seed_ids) != len(seeds):
        raise ValueError("seed_ids must match seeds")

    def run(pair):
        s, sid = pair
        return minimize(grid, vfield, a, s, opts, split=split, seed_id=sid)

    tasks = list(zip(seeds, seed_ids))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            sols = list(pool.map(run, tasks))
    else:
        sols = [run(t) for t in tasks]

    kept = []
    for sol in sorted((s for s in sols if s.converged), key=lambda s: (s.energy, s.seed_id)):
        vals = sol.u.values
        peak = vals.ravel()[int(np.argmax(np.abs(vals)))]
        if peak < 0.0:
            sol = Solution(u=Field(grid, -vals), mass_a=sol.mass_a, lam=sol.lam,
                           energy=sol.energy, residual=sol.residual,
                           iterations=sol.iterations, converged=sol.converged,
                           seed_id=sol.seed_id)
        distinct = all(
            min(_l2_distance(grid, sol.u, k.u), _l2_distance(grid, sol.u, Field(grid, -k.u.values))) / a
            > distinct_tol
            for k in kept
        )
        if distinct:
            kept.append(sol)
    return kept
