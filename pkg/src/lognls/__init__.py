"""Mass-constrained solutions of the logarithmic Schrodinger equation.

Library layout:

    nonlinearity  closed-form split of s*log(s^2) and the gauge norm
    grid          uniform tensor grids, quadrature, Laplacian, rearrangement
    energy        constrained functional, gradient, multiplier, residual
    solver        projected-gradient minimization and the Gaussian oracle
    potentials    multi-well potentials, cut-off seeds, barycenter map
    experiments   multiplicity/concentration sweeps and level verification
    config, cli   flat key = value configs and the command-line front end
"""

from .nonlinearity import (NonlinearitySplit, DEFAULT_SPLIT, f1, f2, df1, df2,
                           log_nl, luxemburg_gauge, ratio_bounds)
from .grid import (Grid, Field, sample_field, integrate, laplacian_apply,
                   dirichlet_form, sample_potential, rearrange_decreasing,
                   write_field_csv, read_field_csv)
from .energy import (EnergyReport, energy, gradient, multiplier, residual,
                     xnorm, energy_report, mass)
from .solver import (SolverOptions, Solution, project_mass, minimize, gausson,
                     solve_limit, multistart)
from .potentials import (PotentialSpec, MinimaAuditError, minima_set,
                         cutoff_eta, build_seed, barycenter)
from .experiments import (ExperimentRecord, ConcentrationOutcome, LevelCheck,
                          LevelReport, run_concentration, run_multiplicity,
                          run_eps_sweep, verify_level_structure)
from .config import ConfigError, RunConfig, load_config, config_from_text

__version__ = "0.1.0"
