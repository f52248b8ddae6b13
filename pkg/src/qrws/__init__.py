"""Quantum random walk search on the hypercube with a Householder qudit coin.

Subpackages:

* :mod:`qrws.walk` - exact state-vector simulation of the search
* :mod:`qrws.coins` - coin construction and the zeta(phi) curve relations
* :mod:`qrws.sweep` - Monte Carlo / grid landscape datasets
* :mod:`qrws.analysis` - profiles, widths, ridge fits, robustness fields
* :mod:`qrws.surrogate` - neural surrogate for landscape extrapolation
* :mod:`qrws.heatmap` - PGM rendering of 2-D fields
* :mod:`qrws.cli` - the ``qrws`` command-line tool
"""

from .analysis import curve_profile, extract_ridge, fit_alpha, sigma_p_grid, sigma_p_prime, width
from .coins import ALPHA_BENCH, ALPHA_ML, CoinSpec, CurveKind, CurveRelation, build_coin, zeta_of_phi
from .sweep import SweepDataset, load_dataset, save_dataset, sweep_grid, sweep_random
from .walk import RunConfig, WalkState, initial_state, iteration_count, probability_trace, run, run_batch

__version__ = "0.1.0"

__all__ = [
    "ALPHA_BENCH",
    "ALPHA_ML",
    "CoinSpec",
    "CurveKind",
    "CurveRelation",
    "RunConfig",
    "SweepDataset",
    "WalkState",
    "build_coin",
    "curve_profile",
    "extract_ridge",
    "fit_alpha",
    "initial_state",
    "iteration_count",
    "load_dataset",
    "probability_trace",
    "run",
    "run_batch",
    "save_dataset",
    "sigma_p_grid",
    "sigma_p_prime",
    "sweep_grid",
    "sweep_random",
    "width",
    "zeta_of_phi",
    "__version__",
]
