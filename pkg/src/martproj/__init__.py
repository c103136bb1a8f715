"""Path transformations, martingale projections and decoherence numerics."""

__version__ = "0.1.0"

from .grid import (Path, TimeGrid, Window, make_grid, make_path, restrict, uniform_grid,
                   window)
from .laws import Degenerate, LogNormal, Normal, Uniform, law_from_dict
from .streams import RandomSource
from .transforms import (Composed, HorizontalStretch, Hold, Identity, InteriorBump,
                         Multiplicative, Restriction, SineDemo, StochasticTransform,
                         VerticalBump, apply, builtin_transform, commutator_check, compose,
                         compose_chain, holder_probe, invertibility_check)
from .dynamics import (MARTINGALE_LAW, SUB_LAW, SUPER_LAW, gaussian_sine_path,
                       multiplicative_weight_step, simulate_weight_trajectory)
from .classifier import (Label, boundedness_probe, classify_projection, cond_expectation,
                         cond_lp_norm, law_consistency_check)
from .quantum import (PureStateSnapshot, density_coordinates, expected_information_step,
                      expected_offdiag_step, information_gain_floor, magnitudes,
                      run_full_trajectory, shannon_wiener, verify_decoherence_step,
                      verify_information_step, verify_martingale_step)

__all__ = ["__version__",
    "Path",
    "TimeGrid",
    "Window",
    "make_grid",
    "make_path",
    "restrict",
    "uniform_grid",
    "window",
    "Degenerate",
    "LogNormal",
    "Normal",
    "Uniform",
    "law_from_dict",
    "RandomSource",
    "Composed",
    "HorizontalStretch",
    "Hold",
    "Identity",
    "InteriorBump",
    "Multiplicative",
    "Restriction",
    "SineDemo",
    "StochasticTransform",
    "VerticalBump",
    "apply",
    "builtin_transform",
    "commutator_check",
    "compose",
    "compose_chain",
    "holder_probe",
    "invertibility_check",
    "MARTINGALE_LAW",
    "SUB_LAW",
    "SUPER_LAW",
    "gaussian_sine_path",
    "multiplicative_weight_step",
    "simulate_weight_trajectory",
    "Label",
    "boundedness_probe",
    "classify_projection",
    "cond_expectation",
    "cond_lp_norm",
    "law_consistency_check",
    "PureStateSnapshot",
    "density_coordinates",
    "expected_information_step",
    "expected_offdiag_step",
    "information_gain_floor",
    "magnitudes",
    "run_full_trajectory",
    "shannon_wiener",
    "verify_decoherence_step",
    "verify_information_step",
    "verify_martingale_step",
]
