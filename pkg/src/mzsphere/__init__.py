"""Spherical-harmonic sampling, concentration and interpolation analysis."""
from ._errors import DomainError, NumericalError, PrecisionError, UnsupportedDimensionError
from .concentration import plunge_count, spectrum, trace_closed_form, trace_deficit_slope, trace_square
from .families import TriangularFamily, density_scan, family_from, gen_fibonacci, gen_random
from .harmonic import HarmonicBasis, dim_h, dim_pi, eval_kernel, evaluation_matrix, kernel_constant
from .linalg import QuadratureRule, golub_welsch, min_norm_lstsq, sym_eigen
from .mz import (
    critical_density,
    critical_density_via_trace,
    delayed_means_check,
    frame_bounds_l2,
    interpolate_min_norm,
    mz_sweep,
)
from .special_fn import ZonalProfile, funk_hecke_symbol, gegenbauer_eval, jacobi_eval
from .sphere import Cap, geodesic_distance, surface_area

__version__ = "0.1.0"
