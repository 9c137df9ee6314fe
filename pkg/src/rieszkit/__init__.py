"""rieszkit: Riesz potentials, maximal averages, Morrey conditions and a
weighted-norm inequality verification harness on uniform grids."""

from .grid import Ball, Field, FieldFormatError, GridSpec, ball_integral, \
    inner, integral, lp_norm, read_field, read_field_csv, write_field, \
    write_field_csv
from .maximal import DegenerateWeightWarning, RadiusLadder, a1_constant, \
    a1_lift, maximal, maximal_indicator_majorant
from .morrey import MorreyReport, gaussian_bump, indicator_ball, \
    morrey_constant, power_weight, random_bump, random_weight, smooth_bump
from .oracle import maximal_bruteforce, morrey_bruteforce, riesz_bruteforce, \
    riesz_bruteforce_field
from .params import ExponentParams, ParamError, choose_gamma, validate_params
from .riesz import RieszKernelTable, adjoint_defect, central_cell_weight, \
    holder_split_gap, kernel_table, riesz, riesz_at_point_radial, \
    riesz_direct, riesz_fft
from .spectral import frac_laplacian, gradient, gradient_magnitude, \
    riesz_inversion_constant
from .verify import CHECK_NAMES, RatioReport, SuiteReport, check_a1_lift, \
    check_corollary2, check_duality_step, check_fefferman_stein, \
    check_inner_bound, check_lemma4, check_lemma5, check_theorem1, \
    oracle_gate, run_suite

__version__ = "0.1.0"
