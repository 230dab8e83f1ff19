"""Numerical laboratory for the commutative model of the basic current-group
representation: special functions, Fourier/Levy-Khinchin quadrature, the
matrix group and its boundary action, the (mu, nu) measure pair, samplers,
representation operators, and machine-checkable identity suites."""

from .errors import (
    AccuracyError,
    CalibrationError,
    ConvergenceError,
    DomainError,
    NotInGroupError,
    PointAtInfinityError,
)
from .gridfn import CellGrid, GridFunction, default_grid, grid_1d, grid_1d_sqrt, grid_2d, tabulate
from .group import (
    GroupElement,
    GroupWord,
    TriangularElement,
    act,
    cocycle_beta,
    d_of_gamma,
    factor_word,
    form_matrix,
    make_d,
    make_s,
    make_z,
)
from .measures import Partition, Refinement, split_evenly
from .process import PointConfiguration, SeededStream, sample_marginal, sample_process
from .quadrature import QuadratureReport, RadialProfile, cached_cn, radial_fourier
from .specfun import Dimensions, FourierConstant, bessel_i, bessel_k, v_rho
from .suites import CheckReport, RunConfig, run_suite

__version__ = "0.1.0"

__all__ = [
    "AccuracyError", "CalibrationError", "CellGrid", "CheckReport",
    "ConvergenceError", "Dimensions", "DomainError", "FourierConstant",
    "GridFunction", "GroupElement", "GroupWord", "NotInGroupError",
    "Partition", "PointAtInfinityError", "PointConfiguration",
    "QuadratureReport", "RadialProfile", "Refinement", "RunConfig",
    "SeededStream", "TriangularElement", "act", "bessel_i", "bessel_k",
    "cached_cn", "cocycle_beta", "d_of_gamma", "default_grid", "factor_word",
    "form_matrix", "grid_1d", "grid_1d_sqrt", "grid_2d", "make_d", "make_s",
    "make_z", "radial_fourier", "run_suite", "sample_marginal",
    "sample_process", "split_evenly", "tabulate", "v_rho",
]
