"""Galerkin finite elements for convection-diffusion with a large shift on Durán meshes."""

from .analysis import (
    ConvergenceRow,
    ConvergenceTable,
    EnergyNormParams,
    energy_norm,
    error_vs_exact,
    error_vs_reference,
    interpolate,
    interpolation_study,
    rates,
)
from .fem import FeFunction, FeSpace, LinearSystem, assemble, evaluate, gauss_rule, shape_eval, solve, solve_problem
from .mesh import Mesh1D, MeshParams, Variant, build_coarse, build_mesh, build_standard, compute_M, compute_M2
from .problem import ProblemSpec, layer_model, manufacture_rhs, registry_get, validate
from .study import StudyConfig, run_study

__version__ = "0.1.0"
