"""Finite-volume solver for anisotropic diffusion-reaction problems on merged Voronoi-Delaunay meshes."""
from .dualmesh import MvdMesh, VoronoiDual, build, build_mvd, build_voronoi
from .errors import MvdError
from .fields import ScalarField, VectorField, inner_D, inner_star, inner_V
from .geometry import Tensor2, rotate_tensor
from .harness import TENSORS, CaseConfig, CaseResult, convergence_study, emit_csv, run_case
from .meshio import TriMesh, equitri, generate_rectangle_mesh, load_msh, parse_msh, validate_acute
from .operators import apply_flux, div_D, div_V, grad_h
from .system import LinearSystem, Problem, assemble, solve_cg

__all__ = [
    "MvdMesh", "VoronoiDual", "build", "build_mvd", "build_voronoi", "MvdError",
    "ScalarField", "VectorField", "inner_D", "inner_V", "inner_star", "Tensor2",
    "rotate_tensor", "TENSORS", "CaseConfig", "CaseResult", "convergence_study",
    "emit_csv", "run_case", "TriMesh", "equitri", "generate_rectangle_mesh", "load_msh",
    "parse_msh", "validate_acute", "apply_flux", "div_D", "div_V", "grad_h",
    "LinearSystem", "Problem", "assemble", "solve_cg",
]
