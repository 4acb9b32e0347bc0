from .grid import Grid1D
from .solve import Trajectory, heat_kernel, solve_linear, solve_semilinear
from .flows import FlowSpec, apply_flow, flow_catalog
from .covariance import covariance_residual, equation_defect
from .bridge import fourier_bridge

__all__ = [
    "Grid1D",
    "Trajectory",
    "heat_kernel",
    "solve_linear",
    "solve_semilinear",
    "FlowSpec",
    "apply_flow",
    "flow_catalog",
    "covariance_residual",
    "equation_defect",
    "fourier_bridge",
]
