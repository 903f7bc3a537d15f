"""Dense interior-point and revised simplex solvers with KKT and conditioning probes."""
from facet_lp.solvers.ipm import IpmOptions
from facet_lp.solvers.ipm import IpmResult
from facet_lp.solvers.ipm import solve_ipm
from facet_lp.solvers.kkt import kkt_residuals
from facet_lp.solvers.kkt import normal_matrix_condition
from facet_lp.solvers.simplex import SimplexResult
from facet_lp.solvers.simplex import solve_simplex


__all__ = [
    "IpmOptions",
    "IpmResult",
    "SimplexResult",
    "kkt_residuals",
    "normal_matrix_condition",
    "solve_ipm",
    "solve_simplex",
]
