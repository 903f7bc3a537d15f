"""Numerical tolerances shared by every module.

All tolerances are gathered into one frozen dataclass so that a single object can be threaded
through enumeration, facial reduction and the solvers. Tolerances that depend on the data (the
zero test and the rank cutoff) are exposed as methods that scale the stored base values.
"""
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Tolerances:
    """Absolute and relative tolerances for dense standard-form LP computations.

    The zero test scales with the magnitude of the vector it is applied to, the rank cutoff scales
    with the largest singular value of the matrix. Basis nonsingularity is decided on the reciprocal
    condition number of the basis matrix.
    """

    zero: float = 1e-9
    feas: float = 1e-8
    dedup: float = 1e-7
    support: float = 1e-6
    cert: float = 1e-7
    ipm: float = 1e-8
    basis_rcond: float = 1e-10
    rank_scale: float = 10.0

    def zero_for(self, x: np.ndarray) -> float:
        """Zero threshold for the entries of a vector.

        Args:
            x (np.ndarray): vector whose entries are tested

        Returns:
            float: tau_zero * (1 + max |x_i|)
        """
        scale = float(np.max(np.abs(x))) if x.size else 0.0
        return self.zero * (1.0 + scale)

    def rank_for(self, M: np.ndarray) -> float:
        """Rank cutoff for a dense matrix.

        Args:
            M (np.ndarray): matrix whose numerical rank is decided

        Returns:
            float: rank_scale * machine epsilon * max(rows, cols) * largest singular value
        """
        if M.size == 0:
            return 0.0
        sigma_max = float(np.linalg.norm(M, 2))
        return self.rank_scale * float(np.finfo(float).eps) * max(M.shape) * sigma_max

    def feas_for(self, rhs: np.ndarray) -> float:
        """Residual threshold for an equality system with the given right-hand side.

        Args:
            rhs (np.ndarray): right-hand side of the system

        Returns:
            float: tau_feas * (1 + ||rhs||)
        """
        return self.feas * (1.0 + float(np.linalg.norm(rhs)))
