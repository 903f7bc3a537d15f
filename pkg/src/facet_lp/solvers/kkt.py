"""KKT residuals and the condition number of the interior-point normal matrix."""
from typing import Tuple

import numpy as np
from scipy.linalg import eigvalsh

from facet_lp.errors import DimensionMismatch
from facet_lp.errors import NonPositiveInterior
from facet_lp.lp.data_structures import StandardFormLP


KKTTriple = Tuple[float, float, float]


def kkt_residuals(lp: StandardFormLP, x: np.ndarray, y: np.ndarray, s: np.ndarray) -> KKTTriple:
    """Relative primal and dual residuals and the average complementarity of a primal-dual triple.

    Args:
        lp (StandardFormLP): the LP
        x (np.ndarray): primal point, length n
        y (np.ndarray): dual multipliers, length m
        s (np.ndarray): dual slacks, length n

    Returns:
        KKTTriple: (||Ax - b|| / (1 + ||b||), ||A^T y + s - c|| / (1 + ||c||), <x, s> / n)

    Raises:
        DimensionMismatch: vector lengths disagree with the LP
    """
    if x.shape != (lp.n,) or s.shape != (lp.n,) or y.shape != (lp.m,):
        raise DimensionMismatch(
            f"KKT triple shapes {x.shape}, {y.shape}, {s.shape} do not fit m={lp.m}, n={lp.n}."
        )
    c = lp.objective
    primal = float(np.linalg.norm(lp.A @ x - lp.b)) / (1.0 + float(np.linalg.norm(lp.b)))
    dual = float(np.linalg.norm(lp.A.T @ y + s - c)) / (1.0 + float(np.linalg.norm(c)))
    complementarity = float(x @ s) / lp.n
    return primal, dual, complementarity


def normal_matrix_condition(A: np.ndarray, x: np.ndarray, s: np.ndarray) -> float:
    """Spectral condition number of A Diag(x) Diag(s)^-1 A^T.

    Args:
        A (np.ndarray): constraint matrix
        x (np.ndarray): strictly positive primal point
        s (np.ndarray): strictly positive dual slacks

    Returns:
        float: lambda_max / lambda_min, or infinity when lambda_min <= 0 numerically

    Raises:
        NonPositiveInterior: some x_i or s_i is not positive
    """
    if np.any(x <= 0) or np.any(s <= 0):
        raise NonPositiveInterior("The normal matrix needs strictly positive x and s.")
    normal = (A * (x / s)) @ A.T
    eigenvalues = eigvalsh(normal)
    if eigenvalues[0] <= 0:
        return float("inf")
    return float(eigenvalues[-1] / eigenvalues[0])
