"""Basis machinery and exhaustive enumeration of basic feasible solutions.

Enumeration is the ground-truth oracle for the degeneracy results: it visits every size-m column
subset in lexicographic order, solves the basis system, and keeps the nonnegative solutions.
"""
import itertools
import math
from dataclasses import replace
from typing import List
from typing import Sequence

import numpy as np
from scipy.linalg import lu_factor
from scipy.linalg import lu_solve
from scipy.linalg import qr
from scipy.linalg import svdvals

from facet_lp import DEFAULT_TOLERANCES
from facet_lp.errors import DimensionMismatch
from facet_lp.errors import EnumerationTooLarge
from facet_lp.errors import Infeasible
from facet_lp.errors import InvariantViolation
from facet_lp.errors import NonFiniteData
from facet_lp.errors import RankDeficient
from facet_lp.errors import SingularBasis
from facet_lp.lp.data_structures import Basis
from facet_lp.lp.data_structures import BasisPoint
from facet_lp.lp.data_structures import BfsEnumeration
from facet_lp.lp.data_structures import StandardFormLP
from facet_lp.tolerances import Tolerances


ENUMERATION_CAP = 10**6


def rank_threshold(M: np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Cutoff below which a pivot of a rank-revealing factorization of M counts as zero."""
    return tol.rank_for(M)


def numerical_rank(M: np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES) -> int:
    """Numerical rank from a QR factorization with column pivoting.

    Args:
        M (np.ndarray): dense matrix
        tol (Tolerances): tolerances, the rank cutoff is `tol.rank_for(M)`

    Returns:
        int: number of diagonal entries of R above the cutoff
    """
    if M.size == 0:
        return 0
    R = qr(M, mode="r", pivoting=True)[0]
    diagonal = np.abs(np.diag(R))
    return int(np.sum(diagonal > rank_threshold(M, tol)))


def validate(lp: StandardFormLP, tol: Tolerances = DEFAULT_TOLERANCES) -> StandardFormLP:
    """Check dimensions, finiteness and full row rank of an LP.

    Args:
        lp (StandardFormLP): the LP to check
        tol (Tolerances): tolerances for the rank decision

    Returns:
        StandardFormLP: a copy of the LP with `full_row_rank_checked` set

    Raises:
        DimensionMismatch: shapes of A, b, c or names disagree, m < 1 or n < m
        NonFiniteData: some entry is NaN or infinite
        RankDeficient: rank(A) < m
    """
    if lp.A.ndim != 2:
        raise DimensionMismatch(f"A must be a matrix, got an array with {lp.A.ndim} dimension(s).")
    m, n = lp.A.shape
    if m < 1 or n < m:
        raise DimensionMismatch(f"Standard form needs 1 <= m <= n, got m={m}, n={n}.")
    if lp.b.shape != (m,):
        raise DimensionMismatch(f"b has shape {lp.b.shape}, expected ({m},).")
    if lp.objective.shape != (n,):
        raise DimensionMismatch(f"c has shape {lp.objective.shape}, expected ({n},).")
    if lp.names is not None and len(lp.names) != n:
        raise DimensionMismatch(f"Got {len(lp.names)} variable names for {n} variables.")
    for label, array in (("A", lp.A), ("b", lp.b), ("c", lp.objective)):
        if not np.all(np.isfinite(array)):
            raise NonFiniteData(f"{label} contains NaN or infinite entries.")
    rank = numerical_rank(lp.A, tol)
    if rank < m:
        raise RankDeficient(f"rank(A) = {rank} < m = {m}; remove redundant rows first.")
    return replace(lp, full_row_rank_checked=True)


def count_degenerate(x: np.ndarray, basis: Basis, tol: Tolerances = DEFAULT_TOLERANCES) -> int:
    """Count the basic entries of x that are zero at tolerance.

    Args:
        x (np.ndarray): a basic solution
        basis (Basis): its basis
        tol (Tolerances): tolerances for the zero test

    Returns:
        int: number of basic entries with |x_i| <= tau_zero
    """
    basic = x[list(basis.indices)]
    return int(np.sum(np.abs(basic) <= tol.zero_for(x)))


def basis_solve(
    lp: StandardFormLP, basis: Basis, tol: Tolerances = DEFAULT_TOLERANCES
) -> BasisPoint:
    """Solve A(:, basis) x_B = b and scatter the result into a full-length point.

    The basic solution is returned even if it has negative entries.

    Args:
        lp (StandardFormLP): the LP
        basis (Basis): m column indices
        tol (Tolerances): tolerances for the singularity and zero tests

    Returns:
        BasisPoint: the basic solution and its degree of degeneracy

    Raises:
        DimensionMismatch: the basis does not have m indices inside [0, n)
        SingularBasis: the reciprocal condition number of the basis matrix is below tolerance
    """
    if len(basis) != lp.m or (basis.indices and basis.indices[-1] >= lp.n):
        raise DimensionMismatch(
            f"Basis {basis.indices} does not fit an LP with m={lp.m}, n={lp.n}."
        )
    B = lp.A[:, list(basis.indices)]
    sigma = svdvals(B)
    if sigma[0] == 0.0 or sigma[-1] / sigma[0] <= tol.basis_rcond:
        raise SingularBasis(f"Basis {basis.one_based()} is numerically singular.")
    x = np.zeros(lp.n)
    x[list(basis.indices)] = lu_solve(lu_factor(B), lp.b)
    return BasisPoint(basis, x, count_degenerate(x, basis, tol))


def degeneracy_degree(point: BasisPoint, tol: Tolerances = DEFAULT_TOLERANCES) -> int:
    """Degree of degeneracy, i.e. the number of zero basic variables.

    Args:
        point (BasisPoint): a basic solution
        tol (Tolerances): tolerances for the zero test

    Returns:
        int: the degree of degeneracy
    """
    return count_degenerate(point.x, point.basis, tol)


def is_feasible_point(
    lp: StandardFormLP, x: np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES
) -> bool:
    """Check x >= -tau_zero and Ax = b at tolerance.

    Args:
        lp (StandardFormLP): the LP
        x (np.ndarray): candidate point
        tol (Tolerances): tolerances

    Returns:
        bool: whether x is feasible
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (lp.n,):
        raise DimensionMismatch(f"Point has shape {x.shape}, expected ({lp.n},).")
    residual = float(np.linalg.norm(lp.A @ x - lp.b))
    return bool(np.all(x >= -tol.zero_for(x)) and residual <= tol.feas_for(lp.b))


def is_strictly_feasible_point(
    lp: StandardFormLP, x: np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES
) -> bool:
    """Check that x is a Slater point: every entry positive and Ax = b at tolerance.

    Args:
        lp (StandardFormLP): the LP
        x (np.ndarray): candidate point of length n
        tol (Tolerances): tolerances

    Returns:
        bool: whether x is strictly feasible

    Raises:
        DimensionMismatch: x does not have length n
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (lp.n,):
        raise DimensionMismatch(f"Point has shape {x.shape}, expected ({lp.n},).")
    residual = float(np.linalg.norm(lp.A @ x - lp.b))
    return bool(np.all(x > tol.zero_for(x)) and residual <= tol.feas_for(lp.b))


def _is_new_point(x: np.ndarray, points: Sequence[np.ndarray], dedup: float) -> bool:
    return all(np.max(np.abs(x - point)) > dedup for point in points)


def enumerate_bfs(
    lp: StandardFormLP, tol: Tolerances = DEFAULT_TOLERANCES, cap: int = ENUMERATION_CAP
) -> BfsEnumeration:
    """Enumerate every basic feasible solution of a small LP.

    Args:
        lp (StandardFormLP): a validated LP
        tol (Tolerances): tolerances
        cap (int): largest allowed number of column subsets

    Returns:
        BfsEnumeration: feasible bases in lexicographic order and the distinct extreme points

    Raises:
        EnumerationTooLarge: C(n, m) exceeds the cap
        Infeasible: no basis is feasible
        InvariantViolation: a distinct point has more than m positive entries
    """
    subsets = math.comb(lp.n, lp.m)
    if subsets > cap:
        raise EnumerationTooLarge(f"C({lp.n}, {lp.m}) = {subsets} subsets exceeds the cap {cap}.")

    entries: List[BasisPoint] = []
    points: List[np.ndarray] = []
    for columns in itertools.combinations(range(lp.n), lp.m):
        try:
            point = basis_solve(lp, Basis(columns), tol)
        except SingularBasis:
            continue
        if np.any(point.x < -tol.zero_for(point.x)):
            continue
        entries.append(point)
        if _is_new_point(point.x, points, tol.dedup):
            points.append(point.x)

    if not entries:
        raise Infeasible("No feasible basis exists.")
    for point in points:
        if int(np.sum(point > tol.zero_for(point))) > lp.m:
            raise InvariantViolation(f"Extreme point {point} has more than m={lp.m} positives.")
    return BfsEnumeration(
        lp_digest=lp.digest,
        entries=entries,
        distinct_points=points,
        all_degenerate=all(entry.degeneracy_degree >= 1 for entry in entries),
    )
