"""Two-step facial reduction of standard-form systems and its dual counterpart.

Step one removes the columns fixed to zero by a maximal-support exposing vector; the surviving
columns form the facial range vector V, so every feasible point factors as x = Vv. Step two keeps a
maximal linearly independent subset of the rows of AV. Both steps are pure selections, the sparsity
pattern of A is never recombined.
"""
from dataclasses import dataclass
from typing import Optional
from typing import Sequence
from typing import Tuple

import numpy as np
from scipy.linalg import lstsq
from scipy.linalg import qr
from scipy.optimize import nnls

from facet_lp import DEFAULT_TOLERANCES
from facet_lp.errors import AuxiliarySolveFailed
from facet_lp.errors import DimensionMismatch
from facet_lp.errors import EmptyFace
from facet_lp.errors import InconsistentRedundantRow
from facet_lp.errors import Infeasible
from facet_lp.errors import LemmaViolation
from facet_lp.errors import NotInFace
from facet_lp.errors import NumericalBreakdown
from facet_lp.lp.bases import is_strictly_feasible_point
from facet_lp.lp.bases import numerical_rank
from facet_lp.lp.bases import validate
from facet_lp.lp.data_structures import StandardFormLP
from facet_lp.reduction.certificates import DualExposingCertificate
from facet_lp.reduction.certificates import ExposingCertificate
from facet_lp.reduction.certificates import dual_exposing_vector
from facet_lp.reduction.certificates import exposing_vector
from facet_lp.solvers.ipm import IpmOptions
from facet_lp.solvers.ipm import solve_ipm
from facet_lp.tolerances import Tolerances


Index = Tuple[int, ...]


@dataclass
class FacialReduction:
    """Result of facially reducing {x >= 0 : Ax = b}.

    The reduced system is {v >= 0 : A_reduced v = b_reduced} with
    A_reduced = A[kept_rows][:, kept_columns].
    Without a certificate both index sets are complete. The witness is a strictly feasible point of
    the reduced system when `slater_verified` is set.
    """

    original_digest: str
    original_shape: Tuple[int, int]
    kept_columns: Index
    kept_rows: Index
    A_reduced: np.ndarray
    b_reduced: np.ndarray
    certificate: Optional[ExposingCertificate]
    slater_verified: bool
    witness: Optional[np.ndarray] = None
    iterations: int = 0

    @property
    def rank_av(self) -> int:
        """Rank of AV, equal to the number of kept rows."""
        return len(self.kept_rows)

    @property
    def exposed_columns(self) -> Index:
        """Columns fixed to zero on the whole feasible set."""
        kept = set(self.kept_columns)
        return tuple(j for j in range(self.original_shape[1]) if j not in kept)

    def reduced_lp(self, c: Optional[np.ndarray] = None) -> StandardFormLP:
        """The reduced LP (A_reduced, b_reduced, V^T c).

        Args:
            c (np.ndarray, optional): objective of the original LP, zeros by default

        Returns:
            StandardFormLP: the facially reduced LP, with its full row rank already established

        Raises:
            EmptyFace: no rows or no columns survive the reduction
        """
        if not self.kept_rows or not self.kept_columns:
            raise EmptyFace("The reduced system has no rows or no columns left.")
        objective = np.zeros(len(self.kept_columns)) if c is None else c[list(self.kept_columns)]
        return StandardFormLP(
            self.A_reduced, self.b_reduced, objective, full_row_rank_checked=True
        )


@dataclass
class DualFacialReduction:
    """Result of facially reducing the dual set {(y, s) : A^T y + s = c, s >= 0}.

    The reduced dual system is A^T y + U v = c, v >= 0, where U selects the identity columns indexed
    by kept_slack_columns.
    """

    kept_slack_columns: Index
    U: np.ndarray
    redundant_row_found: bool
    certificate: Optional[DualExposingCertificate] = None
    stacked_rank: int = 0


def facial_range(
    certificate: ExposingCertificate, n: int, b: Optional[np.ndarray] = None
) -> Index:
    """Columns of the facial range vector V: the complement of the exposing support.

    Args:
        certificate (ExposingCertificate): exposing certificate for a system with n variables
        n (int): number of variables
        b (np.ndarray, optional): right-hand side, used to reject a fully exposed nonzero system

    Returns:
        Index: kept columns in increasing order

    Raises:
        EmptyFace: every coordinate is exposed while b is nonzero
    """
    exposed = set(certificate.support)
    kept = tuple(j for j in range(n) if j not in exposed)
    if not kept and b is not None and np.any(b != 0):
        raise EmptyFace("Every variable is fixed to zero but the right-hand side is nonzero.")
    return kept


def remove_redundant_rows(
    M: np.ndarray, rhs: np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES
) -> Tuple[Index, np.ndarray, np.ndarray]:
    """Keep a maximal linearly independent subset of rows using pivoted QR of M^T.

    Args:
        M (np.ndarray): matrix whose rows are filtered
        rhs (np.ndarray): right-hand side matching the rows of M
        tol (Tolerances): tolerances for the rank and consistency decisions

    Returns:
        Tuple[Index, np.ndarray, np.ndarray]: kept row indices in original order,
            the kept rows and their right-hand side

    Raises:
        DimensionMismatch: rhs length differs from the row count
        InconsistentRedundantRow: a dropped row contradicts the right-hand side
    """
    rows = M.shape[0]
    if rhs.shape != (rows,):
        raise DimensionMismatch(f"rhs has shape {rhs.shape}, expected ({rows},).")
    if M.size == 0:
        rank, order = 0, np.arange(rows)
    else:
        R, order = qr(M.T, mode="r", pivoting=True)
        rank = int(np.sum(np.abs(np.diag(R)) > tol.rank_for(M)))
    kept = tuple(sorted(int(i) for i in order[:rank]))
    dropped = [i for i in range(rows) if i not in set(kept)]
    M_kept, rhs_kept = M[list(kept)], rhs[list(kept)]

    if dropped:
        if rank:
            weights = lstsq(M_kept.T, M[dropped].T)[0]
            residual = rhs[dropped] - weights.T @ rhs_kept
        else:
            residual = rhs[dropped]
        if float(np.max(np.abs(residual))) > tol.feas_for(rhs):
            raise InconsistentRedundantRow(
                f"Dropped rows {[i + 1 for i in dropped]} contradict the right-hand side."
            )
    return kept, M_kept, rhs_kept


def lift(red: FacialReduction, v: np.ndarray) -> np.ndarray:
    """Scatter a reduced point into the original space, x = Vv.

    Args:
        red (FacialReduction): the reduction
        v (np.ndarray): point of the reduced system

    Returns:
        np.ndarray: point of the original system

    Raises:
        DimensionMismatch: v does not have one entry per kept column
    """
    if np.shape(v) != (len(red.kept_columns),):
        raise DimensionMismatch(f"Reduced point has shape {np.shape(v)}.")
    x = np.zeros(red.original_shape[1])
    x[list(red.kept_columns)] = v
    return x


def restrict(
    red: FacialReduction, x: np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES
) -> np.ndarray:
    """Gather the kept coordinates of an original point, v = V^T x.

    Args:
        red (FacialReduction): the reduction
        x (np.ndarray): point of the original system
        tol (Tolerances): tolerances for the zero test on exposed coordinates

    Returns:
        np.ndarray: point of the reduced system

    Raises:
        DimensionMismatch: x does not have n entries
        NotInFace: x has mass on an exposed coordinate
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (red.original_shape[1],):
        raise DimensionMismatch(f"Point has shape {x.shape}.")
    exposed = list(red.exposed_columns)
    if exposed and float(np.max(np.abs(x[exposed]))) > tol.zero_for(x):
        raise NotInFace(f"Point has mass on exposed coordinates {[j + 1 for j in exposed]}.")
    return x[list(red.kept_columns)].copy()


def find_exposing_vector(
    lp: StandardFormLP, tol: Tolerances = DEFAULT_TOLERANCES, opts: Optional[IpmOptions] = None
) -> Optional[ExposingCertificate]:
    """Maximal-support exposing vector of the feasible set of an LP.

    Args:
        lp (StandardFormLP): a validated LP
        tol (Tolerances): tolerances
        opts (IpmOptions, optional): interior-point options for the auxiliary LP

    Returns:
        Optional[ExposingCertificate]: the certificate, None when strict feasibility holds
    """
    return exposing_vector(lp.A, lp.b, tol, opts)


def find_dual_exposing_vector(
    lp: StandardFormLP, tol: Tolerances = DEFAULT_TOLERANCES, opts: Optional[IpmOptions] = None
) -> Optional[DualExposingCertificate]:
    """Maximal-support dual exposing vector w >= 0 with Aw = 0 and c^T w = 0.

    Args:
        lp (StandardFormLP): a validated LP
        tol (Tolerances): tolerances
        opts (IpmOptions, optional): interior-point options for the auxiliary LP

    Returns:
        Optional[DualExposingCertificate]: the certificate, None when dual strict feasibility holds
    """
    return dual_exposing_vector(lp.A, lp.objective, tol, opts)


def _combine(A: np.ndarray, y_old: Optional[np.ndarray], y_new: np.ndarray) -> np.ndarray:
    """Combine two certificates so that the result exposes the union of their supports."""
    if y_old is None:
        return y_new
    z_old, z_new = A.T @ y_old, A.T @ y_new
    exposed = z_old > 0
    negative = exposed & (z_new < 0)
    weight = 1.0
    if np.any(negative):
        weight = max(weight, 2.0 * float(np.max(-z_new[negative] / z_old[negative])))
    return weight * y_old + y_new


def _certificate_from_multiplier(
    A: np.ndarray, y: np.ndarray, tol: Tolerances
) -> ExposingCertificate:
    z = A.T @ y
    peak = float(np.max(z))
    y, z = y / peak, z / peak
    support = tuple(int(i) for i in np.flatnonzero(z > tol.support))
    return ExposingCertificate(y=y, z=z, support=support, tolerance_used=tol.support)


def slater_witness(
    A: np.ndarray,
    b: np.ndarray,
    tol: Tolerances = DEFAULT_TOLERANCES,
    opts: Optional[IpmOptions] = None,
) -> Optional[np.ndarray]:
    """Strictly feasible point of {v >= 0 : Av = b} from a homogenized max-min LP.

    The LP maximizes t subject to Av = b*tau, v >= t, tau >= t and sum(v) + tau = 1. Its optimum
    gives the point v / tau with every entry at least t / tau.

    Args:
        A (np.ndarray): full row rank matrix with at least one row
        b (np.ndarray): right-hand side
        tol (Tolerances): tolerances
        opts (IpmOptions, optional): interior-point options

    Returns:
        Optional[np.ndarray]: the witness, None when the optimal t is zero

    Raises:
        Infeasible: the homogenized LP could not be solved, so the system has no feasible point
        AuxiliarySolveFailed: the interior-point method broke down on the homogenized LP
    """
    m, k = A.shape
    ones, eye = np.ones((k, 1)), np.eye(k)
    # columns: v (k), tau, t, g (k), g_tau
    aux = np.vstack(
        [
            np.hstack([A, -b[:, None], np.zeros((m, 1)), np.zeros((m, k)), np.zeros((m, 1))]),
            np.hstack([eye, np.zeros((k, 1)), -ones, -eye, np.zeros((k, 1))]),
            np.hstack([np.zeros((1, k)), [[1.0, -1.0]], np.zeros((1, k)), [[-1.0]]]),
            np.hstack([np.ones((1, k)), [[1.0, 0.0]], np.zeros((1, k)), [[0.0]]]),
        ]
    )
    rhs = np.concatenate([np.zeros(m + k + 1), [1.0]])
    cost = np.zeros(2 * k + 3)
    cost[k + 1] = -1.0
    try:
        result = solve_ipm(StandardFormLP(aux, rhs, cost, full_row_rank_checked=True), opts)
    except NumericalBreakdown as err:
        raise AuxiliarySolveFailed(f"Interior witness LP broke down: {err}") from err
    if not result.converged:
        raise Infeasible(f"Interior witness LP ended with status {result.status!r}.")
    v, tau, t = result.x_star[:k], result.x_star[k], result.x_star[k + 1]
    if t <= tol.zero or tau <= tol.zero:
        return None
    x = v / tau
    return np.asarray(x - lstsq(A, A @ x - b)[0])


def facially_reduce(
    lp: StandardFormLP, tol: Tolerances = DEFAULT_TOLERANCES, opts: Optional[IpmOptions] = None
) -> FacialReduction:
    """Facially reduce {x >= 0 : Ax = b} to an equivalent strictly feasible full row rank system.

    Exposed columns are removed until no certificate remains. One pass is expected; the number of
    passes that removed columns is recorded. The certificates of all passes are combined into one
    whose support is every removed column. Redundant rows of AV are then removed and a Slater point
    of the reduced system is computed.

    Args:
        lp (StandardFormLP): the LP, validated here when not yet checked
        tol (Tolerances): tolerances
        opts (IpmOptions, optional): interior-point options for the auxiliary solves

    Returns:
        FacialReduction: the reduction

    Raises:
        Infeasible: the system turned out to be infeasible
        EmptyFace: every column is exposed while b is nonzero
        LemmaViolation: a certificate exists but no row became redundant
    """
    if not lp.full_row_rank_checked:
        lp = validate(lp, tol)
    A, b = lp.A, lp.b
    kept = np.arange(lp.n)
    multiplier: Optional[np.ndarray] = None
    iterations = 0
    while kept.size:
        local = exposing_vector(A[:, kept], b, tol, opts)
        if local is None:
            break
        iterations += 1
        multiplier = _combine(A, multiplier, local.y)
        kept = kept[list(facial_range(local, kept.size, b))]

    certificate: Optional[ExposingCertificate] = None
    if multiplier is not None:
        certificate = _certificate_from_multiplier(A, multiplier, tol)
    if certificate is not None and not certificate.is_valid(A, b, tol):
        raise AuxiliarySolveFailed("Combined exposing certificate failed its identities.")

    kept_rows, A_reduced, b_reduced = remove_redundant_rows(A[:, kept], b, tol)
    if certificate is not None and len(kept_rows) == lp.m:
        raise LemmaViolation("An exposing certificate exists but every row of AV is independent.")

    if kept.size == 0:
        witness: Optional[np.ndarray] = np.zeros(0)
    elif not kept_rows:
        witness = np.ones(kept.size)
    else:
        witness = slater_witness(A_reduced, b_reduced, tol, opts)
    verified = witness is not None and (
        witness.size == 0
        or not kept_rows
        or is_strictly_feasible_point(StandardFormLP(A_reduced, b_reduced), witness, tol)
    )
    return FacialReduction(
        original_digest=lp.digest,
        original_shape=(lp.m, lp.n),
        kept_columns=tuple(int(j) for j in kept),
        kept_rows=kept_rows,
        A_reduced=A_reduced,
        b_reduced=b_reduced,
        certificate=certificate,
        slater_verified=bool(verified),
        witness=witness,
        iterations=iterations,
    )


def minimum_degeneracy_degree(red: FacialReduction) -> int:
    """Lower bound m - rank(AV) on the degree of degeneracy of every BFS.

    Args:
        red (FacialReduction): reduction of the LP

    Returns:
        int: the bound, zero when strict feasibility holds
    """
    return red.original_shape[0] - red.rank_av


def range_split(lp: StandardFormLP, red: FacialReduction) -> Tuple[np.ndarray, np.ndarray]:
    """Orthonormal bases of range(AV) and of its orthogonal complement from a pivoted QR of AV.

    Perturbing b by any vector with a nonzero component along the second basis makes the system
    infeasible, so the distance to infeasibility is zero whenever that basis is nonempty.

    Args:
        lp (StandardFormLP): the original LP
        red (FacialReduction): its reduction

    Returns:
        Tuple[np.ndarray, np.ndarray]: (Q1, Q2) with Q1 spanning range(AV)
    """
    AV = lp.A[:, list(red.kept_columns)]
    if AV.size == 0:
        return np.zeros((lp.m, 0)), np.eye(lp.m)
    Q = qr(AV, mode="full", pivoting=True)[0]
    return Q[:, : red.rank_av], Q[:, red.rank_av :]


def farkas_infeasible(
    A: np.ndarray, rhs: np.ndarray, y: np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES
) -> bool:
    """Check that y certifies infeasibility of {x >= 0 : Ax = rhs}: A^T y >= 0 and <rhs, y> < 0.

    Args:
        A (np.ndarray): constraint matrix
        rhs (np.ndarray): right-hand side
        y (np.ndarray): candidate certificate
        tol (Tolerances): tolerances for the sign test on A^T y

    Returns:
        bool: whether y is a Farkas certificate
    """
    z = A.T @ y
    return bool(np.all(z >= -tol.zero_for(z)) and float(rhs @ y) < 0.0)


def feasibility_distance(A: np.ndarray, rhs: np.ndarray) -> float:
    """Distance min ||Ax - rhs|| over x >= 0, zero exactly when {x >= 0 : Ax = rhs} is nonempty.

    When b^T y = 0 and A^T y >= 0 for a feasible b, the distance of rhs = b - eps * y is
    eps * ||y||.

    Args:
        A (np.ndarray): constraint matrix
        rhs (np.ndarray): right-hand side

    Returns:
        float: the nonnegative least-squares residual norm
    """
    return float(nnls(A, rhs, maxiter=50 * A.shape[1])[1])


def dual_facially_reduce(
    lp: StandardFormLP, tol: Tolerances = DEFAULT_TOLERANCES, opts: Optional[IpmOptions] = None
) -> DualFacialReduction:
    """Facially reduce the dual set and confirm that [A^T U] loses row rank.

    Args:
        lp (StandardFormLP): a validated LP
        tol (Tolerances): tolerances
        opts (IpmOptions, optional): interior-point options for the auxiliary LP

    Returns:
        DualFacialReduction: the kept slack columns, U and the redundancy verdict

    Raises:
        LemmaViolation: a certificate exists but the null combination or the rank drop fails
    """
    n = lp.n
    certificate = find_dual_exposing_vector(lp, tol, opts)
    if certificate is None:
        U = np.eye(n)
        rank = numerical_rank(np.hstack([lp.A.T, U]), tol)
        return DualFacialReduction(tuple(range(n)), U, False, None, rank)

    exposed = set(certificate.support)
    kept: Sequence[int] = [j for j in range(n) if j not in exposed]
    U = np.eye(n)[:, kept]
    w = certificate.w
    residual = float(np.linalg.norm(np.vstack([lp.A, U.T]) @ w))
    bound = tol.cert * (1.0 + float(np.linalg.norm(lp.A, 2))) * float(np.linalg.norm(w))
    rank = numerical_rank(np.hstack([lp.A.T, U]), tol)
    if residual > bound or rank >= n:
        raise LemmaViolation(
            f"Dual certificate does not make [A^T U] row rank deficient (residual {residual:.3e}, "
            f"rank {rank} of {n})."
        )
    return DualFacialReduction(tuple(int(j) for j in kept), U, True, certificate, rank)


def stacked_dual_rank(lp: StandardFormLP, dual_red: DualFacialReduction) -> int:
    """Numerical rank of the stacked matrix [A^T U].

    Args:
        lp (StandardFormLP): the LP
        dual_red (DualFacialReduction): its dual reduction

    Returns:
        int: the rank; below n exactly when a dual certificate exists
    """
    return numerical_rank(np.hstack([lp.A.T, dual_red.U]))
