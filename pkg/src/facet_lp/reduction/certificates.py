"""Exposing vectors for the primal set F = {x >= 0 : Ax = b} and the dual set
G = {(y, s) : A^T y + s = c, s >= 0}.

Both searches look for a nonnegative vector of maximal support inside a linear subspace L given by
orthonormal rows N spanning its orthogonal complement. For the primal side L is {A^T y : b^T y = 0},
for the dual side L is {w : Aw = 0, c^T w = 0}. The auxiliary LP

    max sum(s)  s.t.  N z = 0,  s <= z,  s <= 1,  z <= CAP,  z, s >= 0

is solved with the interior-point method. Its optimum rewards every coordinate that some vector of
the cone can make positive, and the interior-point limit lies in the relative interior of the
optimal face, so the support read off z is maximal. The support is then used to polish the vector
onto the exact subspace and to normalize it so that its largest entry is one.
"""
from dataclasses import dataclass
from typing import Optional
from typing import Tuple

import numpy as np
from scipy.linalg import lstsq
from scipy.linalg import svd

from facet_lp import DEFAULT_TOLERANCES
from facet_lp.errors import AuxiliarySolveFailed
from facet_lp.errors import NumericalBreakdown
from facet_lp.lp.data_structures import StandardFormLP
from facet_lp.solvers.ipm import IpmOptions
from facet_lp.solvers.ipm import solve_ipm
from facet_lp.tolerances import Tolerances


SUPPORT_CAP = 100.0
# The cone is closed under scaling, so the auxiliary optimum is either 0 or at least 1.
EMPTY_CONE_BOUND = 0.5


@dataclass
class ExposingCertificate:
    """An exposing vector z = A^T y >= 0 with b^T y = 0 and the coordinates it fixes to zero."""

    y: np.ndarray
    z: np.ndarray
    support: Tuple[int, ...]
    tolerance_used: float

    def is_valid(self, A: np.ndarray, b: np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
        """Check the defining identities of the certificate at tolerance.

        Args:
            A (np.ndarray): constraint matrix the certificate refers to
            b (np.ndarray): right-hand side
            tol (Tolerances): tolerances

        Returns:
            bool: whether z = A^T y, z >= 0, b^T y = 0 and z is nontrivial relative to ||A|| ||y||
        """
        z = A.T @ self.y
        y_norm = float(np.linalg.norm(self.y))
        a_norm = float(np.linalg.norm(A, 2)) if A.size else 0.0
        scale = tol.cert * (1.0 + float(np.linalg.norm(b))) * y_norm
        return bool(
            np.allclose(z, self.z, atol=tol.cert)
            and np.all(z >= -tol.zero_for(z))
            and float(np.max(z, initial=0.0)) > tol.cert * max(1.0, a_norm * y_norm)
            and abs(float(b @ self.y)) <= scale
            and len(self.support) > 0
        )


@dataclass
class DualExposingCertificate:
    """A vector w >= 0 with Aw = 0 and c^T w = 0 whose positive entries fix dual slacks at zero."""

    w: np.ndarray
    support: Tuple[int, ...]
    tolerance_used: float

    def is_valid(self, A: np.ndarray, c: np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
        """Check the defining identities of the certificate at tolerance.

        Args:
            A (np.ndarray): constraint matrix
            c (np.ndarray): objective vector
            tol (Tolerances): tolerances

        Returns:
            bool: whether w >= 0, Aw = 0, c^T w = 0 and w is nontrivial
        """
        w_norm = float(np.linalg.norm(self.w))
        a_norm = float(np.linalg.norm(A, 2)) if A.size else 0.0
        return bool(
            np.all(self.w >= -tol.zero_for(self.w))
            and float(np.linalg.norm(A @ self.w)) <= tol.cert * (1.0 + a_norm) * w_norm
            and abs(float(c @ self.w)) <= tol.cert * (1.0 + float(np.linalg.norm(c))) * w_norm
            and float(np.max(self.w, initial=0.0)) > tol.cert
        )


def range_basis(
    M: np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES, cutoff: Optional[float] = None
) -> np.ndarray:
    """Orthonormal basis of the column space of M, rank decided at tau_rank.

    Args:
        M (np.ndarray): dense matrix
        tol (Tolerances): tolerances
        cutoff (float, optional): absolute singular value cutoff replacing tau_rank of M, for
            products whose scale is set by their factors

    Returns:
        np.ndarray: matrix with orthonormal columns spanning range(M)
    """
    if M.size == 0:
        return np.zeros((M.shape[0], 0))
    U, sigma, _ = svd(M, full_matrices=False)
    rank = int(np.sum(sigma > (tol.rank_for(M) if cutoff is None else cutoff)))
    return U[:, :rank]


def null_basis(
    M: np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES, cutoff: Optional[float] = None
) -> np.ndarray:
    """Orthonormal basis of the null space of M, rank decided at tau_rank.

    Args:
        M (np.ndarray): dense matrix
        tol (Tolerances): tolerances
        cutoff (float, optional): absolute singular value cutoff replacing tau_rank of M

    Returns:
        np.ndarray: matrix with orthonormal columns spanning null(M)
    """
    cols = M.shape[1]
    if M.size == 0:
        return np.eye(cols)
    _, sigma, Vt = svd(M, full_matrices=True)
    rank = int(np.sum(sigma > (tol.rank_for(M) if cutoff is None else cutoff)))
    return Vt[rank:].T.copy()


def max_support_lp(N: np.ndarray) -> StandardFormLP:
    """Auxiliary LP whose optimal z is a nonnegative vector of maximal support with N z = 0.

    Variables are stacked as (z, s, g, u, h) with slacks g = z - s, u = 1 - s, h = CAP - z.

    Args:
        N (np.ndarray): k x n matrix whose null space is the search subspace

    Returns:
        StandardFormLP: the auxiliary LP in standard form
    """
    k, n = N.shape
    eye, zero = np.eye(n), np.zeros((n, n))
    A = np.vstack(
        [
            np.hstack([N, np.zeros((k, 4 * n))]),
            np.hstack([eye, -eye, -eye, zero, zero]),
            np.hstack([zero, eye, zero, eye, zero]),
            np.hstack([eye, zero, zero, zero, eye]),
        ]
    )
    b = np.concatenate([np.zeros(k), np.zeros(n), np.ones(n), np.full(n, SUPPORT_CAP)])
    c = np.concatenate([np.zeros(n), -np.ones(n), np.zeros(3 * n)])
    return StandardFormLP(A, b, c, full_row_rank_checked=True)


def solve_max_support(
    N: np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES, opts: Optional[IpmOptions] = None
) -> Optional[np.ndarray]:
    """Find a nonnegative z of maximal support in null(N), or None when only z = 0 exists.

    Args:
        N (np.ndarray): k x n matrix with orthonormal rows
        tol (Tolerances): tolerances
        opts (IpmOptions, optional): interior-point options

    Returns:
        Optional[np.ndarray]: the raw z of the auxiliary optimum, None for an optimal value
        below EMPTY_CONE_BOUND

    Raises:
        AuxiliarySolveFailed: the interior-point method broke down or did not converge
    """
    n = N.shape[1]
    try:
        result = solve_ipm(max_support_lp(N), opts)
    except NumericalBreakdown as err:
        raise AuxiliarySolveFailed(f"Auxiliary max-support LP broke down: {err}") from err
    if not result.converged:
        raise AuxiliarySolveFailed(
            f"Auxiliary max-support LP ended with status {result.status!r} after "
            f"{result.iterations} iterations, KKT residuals {result.kkt}."
        )
    if -result.objective < max(EMPTY_CONE_BOUND, tol.cert):
        return None
    return np.asarray(result.x_star[:n])


def _support(v: np.ndarray, threshold: float) -> Tuple[int, ...]:
    return tuple(int(i) for i in np.flatnonzero(v > threshold))


def exposing_vector(
    A: np.ndarray,
    b: np.ndarray,
    tol: Tolerances = DEFAULT_TOLERANCES,
    opts: Optional[IpmOptions] = None,
) -> Optional[ExposingCertificate]:
    """Maximal-support exposing vector of {x >= 0 : Ax = b} on raw arrays.

    Args:
        A (np.ndarray): constraint matrix
        b (np.ndarray): right-hand side
        tol (Tolerances): tolerances
        opts (IpmOptions, optional): interior-point options for the auxiliary LP

    Returns:
        Optional[ExposingCertificate]: the certificate, None when strict feasibility holds

    Raises:
        AuxiliarySolveFailed: the auxiliary solve, the polishing step or the final check failed
    """
    n = A.shape[1]
    if n == 0:
        return None
    Y = null_basis(b[None, :], tol)
    # Y is orthonormal: singular values of A^T Y below tau_cert * ||A|| are rounding noise.
    cutoff = tol.cert * float(np.linalg.norm(A, 2))
    span = range_basis(A.T @ Y, tol, cutoff) if Y.shape[1] else np.zeros((n, 0))
    if span.shape[1] == 0:
        return None
    z_raw = solve_max_support(null_basis(span.T, tol).T, tol, opts)
    if z_raw is None:
        return None

    exposed = np.asarray(z_raw > tol.support * float(np.max(z_raw)))
    Q = null_basis(np.column_stack([b, A[:, ~exposed]]).T, tol)
    if Q.shape[1] == 0:
        raise AuxiliarySolveFailed("No multiplier vanishes on the unexposed columns.")
    y = Q @ lstsq(A[:, exposed].T @ Q, z_raw[exposed])[0]
    z = A.T @ y
    peak = float(np.max(z))
    if peak <= tol.cert:
        raise AuxiliarySolveFailed("Polished exposing vector vanished.")
    y, z = y / peak, z / peak
    if np.any(z < -tol.zero_for(z)):
        raise AuxiliarySolveFailed("Polished exposing vector has negative entries.")
    cert = ExposingCertificate(y, z, _support(z, tol.support), tol.support)
    if not cert.is_valid(A, b, tol):
        raise AuxiliarySolveFailed(
            f"Exposing vector with multiplier norm {np.linalg.norm(y):.3g} failed its check."
        )
    return cert


def dual_exposing_vector(
    A: np.ndarray,
    c: np.ndarray,
    tol: Tolerances = DEFAULT_TOLERANCES,
    opts: Optional[IpmOptions] = None,
) -> Optional[DualExposingCertificate]:
    """Maximal-support w >= 0 with Aw = 0 and c^T w = 0 on raw arrays.

    Args:
        A (np.ndarray): constraint matrix
        c (np.ndarray): objective vector
        tol (Tolerances): tolerances
        opts (IpmOptions, optional): interior-point options for the auxiliary LP

    Returns:
        Optional[DualExposingCertificate]: the certificate, None when dual strict feasibility holds

    Raises:
        AuxiliarySolveFailed: the auxiliary solve, the polishing step or the final check failed
    """
    stacked = np.vstack([A, c[None, :]])
    rows = range_basis(stacked.T, tol).T
    if rows.shape[0] == A.shape[1]:
        return None
    w_raw = solve_max_support(rows, tol, opts)
    if w_raw is None:
        return None

    exposed = np.asarray(w_raw > tol.support * float(np.max(w_raw)))
    Q = null_basis(stacked[:, exposed], tol)
    if Q.shape[1] == 0:
        raise AuxiliarySolveFailed("No combination of the exposed columns vanishes.")
    w = np.zeros(A.shape[1])
    w[exposed] = Q @ lstsq(Q, w_raw[exposed])[0]
    peak = float(np.max(w))
    if peak <= tol.cert:
        raise AuxiliarySolveFailed("Polished dual exposing vector vanished.")
    w = w / peak
    if np.any(w < -tol.zero_for(w)):
        raise AuxiliarySolveFailed("Polished dual exposing vector has negative entries.")
    cert = DualExposingCertificate(w, _support(w, tol.support), tol.support)
    if not cert.is_valid(A, c, tol):
        raise AuxiliarySolveFailed("Dual exposing vector failed its check.")
    return cert
