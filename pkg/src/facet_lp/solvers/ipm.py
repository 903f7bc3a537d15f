"""Dense infeasible-start primal-dual interior-point method.

Every iteration solves the normal equation A D A^T dy = r with D = Diag(x) Diag(s)^-1 by a Cholesky
factorization. When the factorization fails a diagonal shift delta*I is added and escalated tenfold
until it succeeds or the shift limit is reached. Steps follow Mehrotra's predictor-corrector scheme.
"""
from dataclasses import dataclass
from typing import Any
from typing import Optional
from typing import Tuple

import numpy as np
from scipy.linalg import LinAlgError
from scipy.linalg import cho_factor
from scipy.linalg import cho_solve
from scipy.linalg import lstsq

from facet_lp.errors import NumericalBreakdown
from facet_lp.lp.data_structures import StandardFormLP
from facet_lp.solvers.kkt import KKTTriple
from facet_lp.solvers.kkt import kkt_residuals
from facet_lp.solvers.kkt import normal_matrix_condition


@dataclass(frozen=True)
class IpmOptions:
    """Stopping rule, step fraction and regularization schedule of the interior-point method."""

    tol: float = 1e-8
    max_iterations: int = 200
    step_fraction: float = 0.99
    reg_start: float = 1e-12
    reg_growth: float = 10.0
    reg_limit: float = 1e-2
    divergence: float = 1e14
    stall_steps: int = 5


@dataclass
class IpmResult:
    """Last interior iterate of a run with its KKT residuals and normal-matrix condition number.

    Status is one of 'optimal', 'iteration_limit', 'diverged' or 'stalled'. Only 'optimal' runs are
    converged.
    """

    x_star: np.ndarray
    y_star: np.ndarray
    s_star: np.ndarray
    iterations: int
    kkt: KKTTriple
    normal_condition: float
    converged: bool
    status: str
    objective: float = float("nan")
    regularization: float = 0.0


def _max_step(v: np.ndarray, dv: np.ndarray) -> float:
    negative = dv < 0
    if not np.any(negative):
        return float("inf")
    return float(np.min(-v[negative] / dv[negative]))


def _positive_floor(v: np.ndarray) -> np.ndarray:
    floor = 1e-2 * max(1.0, float(np.max(v)))
    return np.maximum(v, floor)


def _starting_point(
    A: np.ndarray, b: np.ndarray, c: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Mehrotra's least-squares starting point shifted into the positive orthant."""
    x_ls = lstsq(A, b)[0]
    y = lstsq(A.T, c)[0]
    s_ls = c - A.T @ y
    x_hat = x_ls + max(-1.5 * float(np.min(x_ls)), 0.0)
    s_hat = s_ls + max(-1.5 * float(np.min(s_ls)), 0.0)
    product = float(x_hat @ s_hat)
    if product > 0:
        x_shift = 0.5 * product / float(np.sum(s_hat))
        s_shift = 0.5 * product / float(np.sum(x_hat))
        x_hat, s_hat = x_hat + x_shift, s_hat + s_shift
    return _positive_floor(x_hat), y, _positive_floor(s_hat)


def _factorize(normal: np.ndarray, opts: IpmOptions) -> Tuple[Any, float]:
    """Cholesky factor of the normal matrix, adding an escalating diagonal shift on failure.

    Raises:
        LinAlgError: the shift limit was reached without a successful factorization
    """
    try:
        return cho_factor(normal), 0.0
    except (LinAlgError, ValueError):
        pass
    scale = max(1.0, float(np.max(np.abs(np.diag(normal)))))
    delta = opts.reg_start * scale
    identity = np.eye(normal.shape[0])
    while delta <= opts.reg_limit * scale:
        try:
            return cho_factor(normal + delta * identity), delta
        except (LinAlgError, ValueError):
            delta *= opts.reg_growth
    raise LinAlgError(f"Normal matrix not factorizable with shifts up to {opts.reg_limit * scale}.")


def _newton_direction(
    A: np.ndarray,
    factor: Any,
    x: np.ndarray,
    s: np.ndarray,
    rp: np.ndarray,
    rd: np.ndarray,
    rc: np.ndarray,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Solve A dx = rp, A^T dy + ds = rd, S dx + X ds = rc through the normal equation."""
    d = x / s
    dy = cho_solve(factor, rp - A @ (rc / s) + A @ (d * rd))
    ds = rd - A.T @ dy
    dx = (rc - x * ds) / s
    return dx, dy, ds


def _result(
    lp: StandardFormLP,
    iterate: Tuple[np.ndarray, np.ndarray, np.ndarray],
    iterations: int,
    status: str,
    regularization: float,
) -> IpmResult:
    x, y, s = iterate
    try:
        condition = normal_matrix_condition(lp.A, x, s)
    except (LinAlgError, ValueError):
        condition = float("inf")
    return IpmResult(
        x_star=x,
        y_star=y,
        s_star=s,
        iterations=iterations,
        kkt=kkt_residuals(lp, x, y, s),
        normal_condition=condition,
        converged=status == "optimal",
        status=status,
        objective=float(lp.objective @ x),
        regularization=regularization,
    )


def solve_ipm(lp: StandardFormLP, opts: Optional[IpmOptions] = None) -> IpmResult:
    """Solve min c^T x s.t. Ax = b, x >= 0 with a predictor-corrector interior-point method.

    The run stops when the largest KKT residual falls below `opts.tol`, at the iteration cap, when
    the iterates diverge, or when both step lengths stay negligible for `opts.stall_steps` steps.

    Args:
        lp (StandardFormLP): the LP; A must have full row rank
        opts (IpmOptions, optional): solver options

    Returns:
        IpmResult: the last interior iterate and its diagnostics

    Raises:
        NumericalBreakdown: the normal equation could not be factorized at any allowed shift; the
            last iterate is attached as `err.result`
    """
    opts = opts or IpmOptions()
    A, b, c = lp.A, lp.b, lp.objective
    n = lp.n
    x, y, s = _starting_point(A, b, c)
    delta = 0.0
    short_steps = 0
    iteration = 0
    status = "iteration_limit"
    while True:
        if max(kkt_residuals(lp, x, y, s)) <= opts.tol:
            status = "optimal"
            break
        if iteration >= opts.max_iterations:
            break
        iterate = np.concatenate((x, y, s))
        if not np.all(np.isfinite(iterate)) or np.max(np.abs(iterate)) > opts.divergence:
            status = "diverged"
            break
        if short_steps >= opts.stall_steps:
            status = "stalled"
            break

        try:
            factor, delta = _factorize((A * (x / s)) @ A.T, opts)
        except LinAlgError as err:
            last = _result(lp, (x, y, s), iteration, "breakdown", delta)
            raise NumericalBreakdown(str(err), last) from err

        rp = b - A @ x
        rd = c - A.T @ y - s
        mu = float(x @ s) / n

        dx, dy, ds = _newton_direction(A, factor, x, s, rp, rd, -x * s)
        alpha_p = min(1.0, _max_step(x, dx))
        alpha_d = min(1.0, _max_step(s, ds))
        mu_aff = float((x + alpha_p * dx) @ (s + alpha_d * ds)) / n
        sigma = (mu_aff / mu) ** 3

        rc = -x * s - dx * ds + sigma * mu
        dx, dy, ds = _newton_direction(A, factor, x, s, rp, rd, rc)
        alpha_p = min(1.0, opts.step_fraction * _max_step(x, dx))
        alpha_d = min(1.0, opts.step_fraction * _max_step(s, ds))

        x = x + alpha_p * dx
        y = y + alpha_d * dy
        s = s + alpha_d * ds
        iteration += 1
        short_steps = short_steps + 1 if max(alpha_p, alpha_d) < 1e-10 else 0

    return _result(lp, (x, y, s), iteration, status, delta)
