"""Dense revised simplex method with degenerate-pivot accounting.

The basis matrix is refactorized by LU at every pivot, which keeps the implementation short and is
cheap at desk scale. A pivot is degenerate when the step length of the entering variable is zero at
tolerance, i.e. the objective does not change. Phase I uses artificial variables on the rows that
have no unit column; artificials left in the basis at zero level are pivoted out, and rows where
that is impossible are dropped as redundant.

The dual variant runs the same primal simplex on the dual problem max { b^T y : A^T y <= c } in
standard form [A^T, -A^T, I] (y = y+ - y-) and reads the primal solution off its multipliers.
"""
from dataclasses import dataclass
from typing import FrozenSet
from typing import List
from typing import Optional
from typing import Set
from typing import Tuple

import numpy as np
from scipy.linalg import lu_factor
from scipy.linalg import lu_solve

from facet_lp import DEFAULT_TOLERANCES
from facet_lp.errors import InvariantViolation
from facet_lp.lp.data_structures import Basis
from facet_lp.lp.data_structures import StandardFormLP
from facet_lp.tolerances import Tolerances


RULES = ("bland", "dantzig")
VARIANTS = ("primal", "dual")
PIVOT_TOLERANCE = 1e-9


@dataclass
class SimplexResult:
    """Outcome of a simplex run.

    Status is one of 'optimal', 'unbounded', 'infeasible' or 'iteration_limit'. Pivot counts include
    Phase I pivots and the pivots that drive artificials out of the basis.
    """

    status: str
    objective: float
    total_pivots: int
    degenerate_pivots: int
    optimal_basis: Optional[Basis] = None
    x: Optional[np.ndarray] = None

    @property
    def degiter_percent(self) -> float:
        """Percentage of degenerate pivots, 100 * degenerate / max(1, total)."""
        return 100.0 * self.degenerate_pivots / max(1, self.total_pivots)


class RevisedSimplex:
    """Revised simplex iterations on a standard-form system with an explicit basis list."""

    def __init__(
        self,
        A: np.ndarray,
        b: np.ndarray,
        rule: str,
        tol: Tolerances,
        max_iterations: int,
        debug: bool = False,
    ) -> None:
        """Prepare a run on Ax = b, x >= 0 with a sign-normalized right-hand side.

        Args:
            A (np.ndarray): constraint matrix
            b (np.ndarray): right-hand side
            rule (str): pricing rule, 'bland' or 'dantzig'
            tol (Tolerances): tolerances for zero and optimality tests
            max_iterations (int): pivot cap shared by both phases
            debug (bool): track visited bases and objective monotonicity
        """
        self.signs = np.where(b < 0, -1.0, 1.0)
        self.A = A * self.signs[:, None]
        self.b = b * self.signs
        self.rows = np.arange(A.shape[0])
        self.rule = rule
        self.tol = tol
        self.max_iterations = max_iterations
        self.debug = debug
        self.basis: List[int] = []
        self.pivots = 0
        self.degenerate = 0

    def crash_basis(self) -> int:
        """Start from unit columns where possible and append artificials for the other rows.

        Returns:
            int: number of artificial columns appended
        """
        m, n = self.A.shape
        chosen: List[Optional[int]] = [None] * m
        for j in range(n):
            column = self.A[:, j]
            nonzero = np.flatnonzero(column)
            if len(nonzero) == 1 and column[nonzero[0]] == 1.0 and chosen[nonzero[0]] is None:
                chosen[nonzero[0]] = j
        missing = [i for i in range(m) if chosen[i] is None]
        artificials = np.zeros((m, len(missing)))
        for k, i in enumerate(missing):
            artificials[i, k] = 1.0
            chosen[i] = n + k
        self.A = np.hstack([self.A, artificials])
        self.basis = [int(j) for j in chosen]  # type: ignore[arg-type]
        return len(missing)

    def factor(self) -> Tuple[object, np.ndarray]:
        """LU factors of the current basis matrix and the basic solution."""
        lu = lu_factor(self.A[:, self.basis])
        return lu, lu_solve(lu, self.b)

    def _entering(self, reduced: np.ndarray, threshold: float) -> Optional[int]:
        candidates = np.flatnonzero(reduced < -threshold)
        if candidates.size == 0:
            return None
        if self.rule == "bland":
            return int(candidates[0])
        return int(candidates[np.argmin(reduced[candidates])])

    def _leaving(self, x_basic: np.ndarray, direction: np.ndarray) -> Optional[int]:
        limit = PIVOT_TOLERANCE * max(1.0, float(np.max(np.abs(direction))))
        rows = np.flatnonzero(direction > limit)
        if rows.size == 0:
            return None
        ratios = np.maximum(x_basic[rows], 0.0) / direction[rows]
        best = float(np.min(ratios))
        ties = rows[ratios <= best + 1e-12 * max(1.0, best)]
        return int(min(ties, key=lambda row: self.basis[row]))

    def iterate(self, cost: np.ndarray, allowed: np.ndarray) -> str:
        """Pivot until optimality, unboundedness or the iteration cap.

        Args:
            cost (np.ndarray): objective over the current columns
            allowed (np.ndarray): mask of columns allowed to enter

        Returns:
            str: 'optimal', 'unbounded' or 'iteration_limit'
        """
        visited: Set[FrozenSet[int]] = set()
        threshold = self.tol.zero * (1.0 + float(np.max(np.abs(cost), initial=0.0)))
        previous = float("inf")
        while True:
            lu, x_basic = self.factor()
            if self.debug:
                previous = self._check_progress(visited, cost, x_basic, previous)
            if self.pivots >= self.max_iterations:
                return "iteration_limit"
            multipliers = lu_solve(lu, cost[self.basis], trans=1)
            reduced = cost - self.A.T @ multipliers
            reduced[self.basis] = 0.0
            reduced[~allowed] = 0.0
            entering = self._entering(reduced, threshold)
            if entering is None:
                return "optimal"
            direction = lu_solve(lu, self.A[:, entering])
            row = self._leaving(x_basic, direction)
            if row is None:
                return "unbounded"
            step = max(float(x_basic[row]), 0.0) / float(direction[row])
            self.pivots += 1
            if step <= self.tol.zero_for(x_basic):
                self.degenerate += 1
            self.basis[row] = entering

    def _check_progress(
        self, visited: Set[FrozenSet[int]], cost: np.ndarray, x_basic: np.ndarray, previous: float
    ) -> float:
        key = frozenset(self.basis)
        if key in visited and self.rule == "bland":
            raise InvariantViolation(f"Basis {sorted(key)} repeated under Bland's rule.")
        visited.add(key)
        value = float(cost[self.basis] @ x_basic)
        if value > previous + self.tol.feas * (1.0 + abs(previous)):
            raise InvariantViolation(f"Objective increased from {previous} to {value}.")
        return value

    def drive_out_artificials(self, n: int) -> None:
        """Pivot zero-level artificials out of the basis, dropping rows where no pivot exists.

        Args:
            n (int): number of original (non-artificial) columns
        """
        position = 0
        while position < len(self.basis):
            if self.basis[position] < n:
                position += 1
                continue
            lu, _ = self.factor()
            unit = np.zeros(len(self.basis))
            unit[position] = 1.0
            row = lu_solve(lu, unit, trans=1) @ self.A[:, :n]
            row[[j for j in self.basis if j < n]] = 0.0
            candidates = np.flatnonzero(np.abs(row) > PIVOT_TOLERANCE)
            if candidates.size:
                self.basis[position] = int(candidates[0])
                self.pivots += 1
                self.degenerate += 1
                position += 1
            else:
                keep = np.arange(len(self.basis)) != position
                self.A, self.b, self.rows = self.A[keep], self.b[keep], self.rows[keep]
                self.signs = self.signs[keep]
                del self.basis[position]

    def multipliers(self, cost: np.ndarray, m: int) -> np.ndarray:
        """Simplex multipliers of the final basis in the original row order and signs.

        Args:
            cost (np.ndarray): objective over the original columns
            m (int): original number of rows

        Returns:
            np.ndarray: multipliers, zero on dropped rows
        """
        lu, _ = self.factor()
        values = lu_solve(lu, cost[self.basis], trans=1) * self.signs
        full = np.zeros(m)
        full[self.rows] = values
        return full


def _run_standard_form(
    A: np.ndarray,
    b: np.ndarray,
    cost: np.ndarray,
    rule: str,
    tol: Tolerances,
    max_iterations: int,
    debug: bool,
) -> Tuple[str, RevisedSimplex]:
    m, n = A.shape
    simplex = RevisedSimplex(A, b, rule, tol, max_iterations, debug)
    artificial_count = simplex.crash_basis()
    if artificial_count:
        phase_one = np.concatenate([np.zeros(n), np.ones(artificial_count)])
        status = simplex.iterate(phase_one, np.ones(n + artificial_count, dtype=bool))
        if status == "iteration_limit":
            return status, simplex
        _, x_basic = simplex.factor()
        if float(phase_one[simplex.basis] @ x_basic) > tol.feas_for(b):
            return "infeasible", simplex
        simplex.drive_out_artificials(n)
        simplex.A = simplex.A[:, :n]
    status = simplex.iterate(cost, np.ones(n, dtype=bool))
    return status, simplex


def _primal(lp: StandardFormLP, rule: str, tol: Tolerances, cap: int, debug: bool) -> SimplexResult:
    c = lp.objective
    status, simplex = _run_standard_form(lp.A, lp.b, c, rule, tol, cap, debug)
    if status != "optimal":
        return SimplexResult(status, float("nan"), simplex.pivots, simplex.degenerate)
    _, x_basic = simplex.factor()
    x = np.zeros(lp.n)
    x[simplex.basis] = np.maximum(x_basic, 0.0)
    basis = Basis(sorted(simplex.basis)) if len(simplex.basis) == lp.m else None
    return SimplexResult(status, float(c @ x), simplex.pivots, simplex.degenerate, basis, x)


def _dual(lp: StandardFormLP, rule: str, tol: Tolerances, cap: int, debug: bool) -> SimplexResult:
    m, n = lp.m, lp.n
    D = np.hstack([lp.A.T, -lp.A.T, np.eye(n)])
    cost = np.concatenate([-lp.b, lp.b, np.zeros(n)])
    status, simplex = _run_standard_form(D, lp.objective, cost, rule, tol, cap, debug)
    if status != "optimal":
        mapped = {"unbounded": "infeasible", "infeasible": "unbounded"}.get(status, status)
        return SimplexResult(mapped, float("nan"), simplex.pivots, simplex.degenerate)
    x = np.maximum(-simplex.multipliers(cost, n), 0.0)
    nonbasic_slacks = sorted(set(range(n)) - {j - 2 * m for j in simplex.basis if j >= 2 * m})
    basis = Basis(nonbasic_slacks) if len(nonbasic_slacks) == m else None
    return SimplexResult(
        status, float(lp.objective @ x), simplex.pivots, simplex.degenerate, basis, x
    )


def solve_simplex(
    lp: StandardFormLP,
    rule: str = "bland",
    variant: str = "primal",
    tol: Tolerances = DEFAULT_TOLERANCES,
    max_iterations: Optional[int] = None,
    debug: bool = False,
) -> SimplexResult:
    """Solve min c^T x s.t. Ax = b, x >= 0 with the revised simplex method.

    Args:
        lp (StandardFormLP): the LP
        rule (str): 'bland' (smallest index, terminates) or 'dantzig' (most negative reduced cost)
        variant (str): 'primal', or 'dual' to run the primal simplex on the dual problem
        tol (Tolerances): tolerances
        max_iterations (int, optional): pivot cap, defaults to 10^4 * n
        debug (bool): raise InvariantViolation on a repeated Bland basis or an objective increase

    Returns:
        SimplexResult: status, objective, pivot counts and the optimal basis and point

    Raises:
        ValueError: unknown rule or variant
    """
    if rule not in RULES or variant not in VARIANTS:
        raise ValueError(f"Unknown simplex configuration rule={rule!r}, variant={variant!r}.")
    cap = max_iterations if max_iterations is not None else 10**4 * lp.n
    if variant == "dual":
        return _dual(lp, rule, tol, cap, debug)
    return _primal(lp, rule, tol, cap, debug)
