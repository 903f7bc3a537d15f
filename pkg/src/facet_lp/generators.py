"""Seeded generators for LP instances with planted strict-feasibility certificates.

Every random draw comes from its own stream, derived from the instance seed with a fixed spawn key
per construction step, so an identical spec always yields a bit-identical instance. Draws that turn
out numerically degenerate are repeated with the next attempt's streams.
"""
from dataclasses import dataclass
from dataclasses import replace
from typing import Any
from typing import Dict
from typing import List
from typing import Optional
from typing import Tuple

import numpy as np

from facet_lp import DEFAULT_TOLERANCES
from facet_lp.errors import DegenerateDraw
from facet_lp.errors import InvariantViolation
from facet_lp.lp.bases import numerical_rank
from facet_lp.lp.data_structures import StandardFormLP
from facet_lp.reduction.certificates import null_basis
from facet_lp.tolerances import Tolerances


KINDS = ("primal_no_slater", "primal_slater", "dual_no_slater")
MAX_DRAWS = 10
OBJECTIVE_STREAM = 100
COUNTERPART_STREAM = 101


@dataclass(frozen=True)
class GeneratorSpec:
    """Size, planted dimension, seed and kind of a generated instance.

    For the primal kind, r is the number of strictly positive coordinates on the relative interior
    of the feasible set. For the dual kind, n - r is the size of the planted dual certificate
    support.
    """

    m: int
    n: int
    r: int
    seed: int
    kind: str = "primal_no_slater"

    def __post_init__(self) -> None:
        """Check the size relations and the kind."""
        if self.kind not in KINDS:
            raise ValueError(f"Unknown generator kind {self.kind!r}, expected one of {KINDS}.")
        if not 1 <= self.m < self.n:
            raise ValueError(f"Generator needs 1 <= m < n, got m={self.m}, n={self.n}.")
        if not 1 <= self.r <= self.n:
            raise ValueError(f"Generator needs 1 <= r <= n, got r={self.r}, n={self.n}.")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"Seed must be a 64-bit unsigned integer, got {self.seed}.")


@dataclass
class PlantedObjective:
    """Objective c = A^T y + s together with the dual point (y, s) it was built from."""

    c: np.ndarray
    y: np.ndarray
    s: np.ndarray


@dataclass
class PlantedInstance:
    """A generated LP with everything planted in it.

    Columns of the LP are a permutation of the construction order: column j of the LP is column
    `column_permutation[j]` of the unpermuted matrix. Planted certificates refer to the permuted LP.
    """

    lp: StandardFormLP
    spec: GeneratorSpec
    planted_feasible_point: np.ndarray
    column_permutation: Tuple[int, ...]
    planted_y: Optional[np.ndarray] = None
    planted_support: Optional[Tuple[int, ...]] = None
    planted_w: Optional[np.ndarray] = None
    objective: Optional[PlantedObjective] = None

    @property
    def planted_primal_certificate(self) -> Optional[Tuple[np.ndarray, Tuple[int, ...]]]:
        """The planted exposing multiplier y and the columns it exposes, if any."""
        if self.planted_y is None or self.planted_support is None:
            return None
        return self.planted_y, self.planted_support

    @property
    def planted_dual_certificate(self) -> Optional[np.ndarray]:
        """The planted dual exposing vector w, if any."""
        return self.planted_w

    @property
    def planted_dual_support(self) -> Tuple[int, ...]:
        """Indices where the planted w is positive."""
        if self.planted_w is None:
            return ()
        return tuple(int(j) for j in np.flatnonzero(self.planted_w > 0))

    def sidecar(self) -> Dict[str, Any]:
        """Plant metadata as plain JSON-compatible values."""

        def listed(v: Optional[np.ndarray]) -> Optional[List[float]]:
            return None if v is None else [float(value) for value in v]

        return {
            "kind": self.spec.kind,
            "m": self.spec.m,
            "n": self.spec.n,
            "r": self.spec.r,
            "seed": self.spec.seed,
            "permutation": list(self.column_permutation),
            "feasible_point": listed(self.planted_feasible_point),
            "y": listed(self.planted_y),
            "support": None if self.planted_support is None else list(self.planted_support),
            "w": listed(self.planted_w),
            "objective_y": listed(self.objective.y if self.objective else None),
            "objective_s": listed(self.objective.s if self.objective else None),
        }


def _rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def _check(condition: bool, message: str) -> None:
    if not condition:
        raise InvariantViolation(f"Planted instance failed its self-check: {message}")


def make_objective(lp: StandardFormLP, seed: int) -> PlantedObjective:
    """Objective c = A^T y + s with a random y and s drawn uniformly from [0.1, 1.1].

    The pair (y, s) is a strictly feasible dual point for the returned objective.

    Args:
        lp (StandardFormLP): the LP the objective is built for
        seed (int): seed of the objective streams

    Returns:
        PlantedObjective: c and the planted dual point
    """
    y = _rng(seed, OBJECTIVE_STREAM, 0).standard_normal(lp.m)
    s = _rng(seed, OBJECTIVE_STREAM, 1).uniform(0.1, 1.1, lp.n)
    return PlantedObjective(c=lp.A.T @ y + s, y=y, s=s)


def _slater_draw(spec: GeneratorSpec, attempt: int) -> Tuple[np.ndarray, np.ndarray]:
    A = _rng(spec.seed, attempt, 0).standard_normal((spec.m, spec.n))
    point = _rng(spec.seed, attempt, 1).uniform(0.5, 1.5, spec.n)
    return A, point


def _primal_draw(
    spec: GeneratorSpec, attempt: int, tol: Tolerances
) -> Optional[Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]]:
    m, n, r = spec.m, spec.n, spec.r

    # Step 1: y and the random combination A1 of an orthonormal basis of y's complement
    y = _rng(spec.seed, attempt, 0).standard_normal(m)
    Q = null_basis(y[None, :], tol)
    R = _rng(spec.seed, attempt, 1).standard_normal((m - 1, r))
    if Q.shape[1] != m - 1 or numerical_rank(R, tol) != min(m - 1, r):
        return None
    A1 = Q @ R

    # Step 2: b in the range of A1 through a positive v
    v = _rng(spec.seed, attempt, 2).uniform(0.5, 1.5, r)
    b = A1 @ v

    # Step 3: A2 with columns flipped to make A2^T y positive
    A2 = _rng(spec.seed, attempt, 3).standard_normal((m, n - r))
    t = A2.T @ y
    if np.any(np.abs(t) <= tol.cert * (1.0 + float(np.linalg.norm(A2, 2)))):
        return None
    A2 = A2 * np.sign(t)

    # Step 4: permute the columns of [A1 A2]
    permutation = _rng(spec.seed, attempt, 4).permutation(n)
    A = np.hstack([A1, A2])[:, permutation]
    if numerical_rank(A, tol) != m:
        return None
    point = np.concatenate([v, np.zeros(n - r)])[permutation]
    return A, b, y, point, permutation


def generate_primal_no_slater(
    spec: GeneratorSpec, tol: Tolerances = DEFAULT_TOLERANCES
) -> PlantedInstance:
    """Instance whose feasible set has exactly r positive coordinates on its relative interior.

    With r = n there is nothing to expose and the instance is a random strictly feasible one.

    Args:
        spec (GeneratorSpec): sizes and seed
        tol (Tolerances): tolerances for the degeneracy guards and self-checks

    Returns:
        PlantedInstance: the instance with its planted exposing multiplier and feasible point

    Raises:
        DegenerateDraw: ten consecutive draws were numerically degenerate
    """
    m, n, r = spec.m, spec.n, spec.r
    if r == n:
        for attempt in range(MAX_DRAWS):
            A, point = _slater_draw(spec, attempt)
            if numerical_rank(A, tol) == m:
                lp = StandardFormLP(A, A @ point)
                objective = make_objective(lp, spec.seed)
                return PlantedInstance(
                    lp=lp.with_objective(objective.c),
                    spec=spec,
                    planted_feasible_point=point,
                    column_permutation=tuple(range(n)),
                    objective=objective,
                )
        raise DegenerateDraw(f"No full row rank draw for {spec} in {MAX_DRAWS} attempts.")

    for attempt in range(MAX_DRAWS):
        drawn = _primal_draw(spec, attempt, tol)
        if drawn is not None:
            break
    else:
        raise DegenerateDraw(f"No nondegenerate draw for {spec} in {MAX_DRAWS} attempts.")
    A, b, y, point, permutation = drawn

    support = tuple(int(j) for j in np.flatnonzero(permutation >= r))
    z = A.T @ y
    kept = [j for j in range(n) if j not in set(support)]
    scale = tol.cert * (1.0 + float(np.linalg.norm(A, 2))) * float(np.linalg.norm(y))
    _check(float(np.max(np.abs(z[kept]), initial=0.0)) <= scale, "A1^T y is not zero")
    _check(abs(float(b @ y)) <= scale * (1.0 + float(np.linalg.norm(b))), "b^T y is not zero")
    _check(bool(np.all(z[list(support)] > 0)), "A2^T y is not positive")
    _check(int(np.sum(point > 0)) == r, "feasible point does not have r positives")

    lp = StandardFormLP(A, b)
    objective = make_objective(lp, spec.seed)
    return PlantedInstance(
        lp=lp.with_objective(objective.c),
        spec=spec,
        planted_feasible_point=point,
        column_permutation=tuple(int(j) for j in permutation),
        planted_y=y,
        planted_support=support,
        objective=objective,
    )


def to_slater_counterpart(
    inst: PlantedInstance, seed: int, point: Optional[np.ndarray] = None
) -> PlantedInstance:
    """Same A and c with b replaced by A x for a strictly positive x.

    Args:
        inst (PlantedInstance): a primal instance
        seed (int): seed of the stream that draws x uniformly from [0.5, 1.5]
        point (np.ndarray, optional): use this strictly positive x instead of drawing one

    Returns:
        PlantedInstance: the strictly feasible counterpart with x recorded as its feasible point
    """
    A = inst.lp.A
    if point is None:
        point = _rng(seed, COUNTERPART_STREAM).uniform(0.5, 1.5, inst.lp.n)
    _check(bool(np.all(point > 0)), "counterpart point is not strictly positive")
    return replace(
        inst,
        lp=inst.lp.with_rhs(A @ point),
        spec=replace(inst.spec, kind="primal_slater"),
        planted_feasible_point=np.asarray(point, dtype=float),
        planted_y=None,
        planted_support=None,
    )


def _dual_draw(
    spec: GeneratorSpec, attempt: int, tol: Tolerances
) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    m, n, r = spec.m, spec.n, spec.r

    # Step 1: w >= 0 with n - r positives and rows of A orthogonal to it
    support = np.sort(_rng(spec.seed, attempt, 0).choice(n, size=n - r, replace=False))
    w = np.zeros(n)
    w[support] = _rng(spec.seed, attempt, 1).uniform(0.5, 1.5, n - r)
    Q = null_basis(w[None, :], tol)
    G = _rng(spec.seed, attempt, 2).standard_normal((m, n - 1))
    A = G @ Q.T
    if Q.shape[1] != n - 1 or numerical_rank(A, tol) != m:
        return None
    return A, w


def generate_dual_no_slater(
    spec: GeneratorSpec, tol: Tolerances = DEFAULT_TOLERANCES
) -> PlantedInstance:
    """Instance whose dual feasible set has no strictly feasible point.

    The planted w has n - r positives; every dual slack vanishes on its support. With r = n the
    construction plants nothing and the dual is strictly feasible.

    Args:
        spec (GeneratorSpec): sizes and seed
        tol (Tolerances): tolerances for the degeneracy guards and self-checks

    Returns:
        PlantedInstance: the instance with its planted dual certificate and primal feasible point

    Raises:
        DegenerateDraw: ten consecutive draws were numerically degenerate
    """
    m, n, r = spec.m, spec.n, spec.r
    for attempt in range(MAX_DRAWS):
        if r == n:
            A, _ = _slater_draw(spec, attempt)
            drawn = (A, np.zeros(n)) if numerical_rank(A, tol) == m else None
        else:
            drawn = _dual_draw(spec, attempt, tol)
        if drawn is not None:
            break
    else:
        raise DegenerateDraw(f"No nondegenerate draw for {spec} in {MAX_DRAWS} attempts.")
    A, w = drawn

    # Step 2: slacks vanish on the support of w
    s = _rng(spec.seed, MAX_DRAWS, 0).uniform(0.1, 1.1, n)
    s[w > 0] = 0.0

    # Step 3: objective from a random y; b from a strictly positive x
    y = _rng(spec.seed, MAX_DRAWS, 1).standard_normal(m)
    c = A.T @ y + s
    point = _rng(spec.seed, MAX_DRAWS, 2).uniform(0.5, 1.5, n)
    b = A @ point

    scale = tol.cert * (1.0 + float(np.linalg.norm(A, 2))) * float(np.linalg.norm(w))
    _check(float(np.linalg.norm(A @ w)) <= scale, "Aw is not zero")
    _check(abs(float(c @ w)) <= scale * (1.0 + float(np.linalg.norm(c))), "c^T w is not zero")
    _check(float(w @ s) == 0.0, "w^T s is not zero")

    return PlantedInstance(
        lp=StandardFormLP(A, b, c),
        spec=spec,
        planted_feasible_point=point,
        column_permutation=tuple(range(n)),
        planted_w=w if r < n else None,
        objective=PlantedObjective(c=c, y=y, s=s),
    )


def generate(spec: GeneratorSpec, tol: Tolerances = DEFAULT_TOLERANCES) -> PlantedInstance:
    """Generate an instance of the kind named in the spec.

    Args:
        spec (GeneratorSpec): sizes, seed and kind
        tol (Tolerances): tolerances

    Returns:
        PlantedInstance: the generated instance
    """
    if spec.kind == "dual_no_slater":
        return generate_dual_no_slater(spec, tol)
    base = generate_primal_no_slater(replace(spec, kind="primal_no_slater"), tol)
    if spec.kind == "primal_slater":
        return to_slater_counterpart(base, spec.seed)
    return base
