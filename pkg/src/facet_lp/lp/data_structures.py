"""Dataclasses for standard-form LP data, bases and enumerated basic feasible solutions.

A standard-form LP is the triple (A, b, c) describing min { c^T x : Ax = b, x >= 0 }. The arrays
are copied on construction and marked read-only so that instances can be shared freely. Indices
are zero-based throughout the package; only the command-line client shows them one-based.

Slots are used for the small record types that are created in bulk during enumeration.
"""
import hashlib
from dataclasses import dataclass
from dataclasses import field
from dataclasses import replace
from typing import List
from typing import Optional
from typing import Sequence
from typing import Tuple

import numpy as np
import pandas as pd


def _frozen_array(values: Sequence[float], ndim: int) -> np.ndarray:
    array = np.array(values, dtype=float, copy=True)
    if array.ndim == 0 and ndim == 1:
        array = array.reshape(1)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class StandardFormLP:
    """Data of the linear program min { c^T x : Ax = b, x >= 0 }.

    The objective defaults to zeros, which turns the LP into the feasibility system itself. The
    flag `full_row_rank_checked` is only set by `facet_lp.lp.bases.validate`.
    """

    A: np.ndarray
    b: np.ndarray
    c: Optional[np.ndarray] = None
    names: Optional[Tuple[str, ...]] = None
    full_row_rank_checked: bool = False

    def __post_init__(self) -> None:
        """Copy the arrays into read-only float arrays."""
        A = _frozen_array(self.A, 2)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", _frozen_array(self.b, 1))
        if self.c is None:
            n = A.shape[1] if A.ndim == 2 else 0
            object.__setattr__(self, "c", _frozen_array(np.zeros(n), 1))
        else:
            object.__setattr__(self, "c", _frozen_array(self.c, 1))
        if self.names is not None:
            object.__setattr__(self, "names", tuple(str(name) for name in self.names))

    @property
    def m(self) -> int:
        """Number of equality constraints."""
        return int(self.A.shape[0])

    @property
    def n(self) -> int:
        """Number of variables."""
        return int(self.A.shape[1])

    @property
    def objective(self) -> np.ndarray:
        """Objective vector; never None after construction."""
        assert self.c is not None  # noqa: S101
        return self.c

    @property
    def digest(self) -> str:
        """Content hash of the LP data (shape, A, b and c)."""
        sha = hashlib.sha256()
        sha.update(np.array(self.A.shape, dtype=np.int64).tobytes())
        for array in (self.A, self.b, self.objective):
            sha.update(np.ascontiguousarray(array, dtype=float).tobytes())
        return sha.hexdigest()

    def variable_name(self, j: int) -> str:
        """Return the name of variable j, falling back to a one-based x<j> label.

        Args:
            j (int): zero-based variable index

        Returns:
            str: the variable name
        """
        if self.names is not None:
            return self.names[j]
        return f"x{j + 1}"

    def with_rhs(self, b: np.ndarray) -> "StandardFormLP":
        """Copy of the LP with a new right-hand side; the rank check carries over."""
        return replace(self, b=b)

    def with_objective(self, c: np.ndarray) -> "StandardFormLP":
        """Copy of the LP with a new objective; the rank check carries over."""
        return replace(self, c=c)


@dataclass(frozen=True)
class Basis:
    """A sorted set of basic column indices."""

    __slots__ = ["indices"]
    indices: Tuple[int, ...]

    def __post_init__(self) -> None:
        """Normalize the indices to a tuple of ints and require strict increase."""
        indices = tuple(int(i) for i in self.indices)
        if any(i < 0 for i in indices) or any(a >= b for a, b in zip(indices, indices[1:])):
            raise ValueError(
                f"Basis indices must be strictly increasing and nonnegative: {indices}"
            )
        object.__setattr__(self, "indices", indices)

    def __len__(self) -> int:
        """Cardinality of the basis."""
        return len(self.indices)

    def one_based(self) -> str:
        """Format the basis as a one-based set, e.g. '{2,3}'."""
        return "{" + ",".join(str(i + 1) for i in self.indices) + "}"


@dataclass(frozen=True, eq=False)
class BasisPoint:
    """The basic solution of a basis together with its degree of degeneracy.

    Nonbasic entries of x are exact zeros. The point may be infeasible (negative entries), the
    feasibility test is done by the caller.
    """

    __slots__ = ["basis", "x", "degeneracy_degree"]
    basis: Basis
    x: np.ndarray
    degeneracy_degree: int


@dataclass
class BfsEnumeration:
    """Every feasible basis of a small LP, its basic solution and the distinct extreme points.

    Entries are kept in lexicographic order of the basis indices. Distinct points are deduplicated
    in the infinity norm, so several bases may map to the same extreme point.
    """

    lp_digest: str
    entries: List[BasisPoint] = field(default_factory=list)
    distinct_points: List[np.ndarray] = field(default_factory=list)
    all_degenerate: bool = False

    def max_positive_entries(self, zero: float) -> int:
        """Largest number of entries above `zero` over all distinct points.

        Args:
            zero (float): threshold for an entry to count as positive

        Returns:
            int: the maximum count, 0 when there are no points
        """
        return max((int(np.sum(point > zero)) for point in self.distinct_points), default=0)

    def min_degree(self) -> int:
        """Smallest degree of degeneracy over all feasible bases."""
        return min((entry.degeneracy_degree for entry in self.entries), default=0)

    def to_frame(self, names: Optional[Sequence[str]] = None) -> pd.DataFrame:
        """Tabulate the enumeration, one row per feasible basis.

        Args:
            names (Sequence[str], optional): variable names for the point columns

        Returns:
            pd.DataFrame: columns basis, degree and one column per variable
        """
        n = len(self.entries[0].x) if self.entries else 0
        labels = list(names) if names is not None else [f"x{j + 1}" for j in range(n)]
        records = []
        for entry in self.entries:
            record = {"basis": entry.basis.one_based(), "degree": entry.degeneracy_degree}
            record.update({label: float(value) for label, value in zip(labels, entry.x)})
            records.append(record)
        return pd.DataFrame(records, columns=["basis", "degree", *labels])
