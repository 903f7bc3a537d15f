"""Test basis solves, validation and exhaustive enumeration."""
import numpy as np
import pytest

from facet_lp.errors import DimensionMismatch
from facet_lp.errors import EnumerationTooLarge
from facet_lp.errors import Infeasible
from facet_lp.errors import NonFiniteData
from facet_lp.errors import RankDeficient
from facet_lp.errors import SingularBasis
from facet_lp.lp.bases import basis_solve
from facet_lp.lp.bases import degeneracy_degree
from facet_lp.lp.bases import enumerate_bfs
from facet_lp.lp.bases import is_feasible_point
from facet_lp.lp.bases import is_strictly_feasible_point
from facet_lp.lp.bases import numerical_rank
from facet_lp.lp.bases import rank_threshold
from facet_lp.lp.bases import validate
from facet_lp.lp.data_structures import Basis
from facet_lp.lp.data_structures import StandardFormLP


def test_validate_sets_rank_flag(exposed_lp: StandardFormLP) -> None:
    """A full row rank LP comes back as a checked copy."""
    checked = validate(exposed_lp)
    assert checked.full_row_rank_checked
    assert not exposed_lp.full_row_rank_checked
    assert checked.digest == exposed_lp.digest


@pytest.mark.parametrize(
    "A, b, c, error",
    [
        (np.ones((2, 3)), np.ones(3), None, DimensionMismatch),
        (np.ones((3, 2)), np.ones(3), None, DimensionMismatch),
        (np.eye(2), np.ones(2), np.ones(3), DimensionMismatch),
        (np.array([[1.0, np.nan], [0.0, 1.0]]), np.ones(2), None, NonFiniteData),
        (np.eye(2), np.array([1.0, np.inf]), None, NonFiniteData),
        (np.array([[1.0, 2.0, 3.0], [2.0, 4.0, 6.0]]), np.array([1.0, 2.0]), None, RankDeficient),
    ],
)
def test_validate_rejects_bad_data(
    A: np.ndarray, b: np.ndarray, c: np.ndarray, error: type
) -> None:
    """Shape, finiteness and rank problems are reported with their own exception."""
    with pytest.raises(error):
        validate(StandardFormLP(A, b, c))


def test_numerical_rank_ignores_tiny_pivots() -> None:
    """A perturbation far below the cutoff does not add to the rank."""
    M = np.array([[1.0, 2.0], [2.0, 4.0 + 1e-18]])
    assert numerical_rank(M) == 1
    assert numerical_rank(np.eye(3)) == 3
    assert numerical_rank(np.zeros((0, 0))) == 0
    assert 0 < rank_threshold(np.eye(3)) < 1e-12


def test_basis_solve(slater_lp: StandardFormLP) -> None:
    """Basis {1,5} gives the nondegenerate point (5, 0, 0, 0, 1)."""
    point = basis_solve(slater_lp, Basis((0, 4)))
    np.testing.assert_allclose(point.x, [5.0, 0.0, 0.0, 0.0, 1.0], atol=1e-12)
    assert point.degeneracy_degree == 0
    assert degeneracy_degree(point) == 0


def test_basis_solve_degenerate(exposed_lp: StandardFormLP) -> None:
    """Basis {1,2} gives x2 = 1 with x1 basic at zero."""
    point = basis_solve(exposed_lp, Basis((0, 1)))
    np.testing.assert_allclose(point.x, [0.0, 1.0, 0.0, 0.0, 0.0], atol=1e-12)
    assert point.degeneracy_degree == 1


def test_basis_solve_singular(exposed_lp: StandardFormLP) -> None:
    """Columns 2 and 5 are parallel."""
    with pytest.raises(SingularBasis):
        basis_solve(exposed_lp, Basis((1, 4)))


def test_basis_solve_wrong_size(exposed_lp: StandardFormLP) -> None:
    """A basis needs m indices inside the column range."""
    with pytest.raises(DimensionMismatch):
        basis_solve(exposed_lp, Basis((0,)))
    with pytest.raises(DimensionMismatch):
        basis_solve(exposed_lp, Basis((0, 5)))


def test_enumerate_exposed(exposed_lp: StandardFormLP) -> None:
    """Six feasible bases, two extreme points, all degenerate."""
    enumeration = enumerate_bfs(validate(exposed_lp))
    bases = [entry.basis.indices for entry in enumeration.entries]
    assert bases == [(0, 1), (0, 4), (1, 2), (1, 3), (2, 4), (3, 4)]
    assert enumeration.all_degenerate
    assert len(enumeration.distinct_points) == 2
    points = enumeration.distinct_points
    np.testing.assert_allclose(points[0], [0.0, 1.0, 0.0, 0.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(points[1], [0.0, 0.0, 0.0, 0.0, 0.5], atol=1e-12)
    assert enumeration.max_positive_entries(1e-9) == 1
    assert enumeration.min_degree() == 1
    assert enumeration.lp_digest == exposed_lp.digest


def test_enumerate_slater(slater_lp: StandardFormLP) -> None:
    """One of the four feasible bases is nondegenerate."""
    enumeration = enumerate_bfs(validate(slater_lp))
    bases = [entry.basis.indices for entry in enumeration.entries]
    assert bases == [(0, 3), (0, 4), (1, 3), (3, 4)]
    assert not enumeration.all_degenerate
    assert [entry.degeneracy_degree for entry in enumeration.entries] == [1, 0, 1, 1]
    assert len(enumeration.distinct_points) == 2
    assert enumeration.max_positive_entries(1e-9) == 2


def test_enumerate_converse_gap(converse_gap_lp: StandardFormLP) -> None:
    """Every basic feasible solution is degenerate although a Slater point exists."""
    enumeration = enumerate_bfs(validate(converse_gap_lp))
    assert len(enumeration.entries) == 4
    assert enumeration.all_degenerate
    assert is_strictly_feasible_point(converse_gap_lp, np.array([0.1, 0.1, 0.55, 0.3, 0.1]))


def test_enumerate_cap(exposed_lp: StandardFormLP) -> None:
    """C(5, 2) = 10 subsets do not fit under a cap of 9."""
    with pytest.raises(EnumerationTooLarge):
        enumerate_bfs(validate(exposed_lp), cap=9)


def test_enumerate_infeasible() -> None:
    """x1 + x2 = -1 has no nonnegative solution."""
    lp = validate(StandardFormLP(np.array([[1.0, 1.0]]), np.array([-1.0])))
    with pytest.raises(Infeasible):
        enumerate_bfs(lp)


def test_feasibility_checks(slater_lp: StandardFormLP) -> None:
    """Feasible, strictly feasible and infeasible points are told apart."""
    assert is_feasible_point(slater_lp, np.array([5.0, 0.0, 0.0, 0.0, 1.0]))
    assert not is_strictly_feasible_point(slater_lp, np.array([5.0, 0.0, 0.0, 0.0, 1.0]))
    assert is_strictly_feasible_point(slater_lp, np.array([0.4, 0.1, 0.1, 0.4, 0.1]))
    assert not is_feasible_point(slater_lp, np.ones(5))
    with pytest.raises(DimensionMismatch):
        is_strictly_feasible_point(slater_lp, np.ones(4))
