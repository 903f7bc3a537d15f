"""Standard-form LP data model, basis machinery and exhaustive BFS enumeration."""
from facet_lp.lp.bases import basis_solve
from facet_lp.lp.bases import degeneracy_degree
from facet_lp.lp.bases import enumerate_bfs
from facet_lp.lp.bases import is_feasible_point
from facet_lp.lp.bases import is_strictly_feasible_point
from facet_lp.lp.bases import numerical_rank
from facet_lp.lp.bases import rank_threshold
from facet_lp.lp.bases import validate
from facet_lp.lp.data_structures import Basis
from facet_lp.lp.data_structures import BasisPoint
from facet_lp.lp.data_structures import BfsEnumeration
from facet_lp.lp.data_structures import StandardFormLP


__all__ = [
    "Basis",
    "BasisPoint",
    "BfsEnumeration",
    "StandardFormLP",
    "basis_solve",
    "degeneracy_degree",
    "enumerate_bfs",
    "is_feasible_point",
    "is_strictly_feasible_point",
    "numerical_rank",
    "rank_threshold",
    "validate",
]
