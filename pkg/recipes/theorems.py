"""Degeneracy facts checked against exhaustive basis enumeration on small planted instances."""
from typing import List
from typing import Tuple


PROTOCOL = "theorems"

M = 4
N = 10

R_RANGE: Tuple[int, int] = (1, 9)

# each seed checks a planted instance and its strictly feasible counterpart
SEEDS: List[int] = list(range(500))

OUTPUT = "reports/theorems.csv"
