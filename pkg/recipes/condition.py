"""Condition numbers of the interior-point normal matrix on instances without a Slater point.

Every seed compares the planted instance, its strictly feasible counterpart and its reduction.
"""
from typing import List
from typing import Tuple


PROTOCOL = "condition"

M = 50
N = 150

# planted dimension r is drawn per seed from this inclusive range
R_RANGE: Tuple[int, int] = (5, 40)

SEEDS: List[int] = list(range(20))

RECORD_TIME = False

OUTPUT = "reports/condition.csv"
