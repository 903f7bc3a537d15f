"""Share of degenerate pivots of the dual simplex on instances without a dual Slater point."""
from typing import List


PROTOCOL = "degiter"

M = 50
N = 200

# planted dimensions as percentages of N
RATIOS: List[float] = [60, 70, 80, 90, 100]

SEEDS: List[int] = list(range(10))

RULE = "bland"

OUTPUT = "reports/degiter.csv"
