"""KKT residuals when the right-hand side of an instance without a Slater point is perturbed."""
from typing import List
from typing import Tuple

import numpy as np


PROTOCOL = "perturbation"

M = 20
N = 60

# the first value is the planted dimension of every instance
R_RANGE: Tuple[int, int] = (45, 45)

EPSILONS: List[float] = [float(eps) for eps in np.logspace(-6, -1, 11)]

SEEDS: List[int] = list(range(5))

OUTPUT = "reports/perturbation.csv"
