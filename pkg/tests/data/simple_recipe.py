"""A small theorem-suite recipe for testing the experiment command."""

PROTOCOL = "theorems"

M = 3
N = 7

R_RANGE = (1, 4)

SEEDS = [0, 1]
