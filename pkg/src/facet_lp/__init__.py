"""Facial reduction preprocessor and degeneracy laboratory for standard-form linear programs."""
from facet_lp.tolerances import Tolerances


DEFAULT_TOLERANCES = Tolerances()
