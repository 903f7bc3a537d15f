"""Exposing vectors and two-step facial reduction of primal and dual feasible sets."""
from facet_lp.reduction.certificates import DualExposingCertificate
from facet_lp.reduction.certificates import ExposingCertificate
from facet_lp.reduction.facial import DualFacialReduction
from facet_lp.reduction.facial import FacialReduction
from facet_lp.reduction.facial import dual_facially_reduce
from facet_lp.reduction.facial import facial_range
from facet_lp.reduction.facial import facially_reduce
from facet_lp.reduction.facial import farkas_infeasible
from facet_lp.reduction.facial import find_dual_exposing_vector
from facet_lp.reduction.facial import find_exposing_vector
from facet_lp.reduction.facial import lift
from facet_lp.reduction.facial import minimum_degeneracy_degree
from facet_lp.reduction.facial import range_split
from facet_lp.reduction.facial import remove_redundant_rows
from facet_lp.reduction.facial import restrict
from facet_lp.reduction.facial import stacked_dual_rank


__all__ = [
    "DualExposingCertificate",
    "DualFacialReduction",
    "ExposingCertificate",
    "FacialReduction",
    "dual_facially_reduce",
    "facial_range",
    "facially_reduce",
    "farkas_infeasible",
    "find_dual_exposing_vector",
    "find_exposing_vector",
    "lift",
    "minimum_degeneracy_degree",
    "range_split",
    "remove_redundant_rows",
    "restrict",
    "stacked_dual_rank",
]
