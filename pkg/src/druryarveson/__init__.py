"""Finite models of staircase-supported subspaces of the Drury-Arveson space."""

from .multiindex import DegreeBox, beta, enumerate_box, pascal_sum
from .staircase import ExplicitSet, StaircaseSet
from .kernelcalc import KernelPoint, da_kernel, projected_kernel_series, slab_kernel
from .opmodel import Polynomial, TruncatedBasis, backshift_tuple, mult_tuple, op_norm, poly_apply
from .drury import make_random_commuting_tuple, make_scaled_backshift_tuple, verify_inequality

__all__ = [
    "DegreeBox", "beta", "enumerate_box", "pascal_sum",
    "ExplicitSet", "StaircaseSet",
    "KernelPoint", "da_kernel", "projected_kernel_series", "slab_kernel",
    "Polynomial", "TruncatedBasis", "backshift_tuple", "mult_tuple", "op_norm", "poly_apply",
    "make_random_commuting_tuple", "make_scaled_backshift_tuple", "verify_inequality",
]
