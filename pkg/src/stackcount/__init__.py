"""Counting rational points of weighted projective stacks and mu_m-torsors by height."""

from .arith import DomainError, factor, mobius, padic_valuation, zeta_euler
from .points import (
    ResidueCondition,
    StackPoint,
    Weights,
    canonicalize,
    count_classes,
    enumerate_classes,
    r_p,
    weight_splitting_matrix,
)
from .heights import HeightFamily, height
from .torsors import canonicalize_torsor, count_fields, count_torsors, enumerate_torsors
from .analytic import (
    field_count_constant,
    toric_peyre_constant,
    toric_transform_brute,
    toric_transform_closed,
    torsor_leading_constant,
)

__version__ = "0.1.0"
