"""Exact DT4 invariants of divisor classes on Calabi-Yau 3-folds with Picard rank one.

Rank-one curve-counting tables (ideal-sheaf and stable-pair invariants) go in;
the wall-crossing sum, its generating-series form, wall locations and the
tilt-stability inequalities come out, all in exact rational arithmetic.
"""
from dtwall.errors import (
    DomainError,
    DTWallError,
    IntegralityError,
    SamplerExhausted,
    ScaleError,
    TableError,
)
from dtwall.numclass import (
    CurvePoint,
    Geometry,
    NumClass,
    b_twist,
    choose_b,
    class_d4,
    euler_pairing,
    eta,
    hilbert_poly,
    twist_exp,
)

__version__ = "0.1.0"
