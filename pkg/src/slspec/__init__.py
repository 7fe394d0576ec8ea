"""Spectral analysis of half-line Sturm-Liouville operators and radial trees."""
from .core import (
    CallablePQR,
    CoefficientSet,
    ConstantPQR,
    Segment,
    SolutionState,
    TransferMatrix,
    constant,
    from_callables,
    fundamental_pair,
    propagate,
    transfer_matrix,
    wronskian,
)
from .errors import NumericalError, SLSpecError, ValidationError
from .expr import Expr
from .qtree import TreeSpec, band_spectrum, band_spectrum_numeric, floquet_exponent, tree_ac_scan, tree_to_sl
from .subordinacy import ClassifyPolicy, Verdict, classify_lambda, eps_from_x, jl_ratio, x_from_eps
from .weidmann import QSplit, h_monitor, hypotheses_scan, weidmann_report
from .weyl import m_function, rotate_bc

__version__ = "0.1.0"

__all__ = [
    "CallablePQR",
    "ClassifyPolicy",
    "CoefficientSet",
    "ConstantPQR",
    "Expr",
    "NumericalError",
    "QSplit",
    "SLSpecError",
    "Segment",
    "SolutionState",
    "TransferMatrix",
    "TreeSpec",
    "ValidationError",
    "Verdict",
    "band_spectrum",
    "band_spectrum_numeric",
    "classify_lambda",
    "constant",
    "eps_from_x",
    "floquet_exponent",
    "from_callables",
    "fundamental_pair",
    "h_monitor",
    "hypotheses_scan",
    "jl_ratio",
    "m_function",
    "propagate",
    "rotate_bc",
    "transfer_matrix",
    "tree_ac_scan",
    "tree_to_sl",
    "weidmann_report",
    "wronskian",
    "x_from_eps",
]
