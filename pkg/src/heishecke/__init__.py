"""Exact computations in Hecke rings of GL2 and of the Heisenberg Lie algebra."""

from heishecke.errors import (
    BudgetExhausted,
    FormulaMismatch,
    HeckeError,
    IllDefinedAction,
    LocalityMismatch,
    NotInMonoid,
    NotLocallyIntegral,
    SingularMatrix,
    SizeLimit,
    WitnessNotFound,
)
from heishecke.exact_linalg import IntMatrix, QuotientVector, SnfDecomposition, det, hnf_left, snf
from heishecke.heis_core import HeisDoubleCoset, HeisElement, HeisLocalParams

__all__ = [
    "BudgetExhausted",
    "FormulaMismatch",
    "HeckeError",
    "HeisDoubleCoset",
    "HeisElement",
    "HeisLocalParams",
    "IllDefinedAction",
    "IntMatrix",
    "LocalityMismatch",
    "NotInMonoid",
    "NotLocallyIntegral",
    "QuotientVector",
    "SingularMatrix",
    "SizeLimit",
    "SnfDecomposition",
    "WitnessNotFound",
    "det",
    "hnf_left",
    "snf",
]
