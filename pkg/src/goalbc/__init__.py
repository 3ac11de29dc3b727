"""Boundary-condition analysis for goal-oriented LTL requirement scenes."""
from .ltl import Cube, Formula, TraceFormula
from .parser import LtlSyntaxError, parse

__all__ = ["Cube", "Formula", "TraceFormula", "LtlSyntaxError", "parse"]
__version__ = "0.1.0"
