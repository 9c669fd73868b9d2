"""Exact orbital integrals over F_q((t)) and checks of the identities that match them."""

from .engine import EvalContext, derivative_at_zero, eval_orbital_G, eval_orbital_S, eval_orbital_split
from .fields import residue_field
from .laurent import LocalElem, parse_local
from .quad_ext import QuadExt
from .values import LogValue, Value

__version__ = "0.1.0"

__all__ = [
    "EvalContext", "LocalElem", "LogValue", "QuadExt", "Value", "derivative_at_zero", "eval_orbital_G",
    "eval_orbital_S", "eval_orbital_split", "parse_local", "residue_field",
]
