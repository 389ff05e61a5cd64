from .expr import ScalarField, parse, pretty
from .jet import Jet2, eval_jet2, evaluate
from .paracomplex import J, ParaComplex, hyperbolic_unit, para_n2, para_pow

__all__ = [
    "ScalarField", "parse", "pretty", "Jet2", "eval_jet2", "evaluate",
    "ParaComplex", "J", "para_pow", "para_n2", "hyperbolic_unit",
]
