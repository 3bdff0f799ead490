from .ast import (
    INF, RELATIONS, Abs, Always, And, BinOp, Const, Eventually, FalseConst, Formula, Implies,
    Neg, Not, Or, Predicate, Scaled, TrueConst, Until, Var, FALSE, TRUE, depth, modal_depth,
    operator_count, predicates, signals, walk,
)
from .boolean import NanSampleError, bool_sat, eval_expr, is_nnf, nnf, sat_vector
from .syntax import (
    MalformedInterval, SpecError, StlSyntaxError, format_expr, format_formula, load_spec,
    parse_stl, read_spec,
)

__all__ = [
    "INF", "RELATIONS", "Abs", "Always", "And", "BinOp", "Const", "Eventually", "FalseConst",
    "Formula", "Implies", "Neg", "Not", "Or", "Predicate", "Scaled", "TrueConst", "Until", "Var",
    "FALSE", "TRUE", "depth", "modal_depth", "operator_count", "predicates", "signals", "walk",
    "NanSampleError", "bool_sat", "eval_expr", "is_nnf", "nnf", "sat_vector",
    "MalformedInterval", "SpecError", "StlSyntaxError", "format_expr", "format_formula",
    "load_spec", "parse_stl", "read_spec",
]
