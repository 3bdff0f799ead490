from .execute import OPAQUE_FUNCTIONS, DivisionByZeroWarning, execute_graph, final_output
from .graph import (
    AlgebraicLoopError, Block, BlockGraph, GraphError, Wire, graph_from_dict, load_graph,
)
from .tables import (
    DEFAULT_ENTRY_LIMIT, FormulaTable, SignalTable, TableSizeError, combine_binary, flatten_table,
    s2f, translate_switch,
)
from .templates import LOOP_PATTERNS, TEMPLATES, Template, match_template, register_template
from .translate import (
    MODES, LargeFormulaWarning, LoggedSignal, TemplateMismatchError, Translation, translate,
)

__all__ = [
    "OPAQUE_FUNCTIONS", "DivisionByZeroWarning", "execute_graph", "final_output",
    "AlgebraicLoopError", "Block", "BlockGraph", "GraphError", "Wire", "graph_from_dict",
    "load_graph", "DEFAULT_ENTRY_LIMIT", "FormulaTable", "SignalTable", "TableSizeError",
    "combine_binary", "flatten_table", "s2f", "translate_switch", "LOOP_PATTERNS", "TEMPLATES",
    "Template", "match_template", "register_template", "MODES", "LargeFormulaWarning",
    "LoggedSignal", "TemplateMismatchError", "Translation", "translate",
]
