"""Signal temporal logic with Valued Boolean robustness.

Traces and formulas, max and additive robustness monitors, translation of
block-diagram requirements to STL, and simulated-annealing falsification.
"""

from .falsifier import (
    AnnealingSettings, Campaign, CampaignSummary, RunResult, falsify_once, run_campaign, summarize,
)
from .robustness import SemanticsConfig, eval_robust, robustness_vector, signed_robustness
from .stl import bool_sat, format_formula, load_spec, nnf, parse_stl
from .sut import DeltaSigmaSurrogate, ExternalProcessModel, SimulationError, StaticSwitched, SutModel, simulate
from .trace import Trace, TraceError
from .transform import BlockGraph, execute_graph, load_graph, translate
from .vbool import BOT, TOP, VBool

__version__ = "0.1.0"

__all__ = [
    "AnnealingSettings", "Campaign", "CampaignSummary", "RunResult", "falsify_once", "run_campaign",
    "summarize", "SemanticsConfig", "eval_robust", "robustness_vector", "signed_robustness",
    "bool_sat", "format_formula", "load_spec", "nnf", "parse_stl", "DeltaSigmaSurrogate",
    "ExternalProcessModel", "SimulationError", "StaticSwitched", "SutModel", "simulate", "Trace",
    "TraceError", "BlockGraph", "execute_graph", "load_graph", "translate", "BOT", "TOP", "VBool",
]
