"""Proof automation: macros and the linear integer decision procedure."""

from .linarith import decide_linear_int
from .macros import (
    MACRO_RULES, PRIORITY, MacroKind, MacroResult, StrategySettings, run_macro,
)
