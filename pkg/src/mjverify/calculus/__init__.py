"""Sequent calculus: rules, symbolic execution, and user interactions."""

from .base import (
    CalculusError, ChildGoal, Focus, FormulaMeta, FreshNames, GoalState,
    NodeInfo, PathStep, RuleApplication, resolve_focus,
)
from .engine import applicable_rules, apply_rule, enumerate_foci
from .rules import REGISTRY, Rule, RuleCategory, get_rule, propagate_origins
from .symexec import body_env, find_modality, initial_node_info
from . import interact  # noqa: F401  (registers user rules)
from . import loops  # noqa: F401
from . import symexec  # noqa: F401
