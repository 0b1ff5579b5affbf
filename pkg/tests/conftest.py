import sys
from pathlib import Path

import pytest

TESTS = Path(__file__).parent
FIXTURES = TESTS / "fixtures"
sys.path.insert(0, str(TESTS))

from mjverify.frontend import load_unit  # noqa: E402
from mjverify.pogen import generate_po  # noqa: E402
from mjverify.session.tree import ProofTree  # noqa: E402
from mjverify.strategy import MacroKind, StrategySettings, run_macro  # noqa: E402


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text()


def fixture_unit(name: str):
    # the name doubles as the file id so golden fixtures stay portable
    return load_unit(fixture_text(name), name)


@pytest.fixture
def listing2():
    return fixture_unit("listing2.mjava")


@pytest.fixture
def listing3():
    return fixture_unit("listing3.mjava")


@pytest.fixture
def listing3_fixed():
    return fixture_unit("listing3_fixed.mjava")


@pytest.fixture
def listing4():
    return fixture_unit("listing4.mjava")


def prove(unit, method, macro=MacroKind.FULL_AUTO, max_steps=20000) -> ProofTree:
    tree = ProofTree(generate_po(unit, method))
    run_macro(tree, None, StrategySettings(max_rule_apps=max_steps, macro=macro))
    return tree


def goal_on_branch(tree, *suffix):
    for goal in tree.open_goals():
        path = goal.label_path()
        if list(suffix) == path[-len(suffix):]:
            return goal
    raise AssertionError(
        f"no open goal on branch {suffix}; have "
        f"{[g.label_path() for g in tree.open_goals()]}"
    )
