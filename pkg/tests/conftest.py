import pytest

from termcore import add_concept, add_term, denote, new_termbase


def build_fig3():
    """Concept c1 denoted by t1 and t2, concept c2 denoted by t3."""
    inst = new_termbase()
    add_concept(inst, "c1")
    add_concept(inst, "c2")
    add_term(inst, "t1", "bank", "en")
    add_term(inst, "t2", "shore", "en")
    add_term(inst, "t3", "bank", "en")
    denote(inst, "c1", "t1")
    denote(inst, "c1", "t2")
    denote(inst, "c2", "t3")
    return inst


@pytest.fixture
def fig3():
    return build_fig3()


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[name])
