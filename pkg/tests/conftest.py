import pytest

from iqml.kripke import KripkeModel


@pytest.fixture
def two_index_model():
    # w -i1-> u (p), w -i2-> v ()
    return KripkeModel(["w", "u", "v"], ["i1", "i2"],
                       [("w", "i1", "u"), ("w", "i2", "v")], {"u": {"p"}})


@pytest.fixture
def ep_pair():
    """Pointed models told apart by [E]p: one index with a p- and a non-p-successor
    versus two indices, one per successor."""
    m1 = KripkeModel(["w1", "a", "b"], ["i"], [("w1", "i", "a"), ("w1", "i", "b")], {"a": {"p"}})
    m2 = KripkeModel(["w2", "c", "d"], ["j1", "j2"],
                     [("w2", "j1", "c"), ("w2", "j2", "d")], {"c": {"p"}})
    return m1, "w1", m2, "w2"


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
