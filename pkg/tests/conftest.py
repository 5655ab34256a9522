from pathlib import Path

import pytest

from bilink import read_edge_list

DATA = Path(__file__).parent / "data"


@pytest.fixture
def g_fix():
    """Left a1..a3, right b1..b3, six edges."""
    g, _ = read_edge_list(DATA / "g_fix.tsv")
    return g


def node_ids(g):
    """Label to index maps for both partitions."""
    return ({lab: i for i, lab in enumerate(g.left_labels)},
            {lab: j for j, lab in enumerate(g.right_labels)})


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
