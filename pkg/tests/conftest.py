import sys
from pathlib import Path

import networkx as nx
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hypermatch import generators as g  # noqa: E402
from hypermatch.core import validate  # noqa: E402


def small_zoo():
    """Named 3-comb-free instances with at most a few dozen matchings."""
    return {
        "single": validate([(1, 2, 3)], 3, 3),
        "two-meeting": validate([(1, 2, 3), (3, 4, 5)], 5, 3),
        "two-disjoint": validate([(1, 2, 3), (4, 5, 6)], 6, 3),
        "overlap-8": g.gen_overlap_cycle(8, 3, 1),
        "overlap-12": g.gen_overlap_cycle(12, 3, 1),
        "overlap-k4": g.gen_overlap_cycle(9, 4, 1),
        "tight-6": g.gen_tight_cycle(6, 3),
        "hex-1x1": g.gen_hex_3graph(1, 1),
        "blowup-222": g.gen_rooted_blowup([2, 2, 2], 3),
        "blowup-33": g.gen_rooted_blowup([3, 3], 3),
        "subdivided": g.gen_subdivided(validate([(1, 2, 3), (3, 4, 5)], 5, 3), 1),
        "reduced-path": g.reduce_graph_to_kgraph(nx.path_graph(5), 3),
        "reduced-cycle": g.reduce_graph_to_kgraph(nx.cycle_graph(5), 4),
        "graph-c6": validate([(i, i % 6 + 1) for i in range(1, 7)], 6, 2),
    }


@pytest.fixture(scope="session")
def zoo():
    return small_zoo()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
