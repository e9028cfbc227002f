import sys
from pathlib import Path

import pytest
from hypothesis import settings

from gbsmc.graphs import Graph, GraphSpec, gen_graph

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("suite", max_examples=60, deadline=None)
settings.load_profile("suite")


@pytest.fixture
def k4():
    return gen_graph(GraphSpec.of("complete", n=4))


@pytest.fixture
def k6():
    return gen_graph(GraphSpec.of("complete", n=6))


@pytest.fixture
def k33():
    return gen_graph(GraphSpec.of("complete_bipartite", m=3, n=3))


@pytest.fixture
def weighted_square():
    """4-cycle with weights 1, 2, 3, 5/2 — the weighted-dynamics workhorse."""
    from fractions import Fraction
    return Graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)],
                 weights=[1, 2, 3, Fraction(5, 2)])


def balance_suite():
    """The eight small graphs every exact kernel check runs over."""
    from fractions import Fraction
    return [
        ("k4", gen_graph(GraphSpec.of("complete", n=4))),
        ("k6", gen_graph(GraphSpec.of("complete", n=6))),
        ("k33", gen_graph(GraphSpec.of("complete_bipartite", m=3, n=3))),
        ("path5", gen_graph(GraphSpec.of("path", n=5))),
        ("cycle6", gen_graph(GraphSpec.of("cycle", n=6))),
        ("er8", gen_graph(GraphSpec.of("erdos_renyi", n=8, p=0.6), seed=5)),
        ("wsquare", Graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)],
                          weights=[1, 2, 3, Fraction(5, 2)])),
        ("hard2", gen_graph(GraphSpec.of("hard_instance", n_squares=2))),
    ]
