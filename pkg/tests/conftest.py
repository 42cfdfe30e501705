import os
import sys
from fractions import Fraction

import pytest
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from infinity_dynamics.boundary import Completion, PrimeDivisor  # noqa: E402
from infinity_dynamics.config import Config  # noqa: E402
from infinity_dynamics.fixtures import markov_completion, p2_completion, s2_completion  # noqa: E402
from infinity_dynamics.infnear import BlowupTree, FreeOn, SatelliteBetween  # noqa: E402


@pytest.fixture
def config():
    return Config()


@pytest.fixture
def s2():
    return s2_completion()


@pytest.fixture
def markov():
    return markov_completion()


@pytest.fixture
def p2():
    return p2_completion()


@pytest.fixture
def crossing_pair():
    """Two (-1)-curves E and F meeting once."""
    return Completion([PrimeDivisor("E", -1), PrimeDivisor("F", -1)], [("E", "F")])


@pytest.fixture
def small_tree():
    """Root E~, its free child F, and the satellite G of E~ and F."""
    tree = BlowupTree()
    f = tree.blow_up(FreeOn(tree.root), name="F")
    g = tree.blow_up(SatelliteBetween(tree.root, f), name="G")
    return tree, f, g


def build_tree(choices, mode="maximal-ideal", free_on_b1_only=False):
    """Replay a list of integers as blow-ups: even values free, odd values satellite."""
    tree = BlowupTree(mode=mode)
    for value in choices:
        edges = tree.edges()
        if value % 2 and edges:
            lower, upper = edges[(value // 2) % len(edges)]
            tree.blow_up(SatelliteBetween(lower, upper))
            continue
        hosts = list(tree)
        if free_on_b1_only:
            hosts = [n for n in hosts if tree.node(n).b == 1]
        tree.blow_up(FreeOn(hosts[(value // 2) % len(hosts)]))
    return tree


blowup_choices = st.lists(st.integers(min_value=0, max_value=1000), min_size=0, max_size=25)
# at most 30 nodes once the root is counted
tree_choices = st.lists(st.integers(min_value=0, max_value=1000), max_size=29)

small_rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)
positive_rationals = st.fractions(min_value=Fraction(1, 12), max_value=20, max_denominator=12)
