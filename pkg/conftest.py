import pytest

from relzkp.field import FieldSpec
from relzkp.graph import ColoredGraph, triangle_graph


@pytest.fixture
def gf8():
    return FieldSpec.preset(3)


@pytest.fixture
def gf16():
    return FieldSpec.preset(4)


@pytest.fixture
def gf256():
    return FieldSpec.preset(8)


@pytest.fixture
def triangle():
    return triangle_graph()


@pytest.fixture
def twenty_edge_graph():
    """10 vertices colored v mod 3, 20 bichromatic edges, connected"""
    edges = [(k, k + 1) for k in range(9)]
    edges += [(k, k + 2) for k in range(8)]
    edges += [(0, 4), (1, 5), (2, 7)]
    return ColoredGraph(10, tuple(edges), tuple(v % 3 for v in range(10)))
