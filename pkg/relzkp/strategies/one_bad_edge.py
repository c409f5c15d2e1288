import logging

from collections import Counter

import networkx as nx

from relzkp.errors import InvalidGraph, NotAProver
from relzkp.graph import COLORS, monochrome_edges
from relzkp.strategies.generic import Strategy as StrategyDefault

logger = logging.getLogger(__name__)

# Color assignments tried per edge by the exhaustive search
SEARCH_BUDGET = 10**5


def _single_recoloring(graph):
    """First (vertex, color) change of the witness that breaks exactly one edge"""
    witness = graph.witness
    neighbour_colors = [Counter() for _ in range(graph.num_vertices)]
    for u, v in graph.edges:
        neighbour_colors[u][witness[v]] += 1
        neighbour_colors[v][witness[u]] += 1

    for vertex in range(graph.num_vertices):
        for color in COLORS:
            if color != witness[vertex] and neighbour_colors[vertex][color] == 1:
                coloring = list(witness)
                coloring[vertex] = color
                return tuple(coloring)
    return None


def _preferred_colors(color):
    return (color, (color + 1) % 3, (color + 2) % 3)


def _coloring_with_bad_edge(graph, nx_graph, edge, budget=SEARCH_BUDGET):
    """Backtracking search of a coloring where edge is the only monochrome one

    Equivalent to properly coloring the graph with the endpoints of edge merged.
    The first endpoint keeps its witness color, every permutation of a solution
    being a solution too; other vertices try their witness color first.

    Returns:
        the coloring, or None when none exists or the budget runs out
    """
    u, v = edge
    witness = graph.witness
    order = [x for x in nx.bfs_tree(nx_graph, u) if x != v]
    reached = set(order)
    order += [x for x in range(graph.num_vertices) if x not in reached and x != v]
    colors = [None] * graph.num_vertices
    options = [None] * len(order)

    def assign(x, color):
        colors[x] = color
        if x == u:
            colors[v] = color

    def fits(x, color):
        neighbours = list(nx_graph.adj[x])
        if x == u:
            neighbours += list(nx_graph.adj[v])
        return all(colors[w] != color for w in neighbours if w not in (u, v) or x not in (u, v))

    steps = 0
    pos = 0
    while pos < len(order):
        if pos < 0:
            return None
        x = order[pos]
        if options[pos] is None:
            options[pos] = iter((witness[u],) if x == u else _preferred_colors(witness[x]))
        else:
            assign(x, None)
        for color in options[pos]:
            steps += 1
            if steps > budget:
                return None
            if fits(x, color):
                assign(x, color)
                pos += 1
                break
        else:
            options[pos] = None
            pos -= 1
    return tuple(colors)


def one_bad_edge_coloring(graph):
    """A coloring of the graph with exactly one monochrome edge

    A single recolored vertex of the witness is tried first, then a bounded
    exhaustive search edge by edge.

    Returns:
        (coloring, [the monochrome edge])
    """
    if not graph.has_witness:
        raise NotAProver("The one_bad_edge strategy starts from a witness")
    if not graph.edges:
        raise InvalidGraph("A graph without edges has no edge to break")

    coloring = _single_recoloring(graph)
    if coloring is None:
        nx_graph = graph.to_networkx()
        for edge in graph.edges:
            coloring = _coloring_with_bad_edge(graph, nx_graph, edge)
            if coloring is not None:
                break
    if coloring is None:
        raise InvalidGraph("No coloring with exactly one monochrome edge found")

    bad = monochrome_edges(graph, coloring)
    if len(bad) != 1:
        raise InvalidGraph(f"Expected one monochrome edge, got {len(bad)}")
    logger.debug(f"Monochrome edge {bad[0]}")
    return coloring, bad


class Strategy(StrategyDefault):
    """Both provers commit honestly to a coloring that is wrong on one edge

    A round is rejected exactly when the challenge hits a monochrome edge.
    """

    name = "one_bad_edge"

    def __init__(self, graph, spec, seed):
        super(Strategy, self).__init__(graph, spec, seed)
        self.bad_coloring, self.bad_edges = one_bad_edge_coloring(graph)

    def coloring(self):
        return self.bad_coloring

    @property
    def expected_rejection_rate(self):
        return len(self.bad_edges) / self.graph.num_edges
