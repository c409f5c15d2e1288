import json
import logging

from dataclasses import dataclass, replace
from functools import cached_property, lru_cache
from itertools import permutations
from math import comb

import networkx as nx
import numpy as np

from cerberus import Validator

from relzkp.errors import GenerationFailed, InvalidColoring, InvalidGraph, InvalidParameter

logger = logging.getLogger(__name__)

COLORS = (0, 1, 2)
GRAPH_FORMAT_VERSION = 1
MAX_RESTARTS = 10**4

# Schema of the graph JSON file
graph_schema = {
    "version": {"required": True, "type": "integer", "allowed": [GRAPH_FORMAT_VERSION]},
    "num_vertices": {"required": True, "type": "integer", "min": 1},
    "edges": {
        "required": True,
        "type": "list",
        "schema": {
            "type": "list",
            "minlength": 2,
            "maxlength": 2,
            "schema": {"type": "integer", "min": 0},
        },
    },
    "witness": {
        "required": False,
        "type": "list",
        "schema": {"type": "integer", "allowed": list(COLORS)},
    },
}


@dataclass(frozen=True)
class ColorPermutation:
    """A bijection on the three colors

    Attributes:
        mapping: (pi(0), pi(1), pi(2))
    """

    mapping: tuple = COLORS

    def __post_init__(self):
        mapping = tuple(int(c) for c in self.mapping)
        if sorted(mapping) != list(COLORS):
            raise InvalidParameter(f"{self.mapping} is not a permutation of {COLORS}")
        object.__setattr__(self, "mapping", mapping)

    def __call__(self, color):
        return self.mapping[color]

    @classmethod
    def all(cls):
        """The six permutations, always in the same order"""
        return _all_permutations()

    @classmethod
    def identity(cls):
        return cls(COLORS)

    def compose(self, other):
        """self after other"""
        return ColorPermutation(tuple(self(other(c)) for c in COLORS))

    def inverse(self):
        inverse = [0, 0, 0]
        for color, image in enumerate(self.mapping):
            inverse[image] = color
        return ColorPermutation(tuple(inverse))


@lru_cache(maxsize=None)
def _all_permutations():
    return tuple(ColorPermutation(p) for p in permutations(COLORS))


@dataclass(frozen=True)
class ColoredGraph:
    """An undirected simple graph, optionally holding a proper 3-coloring

    Edges are stored as sorted (u, v) pairs with u < v, deduplicated and in
    lexicographic order, so two graphs with the same edge set compare equal.
    The witness is known only to provers; `public()` drops it.

    Attributes:
        num_vertices: |V|, vertices are 0 .. |V|-1
        edges: tuple of (u, v) pairs
        witness: tuple of colors in {0, 1, 2}, one per vertex, or None
    """

    num_vertices: int
    edges: tuple = ()
    witness: tuple = None

    def __post_init__(self):
        if self.num_vertices < 1:
            raise InvalidGraph("A graph needs at least one vertex")

        normalized = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise InvalidGraph(f"Self-loop on vertex {u}")
            if not (0 <= u < self.num_vertices and 0 <= v < self.num_vertices):
                raise InvalidGraph(f"Edge ({u}, {v}) out of range")
            normalized.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", tuple(sorted(normalized)))

        if self.witness is not None:
            witness = tuple(int(c) for c in self.witness)
            object.__setattr__(self, "witness", witness)
            if not is_proper(self, witness):
                raise InvalidColoring("The witness is not a proper coloring")

    def __repr__(self):
        secret = "with witness" if self.witness is not None else "public"
        return f"ColoredGraph(|V|={self.num_vertices}, |E|={len(self.edges)}, {secret})"

    @property
    def num_edges(self):
        return len(self.edges)

    @property
    def has_witness(self):
        return self.witness is not None

    @cached_property
    def edge_index(self):
        """Position of every edge in `edges`"""
        return {edge: idx for idx, edge in enumerate(self.edges)}

    def has_edge(self, u, v):
        return (min(u, v), max(u, v)) in self.edge_index

    def public(self):
        """Copy of the graph without the witness"""
        return replace(self, witness=None)

    def to_networkx(self):
        g = nx.Graph()
        g.add_nodes_from(range(self.num_vertices))
        g.add_edges_from(self.edges)
        return g

    def to_dict(self, include_witness=True):
        data = {
            "version": GRAPH_FORMAT_VERSION,
            "num_vertices": self.num_vertices,
            "edges": [list(edge) for edge in self.edges],
        }
        if include_witness and self.witness is not None:
            data["witness"] = list(self.witness)
        return data

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise InvalidGraph("A graph document must be a JSON object")
        validator = Validator()
        if not validator.validate(data, graph_schema):
            raise InvalidGraph(f"Invalid graph document: {validator.errors}")
        witness = data.get("witness")
        if witness is not None and len(witness) != data["num_vertices"]:
            raise InvalidColoring("Witness length differs from the number of vertices")
        return cls(
            num_vertices=data["num_vertices"],
            edges=tuple(tuple(edge) for edge in data["edges"]),
            witness=tuple(witness) if witness is not None else None,
        )

    def dumps(self, include_witness=True):
        return json.dumps(self.to_dict(include_witness))

    @classmethod
    def loads(cls, text):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise InvalidGraph(f"Malformed graph file: {e}") from e
        return cls.from_dict(data)

    def save(self, path, include_witness=True):
        with open(path, "w") as f:
            f.write(self.dumps(include_witness))

    @classmethod
    def load(cls, path):
        with open(path, "r") as f:
            return cls.loads(f.read())


def triangle_graph():
    """K3 with witness (0, 1, 2), the smallest instance used in exact tests"""
    return ColoredGraph(3, ((0, 1), (0, 2), (1, 2)), (0, 1, 2))


def _check_coloring(graph, coloring):
    if coloring is None or len(coloring) != graph.num_vertices:
        raise InvalidColoring(
            f"A coloring of {graph.num_vertices} vertices is required"
        )
    for color in coloring:
        if color not in COLORS:
            raise InvalidColoring(f"{color} is not a color")


def monochrome_edges(graph, coloring):
    """Edges whose endpoints share the same color"""
    _check_coloring(graph, coloring)
    return [(u, v) for u, v in graph.edges if coloring[u] == coloring[v]]


def is_proper(graph, coloring):
    """True iff no edge of the graph is monochromatic

    Raises:
        InvalidColoring: the coloring is partial or uses a value outside {0, 1, 2}
    """
    return not monochrome_edges(graph, coloring)


def is_connected(graph):
    return nx.is_connected(graph.to_networkx())


def apply_permutation(coloring, permutation):
    """Relabel every vertex color through the permutation"""
    return tuple(permutation(c) for c in coloring)


def expected_edges(num_vertices, edge_prob):
    """Mean edge count of `generate`: p * 2/3 * C(|V|, 2)"""
    return edge_prob * 2 / 3 * comb(num_vertices, 2)


def calibrate_edge_prob(num_vertices, target_edges):
    """Edge probability whose expected edge count equals target_edges"""
    bichromatic = 2 / 3 * comb(num_vertices, 2)
    p = target_edges / bichromatic if bichromatic else 0
    if not 0 < p < 1:
        raise InvalidParameter(
            f"{target_edges} edges are not reachable with {num_vertices} vertices"
        )
    return p


def generate(num_vertices, edge_prob, rng, max_restarts=MAX_RESTARTS):
    """Generate a connected graph together with a proper 3-coloring

    Every vertex receives a uniform color, then every pair of differently
    colored vertices becomes an edge with probability edge_prob. The whole
    draw restarts until the graph is connected.

    Args:
        num_vertices: |V|, at least 3
        edge_prob: p in (0, 1)
        rng: the SeededRng the graph is drawn from
        max_restarts: restart budget

    Returns:
        a ColoredGraph with witness
    """
    if not 0 < edge_prob < 1:
        raise InvalidParameter(f"Edge probability {edge_prob} not in (0, 1)")
    if num_vertices < 3:
        raise InvalidParameter("At least 3 vertices are required")

    rows, cols = np.triu_indices(num_vertices, k=1)
    for attempt in range(max_restarts):
        colors = rng.integers(0, 3, size=num_vertices)
        bichromatic = colors[rows] != colors[cols]
        selected = bichromatic & (rng.random(size=rows.size) < edge_prob)
        edges = tuple(zip(rows[selected].tolist(), cols[selected].tolist()))

        candidate = ColoredGraph(num_vertices, edges)
        if is_connected(candidate):
            logger.debug(
                f"Connected graph after {attempt + 1} attempts, {len(edges)} edges"
            )
            return replace(candidate, witness=tuple(colors.tolist()))

    raise GenerationFailed(
        f"No connected graph with |V|={num_vertices}, p={edge_prob} after {max_restarts} attempts"
    )
