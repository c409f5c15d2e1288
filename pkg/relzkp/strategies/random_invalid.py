import logging

from relzkp.errors import InvalidGraph
from relzkp.graph import is_proper
from relzkp.strategies.generic import ProverP1 as ProverP1Default
from relzkp.strategies.generic import ProverP2 as ProverP2Default
from relzkp.strategies.generic import Strategy as StrategyDefault

logger = logging.getLogger(__name__)

# Child key of the round tape holding the coloring draw
COLORING_TAPE = 1
MAX_DRAWS = 10**4


def random_improper_coloring(graph, rng, max_draws=MAX_DRAWS):
    """Uniform coloring conditioned on having a monochrome edge"""
    if not graph.edges:
        raise InvalidGraph("Every coloring of a graph without edges is proper")
    for _ in range(max_draws):
        coloring = tuple(rng.integers(0, 3, size=graph.num_vertices).tolist())
        if not is_proper(graph, coloring):
            return coloring
    raise InvalidGraph(f"No improper coloring in {max_draws} draws")


class RandomColoring:
    """Read a fresh improper coloring from the shared tape every round"""

    def prepare(self, round_index):
        if self.state.round_index != round_index:
            self.state.coloring = random_improper_coloring(
                self.state.graph, self.tape(round_index).child(COLORING_TAPE)
            )
        super(RandomColoring, self).prepare(round_index)


class ProverP1(RandomColoring, ProverP1Default):
    pass


class ProverP2(RandomColoring, ProverP2Default):
    pass


class Strategy(StrategyDefault):
    """Provers without a witness that guess a new coloring every round"""

    name = "random_invalid"

    P1 = ProverP1
    P2 = ProverP2

    def coloring(self):
        # Replaced by the first prepare
        return (0,) * self.graph.num_vertices
