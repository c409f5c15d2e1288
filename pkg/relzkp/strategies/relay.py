import logging

from relzkp.errors import ProtocolViolation
from relzkp.field import add, sample_vector
from relzkp.spacetime import relay_messages
from relzkp.strategies.generic import ProverP1 as ProverP1Default
from relzkp.strategies.generic import ProverP2 as ProverP2Default
from relzkp.strategies.generic import Strategy as StrategyDefault

logger = logging.getLogger(__name__)

CHALLENGE_AT_P1 = "challenge_at_p1"
KEYS_AT_P2 = "keys_at_p2"


class ProverP1(ProverP1Default):
    """Commits to nothing and solves the keys once it learns the edge"""

    def __init__(self, graph, spec, seed, coloring=None):
        super(ProverP1, self).__init__(graph, spec, seed, coloring)
        self.queries = None
        self.commitments = None

    def commit(self, X):
        self.queries = tuple(X)
        self.commitments = sample_vector(
            self.private_rng(self.state.round_index), self.spec, len(X)
        )
        return self.commitments

    def receive_cross(self, name, payload):
        if name != CHALLENGE_AT_P1 or self.commitments is None:
            raise ProtocolViolation(f"P1 cannot answer {name}")
        i, j = payload
        # Opens vertex i to color 0 and vertex j to color 1
        b_i = self.commitments[i]
        b_j = add(self.commitments[j], self.queries[j])
        return b_i, b_j


class ProverP2(ProverP2Default):
    def reveal(self, C):
        return self.link.request(self.role, CHALLENGE_AT_P1, tuple(C), KEYS_AT_P2)


class Strategy(StrategyDefault):
    """Provers that signal each other inside the round

    The openings are always two distinct colors, so only the timing check can
    catch them: the keys reach P2 no sooner than d/c after P1 got the query.
    """

    name = "relay"
    cross_messages = tuple(relay_messages())

    P1 = ProverP1
    P2 = ProverP2

    def coloring(self):
        return (0,) * self.graph.num_vertices
