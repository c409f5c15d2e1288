import logging

from relzkp.errors import ProtocolViolation
from relzkp.protocol import ProverState, prover_commit, prover_reveal, round_prepare
from relzkp.rng import PROVER_PRIVATE_STREAM, PROVER_TAPE_STREAM, SeededRng
from relzkp.spacetime import P1, P2
from relzkp.wire import Frame, Phase

logger = logging.getLogger(__name__)


class Prover:
    """A prover answering frames of one phase

    Both provers read the round tape from the same seed stream, which models
    randomness shared before the provers were separated.

    Attributes:
        state: the ProverState
        seed: run seed
        link: CrossProverLink, set by the harness
    """

    role = None
    phase = None

    def __init__(self, graph, spec, seed, coloring=None):
        """Initialize the prover

        Args:
            graph: the graph
            spec: the FieldSpec
            seed: run seed
            coloring: colors to commit, the graph witness when omitted
        """
        if coloring is None:
            self.state = ProverState.for_graph(graph, spec, self.role)
        else:
            self.state = ProverState(graph, spec, tuple(coloring), self.role)
        self.seed = seed
        self.link = None

    def __repr__(self):
        return f"{type(self).__module__}.{type(self).__name__}({self.role})"

    @property
    def spec(self):
        return self.state.spec

    def tape(self, round_index):
        return SeededRng(self.seed, PROVER_TAPE_STREAM, round_index)

    def private_rng(self, round_index):
        """Randomness of this prover alone"""
        return SeededRng(self.seed, PROVER_PRIVATE_STREAM, 1 if self.role == P1 else 2, round_index)

    def prepare(self, round_index):
        if self.state.round_index == round_index:
            return
        round_prepare(self.state, self.tape(round_index))
        self.state.round_index = round_index

    def handle(self, frame):
        """Answer a request frame"""
        if frame.phase != self.phase:
            raise ProtocolViolation(f"{self.role} cannot answer a {frame.phase.name} frame")
        self.prepare(frame.round_index)
        return self.answer(frame)

    def answer(self, frame):
        raise NotImplementedError

    def receive_cross(self, name, payload):
        raise ProtocolViolation(f"{self.role} does not take part in prover signaling")


class ProverP1(Prover):
    role = P1
    phase = Phase.QUERY

    def answer(self, frame):
        X = frame.elements(self.spec)
        return Frame.of_elements(frame.round_index, Phase.COMMIT, self.commit(X))

    def commit(self, X):
        return prover_commit(self.state, X)


class ProverP2(Prover):
    role = P2
    phase = Phase.CHALLENGE

    def answer(self, frame):
        if len(frame.values) != 2:
            raise ProtocolViolation("A challenge names exactly two vertices")
        return Frame.of_elements(frame.round_index, Phase.REVEAL, self.reveal(frame.values))

    def reveal(self, C):
        return prover_reveal(self.state, C)


class Strategy:
    """Honest provers holding a proper coloring

    Subclasses in the other modules of this package replace the provers or
    the coloring they commit to.

    Attributes:
        graph: the graph as the provers hold it
        spec: the FieldSpec
        seed: run seed
    """

    name = "honest"
    # CrossProverMessage list describing the timing of prover signaling
    cross_messages = ()

    P1 = ProverP1
    P2 = ProverP2

    def __init__(self, graph, spec, seed):
        self.graph = graph
        self.spec = spec
        self.seed = seed

    def __repr__(self):
        return f"Strategy({self.name})"

    def coloring(self):
        """Coloring committed by both provers, None for the witness"""
        return None

    def create_provers(self):
        coloring = self.coloring()
        p1 = self.P1(self.graph, self.spec, self.seed, coloring)
        p2 = self.P2(self.graph, self.spec, self.seed, coloring)
        return p1, p2
