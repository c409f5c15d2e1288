"""
Witness-free simulator of verifier views and exact comparison of view distributions.

A view is what the two verifiers see in one round without the timestamps:
the queries X, the commitments A, the edge C and the keys B_C. For a fixed
(X, C) the real and the simulated distributions of (A, B_C) are enumerated
exhaustively over tiny fields and compared in rational arithmetic.
"""

import json
import logging
import multiprocessing as mp

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from more_itertools import divide
from tqdm import tqdm

from relzkp.errors import (
    DomainMismatch,
    InvalidChallenge,
    InvalidQuery,
    NotAProver,
    TooLargeToEnumerate,
)
from relzkp.field import embed_color, sample_vector
from relzkp.graph import ColorPermutation

logger = logging.getLogger(__name__)

MAX_ENUMERATION_BITS = 4
MAX_ENUMERATION_VERTICES = 4

# Colors given to the challenged endpoints before permutation, every other
# vertex of the simulated coloring keeps color 0
SIMULATED_ENDPOINT_COLORS = (0, 1)


@dataclass(frozen=True)
class View:
    """Classical registers of one round as the verifiers see them

    Attributes:
        X: queries
        A: commitments
        C: challenged edge (i, j)
        B_C: keys of i and j
    """

    X: tuple
    A: tuple
    C: tuple
    B_C: tuple

    def key(self):
        """Outcome (A, b_i, b_j) as integers, the support element of a distribution"""
        return tuple(a.value for a in self.A) + tuple(b.value for b in self.B_C)

    def to_bytes(self):
        """Canonical serialization, equal views give equal bytes"""
        i, j = self.C
        parts = [x.to_bytes() for x in self.X] + [a.to_bytes() for a in self.A]
        parts += [i.to_bytes(4, "little"), j.to_bytes(4, "little")]
        parts += [b.to_bytes() for b in self.B_C]
        return b"".join(parts)


@dataclass(frozen=True)
class ViewDistribution:
    """Exact distribution of (A, b_i, b_j) for fixed queries and edge

    Attributes:
        spec: the field, part of the outcome universe
        num_vertices: |V|, part of the outcome universe
        weights: outcome -> Fraction
    """

    spec: object
    num_vertices: int
    weights: dict = field(default_factory=dict)

    @classmethod
    def from_counts(cls, spec, num_vertices, counts, total):
        return cls(spec, num_vertices, {k: Fraction(c, total) for k, c in counts.items()})

    def total(self):
        return sum(self.weights.values(), Fraction(0))

    def marginal_A(self):
        n = self.num_vertices
        marginal = Counter()
        for outcome, weight in self.weights.items():
            marginal[outcome[:n]] += weight
        return dict(marginal)


def _check_view_inputs(graph, X, C):
    i, j = C
    if not graph.has_edge(i, j):
        raise InvalidChallenge(f"({i}, {j}) is not an edge")
    if len(X) != graph.num_vertices:
        raise InvalidQuery(f"{len(X)} queries for {graph.num_vertices} vertices")
    if any(not x.value for x in X):
        raise InvalidQuery("Zero query")
    return int(i), int(j)


def simulate_view(graph, X, C, rng):
    """Produce a view that passes the opening checks, without any witness

    The commitments are uniform; the keys of the edge are solved so that both
    endpoints open to two distinct colors picked by a uniform permutation.

    Args:
        graph: the graph, a witness if present is dropped unread
        X: queries
        C: challenged edge
        rng: SeededRng of the simulator

    Returns:
        a View
    """
    graph = graph.public()
    i, j = _check_view_inputs(graph, X, C)
    spec = X[0].spec

    A = sample_vector(rng, spec, graph.num_vertices)
    permutations = ColorPermutation.all()
    pi = permutations[rng.integers(0, len(permutations))]
    y_i, y_j = (pi(c) for c in SIMULATED_ENDPOINT_COLORS)

    b_i = X[i] * embed_color(y_i, spec) + A[i]
    b_j = X[j] * embed_color(y_j, spec) + A[j]
    return View(tuple(X), A, (i, j), (b_i, b_j))


def _check_enumerable(spec, num_vertices):
    if spec.width_bits > MAX_ENUMERATION_BITS or num_vertices > MAX_ENUMERATION_VERTICES:
        raise TooLargeToEnumerate(
            f"Enumerating GF(2^{spec.width_bits})^{num_vertices} is out of reach"
        )


def _enumerate(spec, X, endpoints, colors, simulated):
    """Counts of (A, b_i, b_j) over every permutation and every free vector

    The free vector is the keys B for the real view, where a_k = x_k pi(y_k) + b_k,
    and the commitments A' for the simulated one, where b_k = x_k pi(y_k) + a_k.
    """
    i, j = endpoints
    xs = [x.value for x in X]
    counts = Counter()
    for pi in ColorPermutation.all():
        offsets = [spec.mul_int(x, pi(y)) for x, y in zip(xs, colors)]
        for free in product(range(spec.order), repeat=len(xs)):
            if simulated:
                outcome = free + (offsets[i] ^ free[i], offsets[j] ^ free[j])
            else:
                outcome = tuple(o ^ v for o, v in zip(offsets, free)) + (free[i], free[j])
            counts[outcome] += 1
    return counts


def enumerate_real_distribution(graph, X, C):
    """Real view distribution over the permutation and the keys

    Args:
        graph: graph with witness
        X: queries
        C: challenged edge

    Returns:
        a ViewDistribution with weights over the common denominator 6 Q^|V|
    """
    i, j = _check_view_inputs(graph, X, C)
    spec = X[0].spec
    _check_enumerable(spec, graph.num_vertices)
    if not graph.has_witness:
        raise NotAProver("The real view needs the witness")

    counts = _enumerate(spec, X, (i, j), graph.witness, simulated=False)
    total = len(ColorPermutation.all()) * spec.order**graph.num_vertices
    return ViewDistribution.from_counts(spec, graph.num_vertices, counts, total)


def enumerate_sim_distribution(graph, X, C):
    """Simulated view distribution over the permutation and the commitments"""
    graph = graph.public()
    i, j = _check_view_inputs(graph, X, C)
    spec = X[0].spec
    _check_enumerable(spec, graph.num_vertices)

    colors = [0] * graph.num_vertices
    colors[i], colors[j] = SIMULATED_ENDPOINT_COLORS
    counts = _enumerate(spec, X, (i, j), colors, simulated=True)
    total = len(ColorPermutation.all()) * spec.order**graph.num_vertices
    return ViewDistribution.from_counts(spec, graph.num_vertices, counts, total)


def tv_distance(dist_a, dist_b):
    """Total variation distance (1/2) sum |p - q| as a Fraction"""
    if dist_a.spec != dist_b.spec or dist_a.num_vertices != dist_b.num_vertices:
        raise DomainMismatch("The distributions live on different outcome sets")
    support = set(dist_a.weights) | set(dist_b.weights)
    zero = Fraction(0)
    return sum(
        (abs(dist_a.weights.get(k, zero) - dist_b.weights.get(k, zero)) for k in support),
        zero,
    ) / 2


@dataclass(frozen=True)
class ZkCase:
    X: tuple
    C: tuple
    tv: Fraction


@dataclass
class ZkReport:
    """Outcome of the exhaustive zero-knowledge check

    Attributes:
        num_vertices: |V|
        field_config: FieldSpec config of the field
        cases: one ZkCase per (X, C)
    """

    num_vertices: int
    field_config: dict
    cases: list

    @property
    def max_tv(self):
        return max((case.tv for case in self.cases), default=Fraction(0))

    @property
    def passed(self):
        return all(case.tv == 0 for case in self.cases)

    def to_dict(self):
        return {
            "num_vertices": self.num_vertices,
            "field": self.field_config,
            "cases": [
                {"X": list(case.X), "C": list(case.C), "tv": str(case.tv)}
                for case in self.cases
            ],
            "max_tv": str(self.max_tv),
            "result": "PASS" if self.passed else "FAIL",
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)


def zk_cases(graph, spec):
    """Every nonzero query vector against every edge, in lexicographic order"""
    for xs in product(range(1, spec.order), repeat=graph.num_vertices):
        for edge in graph.edges:
            yield xs, edge


def _zk_chunk(graph, spec, cases, pidx=0, progress=False):
    results = []
    for xs, edge in tqdm(cases, position=pidx, leave=False, disable=not progress):
        X = tuple(spec.element(x) for x in xs)
        real = enumerate_real_distribution(graph, X, edge)
        sim = enumerate_sim_distribution(graph, X, edge)
        results.append(ZkCase(xs, edge, tv_distance(real, sim)))
    return results


def zk_test(graph, spec, workers=1, progress=False):
    """Compare real and simulated views for every (X, C)

    Args:
        graph: graph with witness
        spec: a tiny field
        workers: number of processes
        progress: show one progress bar per worker

    Returns:
        a ZkReport
    """
    _check_enumerable(spec, graph.num_vertices)
    if not graph.has_witness:
        raise NotAProver("The real view needs the witness")
    cases = list(zk_cases(graph, spec))
    logger.info(f"Comparing {len(cases)} (X, C) cases with {workers} workers")

    if workers <= 1:
        results = _zk_chunk(graph, spec, cases, 0, progress)
    else:
        pool = mp.Pool(workers, initializer=tqdm.set_lock, initargs=(mp.Lock(),))
        pending = [
            pool.apply_async(_zk_chunk, args=(graph, spec, list(chunk), pidx, progress))
            for pidx, chunk in enumerate(divide(workers, cases))
        ]
        pool.close()
        pool.join()
        results = [case for p in pending for case in p.get()]

    report = ZkReport(graph.num_vertices, spec.to_config(), results)
    logger.info(f"Maximum TV distance {report.max_tv}, {'PASS' if report.passed else 'FAIL'}")
    return report
