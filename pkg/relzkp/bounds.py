"""
Analytic bounds: non-local game values, soundness, round counts and resources.

Everything here is plain float arithmetic; products with huge exponents are
evaluated in log space.
"""

import logging
import math

from collections import Counter
from dataclasses import asdict, dataclass
from itertools import product

from relzkp.commitment import (
    COLOR_COUNT,
    EDGE_SUBSET_SIZE,
    binding_epsilon,
    required_bits,
)
from relzkp.errors import InvalidParameter, TooLargeToEnumerate

logger = logging.getLogger(__name__)

# Hardware trigger interval between two rounds
TRIGGER_INTERVAL_NS = 1000
SECONDS_PER_YEAR = 365.25 * 24 * 3600
MIB = 2**20

# Largest number of (Bob strategy, x, y) triples the classical value enumerates
CLASSICAL_ENUMERATION_LIMIT = 2 * 10**6


@dataclass(frozen=True)
class GameBound:
    """Value bounds of a non-local game

    Attributes:
        game: short name of the game
        quantum_upper: upper bound on the quantum value
        classical_value: exact classical value, when known
        P: size of Bob's input alphabet
        Q: size of the output field
        n: number of parallel repetitions
        S: projectivity of the game
        I_B: size of Bob's input set
    """

    game: str
    quantum_upper: float
    classical_value: float = None
    P: int = None
    Q: int = None
    n: int = 1
    S: int = 1
    I_B: int = None

    @property
    def vacuous(self):
        """The bound exceeds 1 and so says nothing"""
        return self.quantum_upper > 1

    def to_dict(self):
        data = asdict(self)
        data["vacuous"] = self.vacuous
        return data


def _check_game(P, Q):
    if P < 2:
        raise InvalidParameter(f"P = {P} must be at least 2")
    if Q <= P:
        raise InvalidParameter(f"Q = {Q} must exceed P = {P}")


def chsh_quantum_upper(P, Q):
    """Upper bound 1/P + 4/Q^(1/3) on the quantum value of CHSH_Q(P)"""
    _check_game(P, Q)
    return 1 / P + 4 * Q ** (-1 / 3)


def chsh_parallel_quantum_upper(P, Q, n):
    """Upper bound on the quantum value of n parallel CHSH_Q(P) games

    1/P^n + 4 [2n(P-1) / (P^n Q)]^(1/3). The derivation linearises the coupled
    game value, which needs (P-1)/Q to be small against n.
    """
    if P < 2 or Q < P or n < 1:
        raise InvalidParameter("P >= 2, Q >= P and n >= 1 are required")
    if (P - 1) / Q >= n:
        logger.warning(
            f"(P-1)/Q = {(P - 1) / Q:.3g} is not small against n = {n}, the bound is loose"
        )
    log_term = (math.log(2 * n * (P - 1)) - n * math.log(P) - math.log(Q)) / 3
    return P ** (-n) + 4 * math.exp(log_term)


def chsh_parallel_coupled_value(P, Q, n):
    """Exact value (1/P^n) [(1 + (P-1)/Q)^n - 1] of the coupled parallel game"""
    if P < 2 or Q < 1 or n < 1:
        raise InvalidParameter("P >= 2, Q >= 1 and n >= 1 are required")
    return math.expm1(n * math.log1p((P - 1) / Q)) / P**n


def chsh_parallel_coupled_upper(P, Q, n):
    """Linearised bound 2n(P-1) / (P^n Q) on the coupled parallel game"""
    if P < 2 or Q < 1 or n < 1:
        raise InvalidParameter("P >= 2, Q >= 1 and n >= 1 are required")
    return 2 * n * (P - 1) / (P**n * Q)


def coupled_game_lower(quantum_value, S, I_B_size):
    """Lower bound (omega* - 1/|I_B|) / (64 S) on the coupled game value

    The value may be negative and is returned as is.
    """
    if S < 1 or I_B_size < 1:
        raise InvalidParameter("S >= 1 and |I_B| >= 1 are required")
    if not 0 <= quantum_value <= 1:
        raise InvalidParameter(f"Winning probability {quantum_value} not in [0, 1]")
    return (quantum_value - 1 / I_B_size) / (64 * S)


def chsh_binary_quantum_value():
    """Tsirelson value 1/2 + sqrt(2)/4 of the binary CHSH game"""
    return 0.5 + math.sqrt(2) / 4


def chsh_classical_value(P, spec):
    """Exact classical value of CHSH_Q(P) by best response

    Alice receives x in F_Q, Bob y in F_P (embedded as the integers 0..P-1),
    they answer a and b in F_Q and win iff a + b = x*y. For every deterministic
    strategy of Bob, Alice answers each x with the most frequent x*y + b(y).

    Args:
        P: Bob's alphabet size, at most Q
        spec: the FieldSpec of F_Q

    Returns:
        the winning probability as a float
    """
    Q = spec.order
    if not 2 <= P <= Q:
        raise InvalidParameter(f"P = {P} must lie in [2, Q = {Q}]")
    if Q**P * Q * P > CLASSICAL_ENUMERATION_LIMIT:
        raise TooLargeToEnumerate(f"CHSH_{Q}({P}) has {Q**P} deterministic strategies for Bob")

    products = [[spec.mul_int(x, y) for y in range(P)] for x in range(Q)]
    best = 0
    for bob in product(range(Q), repeat=P):
        wins = 0
        for x in range(Q):
            counts = Counter(products[x][y] ^ bob[y] for y in range(P))
            wins += max(counts.values())
        best = max(best, wins)
    return best / (Q * P)


def chsh_game_bound(P, Q_bits, n=1, spec=None):
    """GameBound of n parallel CHSH_Q(P) games, with the classical value when cheap"""
    Q = 2**Q_bits
    if n == 1:
        upper = chsh_quantum_upper(P, Q)
    else:
        upper = chsh_parallel_quantum_upper(P, Q, n)

    classical = None
    if n == 1 and spec is not None:
        try:
            classical = chsh_classical_value(P, spec)
        except TooLargeToEnumerate:
            logger.debug(f"Classical value of CHSH_{Q}({P}) skipped")
    return GameBound("chsh", upper, classical, P, Q, n, 1, P**n)


def soundness_log(num_edges, m):
    """Natural log of (1 - 1/|E|)^m"""
    if num_edges < 1 or m < 0:
        raise InvalidParameter("|E| >= 1 and m >= 0 are required")
    if m == 0:
        return 0.0
    if num_edges == 1:
        return -math.inf
    return m * math.log1p(-1 / num_edges)


def soundness_after_rounds(num_edges, m):
    """Probability (1 - 1/|E|)^m that cheating provers survive m rounds"""
    return math.exp(soundness_log(num_edges, m))


def analytic_cheat_success(num_edges, m, N_bits, P=COLOR_COUNT, subset_size=EDGE_SUBSET_SIZE):
    """Acceptance bound for quantum correlated provers without a valid coloring

    A bad edge is challenged with probability at least 1/|E|, and opening it
    to two distinct colors succeeds at most with the sum-binding slack
    epsilon_b. Per round the acceptance is at most 1 - 1/|E| + epsilon_b.

    Returns:
        dict with the per round bound and the bound over m rounds
    """
    epsilon = binding_epsilon(P, subset_size, N_bits)
    per_round = min(1.0, 1 - 1 / num_edges + epsilon)
    if m == 0:
        log_overall = 0.0
    elif per_round == 0:
        log_overall = -math.inf
    else:
        log_overall = m * math.log(per_round)
    return {
        "per_round": per_round,
        "overall": math.exp(log_overall),
        "log_overall": log_overall,
        "epsilon_b": epsilon,
    }


def rounds_for_soundness(num_edges, k):
    """m = k |E| rounds give soundness at most e^-k"""
    if num_edges < 1 or k < 0:
        raise InvalidParameter("|E| >= 1 and k >= 0 are required")
    return k * num_edges


def resource_bytes(N_bits, num_vertices, m):
    """Bytes committed over a run: N |V| m bits, rounded up to whole bytes"""
    if N_bits < 0 or num_vertices < 0 or m < 0:
        raise InvalidParameter("Resource arguments must be non negative")
    return -(-(N_bits * num_vertices * m) // 8)


def resource_mib(N_bits, num_vertices, m):
    return resource_bytes(N_bits, num_vertices, m) / MIB


def prior_work_rounds(k, num_edges):
    """Rounds k (11 |E|)^4 of the earlier quantum-secure three-prover protocol"""
    return k * (11 * num_edges) ** 4


def prior_work_rounds_as_printed(k, num_edges):
    """The k * 11 |E|^4 reading of the same figure, far from the quoted 2e18"""
    return k * 11 * num_edges**4


def protocol_duration_s(m, trigger_interval_ns=TRIGGER_INTERVAL_NS):
    """Wall time of m rounds fired every trigger_interval_ns"""
    return m * trigger_interval_ns * 1e-9


def protocol_duration_years(m, trigger_interval_ns=TRIGGER_INTERVAL_NS):
    return protocol_duration_s(m, trigger_interval_ns) / SECONDS_PER_YEAR


def params_row(num_vertices, num_edges, k, epsilon_b, P=COLOR_COUNT, subset_size=EDGE_SUBSET_SIZE):
    """Protocol sizing for one security level

    Returns:
        dict with N, m, delta_s, epsilon_b and the resources of the run
    """
    N = required_bits(P, subset_size, epsilon_b)
    m = rounds_for_soundness(num_edges, k)
    size = resource_bytes(N, num_vertices, m)
    log_delta = soundness_log(num_edges, m)
    return {
        "vertices": num_vertices,
        "edges": num_edges,
        "k": k,
        "epsilon_b": epsilon_b,
        "N": N,
        "achieved_epsilon_b": binding_epsilon(P, subset_size, N),
        "m": m,
        "delta_s": math.exp(log_delta),
        "log_delta_s": log_delta,
        "resource_bytes": size,
        "resource_mib": size / MIB,
        "duration_s": protocol_duration_s(m),
        "prior_work_rounds": prior_work_rounds(k, num_edges),
        "prior_work_years": protocol_duration_years(prior_work_rounds(k, num_edges)),
    }


def params_table(num_vertices, num_edges, ks, epsilon_b):
    """One params_row per k"""
    return [params_row(num_vertices, num_edges, k, epsilon_b) for k in ks]
