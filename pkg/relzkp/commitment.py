"""
Subset relativistic bit commitment over F_Q = GF(2^N).

Commit: a = x*y - b, where x is the verifier query, b the prover key and y a
color embedded in F_Q. Reveal: the verifier receives b and recovers
y = (a + b) / x, accepting only values that decode to a color.
"""

import logging
import math

from dataclasses import dataclass

from relzkp.errors import InvalidParameter, InvalidQuery, RevealRejected
from relzkp.field import FieldElement, add, color_of, embed_color, inv, mul

logger = logging.getLogger(__name__)

# Number of colors of the committed alphabet F_P
COLOR_COUNT = 3
# Size of the revealed subset D (the two endpoints of the challenged edge)
EDGE_SUBSET_SIZE = 2


def _check_dyadic(epsilon_b):
    if not 0 < epsilon_b <= 1:
        raise InvalidParameter(f"Binding parameter {epsilon_b} not in (0, 1]")
    mantissa, _ = math.frexp(epsilon_b)
    if mantissa != 0.5:
        raise InvalidParameter(f"Binding parameter {epsilon_b} is not a power of two")


def required_bits(P, subset_size, epsilon_b):
    """Smallest field width making the subset commitment epsilon_b sum-binding

    N >= 7 + log|D| + log(P-1) + 2|D| log P - 3 log(epsilon_b), all logs base 2.

    Args:
        P: alphabet size, at least 2
        subset_size: |D|, at least 1
        epsilon_b: binding parameter in (0, 1]

    Returns:
        the integer N
    """
    if P < 2 or subset_size < 1:
        raise InvalidParameter("P >= 2 and |D| >= 1 are required")
    if not 0 < epsilon_b <= 1:
        raise InvalidParameter(f"Binding parameter {epsilon_b} not in (0, 1]")
    value = (
        7
        + math.log2(subset_size)
        + math.log2(P - 1)
        + 2 * subset_size * math.log2(P)
        - 3 * math.log2(epsilon_b)
    )
    # Rounding first keeps exact integers like 105.0000000001 from jumping up
    return math.ceil(round(value, 9))


def binding_epsilon(P, subset_size, Q_bits):
    """Sum-binding parameter of the subset commitment for a given field width

    epsilon_b = 4 [2|D|(P-1) P^(2|D|)]^(1/3) / Q^(1/3), evaluated in log space.
    Values above 1 mean the width certifies nothing.
    """
    if P < 2 or subset_size < 1:
        raise InvalidParameter("P >= 2 and |D| >= 1 are required")
    if Q_bits <= math.log2(P):
        raise InvalidParameter(f"Q = 2^{Q_bits} must exceed P = {P}")
    log_value = 2 + (
        math.log2(2 * subset_size * (P - 1)) + 2 * subset_size * math.log2(P) - Q_bits
    ) / 3
    return 2.0**log_value


def string_binding_epsilon(P, Q_bits):
    """Sum-binding parameter 4P / Q^(1/3) of a single F_P-string commitment"""
    if Q_bits <= math.log2(P):
        raise InvalidParameter(f"Q = 2^{Q_bits} must exceed P = {P}")
    return 2.0 ** (2 + math.log2(P) - Q_bits / 3)


def string_required_bits(P, epsilon_b):
    """Smallest N with 4P / 2^(N/3) <= epsilon_b"""
    if P < 2 or not 0 < epsilon_b <= 1:
        raise InvalidParameter("P >= 2 and epsilon_b in (0, 1] are required")
    value = 6 + 3 * math.log2(P) - 3 * math.log2(epsilon_b)
    return math.ceil(round(value, 9))


@dataclass(frozen=True)
class CommitmentParams:
    """Sizing of the commitment scheme

    Attributes:
        P: size of the committed alphabet
        Q_bits: N = log Q, the field width
        subset_size: |D|, number of values opened together
        epsilon_b: target binding parameter, a power of two
    """

    P: int = COLOR_COUNT
    Q_bits: int = 112
    subset_size: int = EDGE_SUBSET_SIZE
    epsilon_b: float = 2.0**-32

    def __post_init__(self):
        if self.P < 2 or self.subset_size < 1:
            raise InvalidParameter("P >= 2 and |D| >= 1 are required")
        if self.P >= 2**self.Q_bits:
            raise InvalidParameter(f"P = {self.P} must be smaller than Q = 2^{self.Q_bits}")
        _check_dyadic(self.epsilon_b)

    @classmethod
    def for_epsilon(cls, epsilon_b, P=COLOR_COUNT, subset_size=EDGE_SUBSET_SIZE):
        """Parameters with the smallest width reaching epsilon_b"""
        return cls(P, required_bits(P, subset_size, epsilon_b), subset_size, epsilon_b)

    @property
    def epsilon_log2(self):
        return int(math.log2(self.epsilon_b))

    @property
    def required_bits(self):
        return required_bits(self.P, self.subset_size, self.epsilon_b)

    @property
    def achieved_epsilon(self):
        return binding_epsilon(self.P, self.subset_size, self.Q_bits)

    @property
    def binding_certified(self):
        return self.Q_bits >= self.required_bits

    @property
    def vacuous(self):
        """The achieved bound exceeds 1 and binds nothing"""
        return self.achieved_epsilon > 1

    def certify(self):
        """Return self if the width meets the sum-binding bound, raise otherwise"""
        if not self.binding_certified:
            raise InvalidParameter(
                f"N = {self.Q_bits} bits is below the {self.required_bits} bits "
                f"needed for epsilon_b = 2^{self.epsilon_log2}"
            )
        return self

    def to_dict(self):
        return {
            "P": self.P,
            "Q_bits": self.Q_bits,
            "subset_size": self.subset_size,
            "epsilon_b": self.epsilon_b,
            "required_bits": self.required_bits,
            "achieved_epsilon": self.achieved_epsilon,
            "binding_certified": self.binding_certified,
            "vacuous": self.vacuous,
        }


def commit(x, y, b):
    """Commit to color y under query x and key b

    Args:
        x: nonzero FieldElement sent by the verifier
        y: color in {0, 1, 2}
        b: FieldElement key of the prover

    Returns:
        the commitment a = x*y - b
    """
    if not x.value:
        raise InvalidQuery("The query must be nonzero")
    return add(mul(x, embed_color(y, x.spec)), b)


def decode(x, a, b):
    """y* = (a + b) / x as a raw field element"""
    if not x.value:
        raise InvalidQuery("The query must be nonzero")
    return mul(add(a, b), inv(x))


def reveal_verify(x, a, b, claimed_y=None):
    """Open a commitment

    Args:
        x: the query used at commit time
        a: the commitment
        b: the revealed key
        claimed_y: color the prover claims, checked when given

    Returns:
        the decoded color

    Raises:
        RevealRejected: the opening is not a color, or not the claimed one
        InvalidQuery: x is zero
    """
    opened = decode(x, a, b)
    color = color_of(opened)
    if color is None:
        raise RevealRejected(f"Opened value {opened.value:#x} is not a color")
    if claimed_y is not None and color != claimed_y:
        raise RevealRejected(f"Opened color {color} differs from claimed {claimed_y}")
    return color


@dataclass(frozen=True)
class CommitmentRecord:
    """One vertex commitment: query, commitment, key and color

    Attributes:
        x: query
        a: commitment
        b: key
        y: color
    """

    x: FieldElement
    a: FieldElement
    b: FieldElement
    y: int

    @classmethod
    def create(cls, x, y, b):
        return cls(x, commit(x, y, b), b, y)

    def verify(self):
        return reveal_verify(self.x, self.a, self.b, self.y)


def equivocation_outcomes(spec, color, target, guess, key=None):
    """What a fixed-offset equivocating reveal decodes to, for every query

    P1 commits `color` honestly. P2, who never sees x, shifts the key by
    guess * (target - color) hoping guess == x. The map returned holds, for
    every nonzero x, the color the verifier decodes or None on rejection.
    Exactly one x yields `target` and exactly one other x yields the third
    color; every remaining x is rejected.

    Args:
        spec: the field
        color: committed color
        target: color P2 tries to open
        guess: nonzero guess of x
        key: honest key b, zero when omitted

    Returns:
        dict from x value to decoded color or None
    """
    if target == color:
        raise InvalidParameter("The target color must differ from the committed one")
    if not guess.value:
        raise InvalidQuery("The guess of x must be nonzero")
    key = spec.zero if key is None else key
    shift = mul(guess, add(embed_color(target, spec), embed_color(color, spec)))
    forged_key = add(key, shift)

    outcomes = {}
    for x in spec.elements():
        if not x.value:
            continue
        a = commit(x, color, key)
        outcomes[x.value] = color_of(decode(x, a, forged_key))
    return outcomes
