import logging

from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import combinations

from relzkp.errors import DivisionByZero, FieldSpecMismatch, InvalidParameter

logger = logging.getLogger(__name__)


# Reduction polynomials of the shipped presets. The 112 bit preset is searched
# on first use (see find_low_weight_irreducible) and cached.
PRESET_POLYNOMIALS = {
    3: 0b1011,  # x^3 + x + 1
    4: 0b10011,  # x^4 + x + 1
    8: 0x11B,  # x^8 + x^4 + x^3 + x + 1
    16: 0x1100B,  # x^16 + x^12 + x^3 + x + 1
    32: 0x100400007,  # x^32 + x^22 + x^2 + x + 1
    112: None,
}

# Widths up to this value use precomputed multiplication and inverse tables
TABLE_MAX_WIDTH = 8

# Colors y in F_3 are embedded as the field elements with these integer values
COLOR_VALUES = (0, 1, 2)


def clmul(a, b):
    """Carry-less product of two polynomials over GF(2) stored as integers

    Small operands are processed bit by bit, large ones with a 4 bit window.

    Args:
        a: first polynomial
        b: second polynomial

    Returns:
        the unreduced product
    """
    if a < b:
        a, b = b, a
    if b.bit_length() <= 8:
        acc = 0
        while b:
            if b & 1:
                acc ^= a
            a <<= 1
            b >>= 1
        return acc

    window = [0, a]
    for k in range(2, 16):
        window.append((window[k >> 1] << 1) ^ (a if k & 1 else 0))

    acc = 0
    shift = ((b.bit_length() + 3) // 4) * 4
    while shift:
        shift -= 4
        acc = (acc << 4) ^ window[(b >> shift) & 0xF]
    return acc


def poly_mod(a, f):
    """Remainder of a divided by f over GF(2)"""
    df = f.bit_length()
    while a.bit_length() >= df:
        a ^= f << (a.bit_length() - df)
    return a


def poly_gcd(a, b):
    while b:
        a, b = b, poly_mod(a, b)
    return a


def _prime_factors(n):
    factors = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            factors.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        factors.append(n)
    return factors


def is_irreducible(poly):
    """Rabin irreducibility test over GF(2)

    f of degree n is irreducible iff x^(2^n) = x mod f and, for every prime p
    dividing n, gcd(x^(2^(n/p)) - x, f) = 1.

    Args:
        poly: the polynomial, bit i holding the coefficient of x^i

    Returns:
        True if the polynomial is irreducible, False otherwise
    """
    n = poly.bit_length() - 1
    if n < 1:
        return False
    if n == 1:
        return True

    # powers[k] = x^(2^k) mod f
    powers = [poly_mod(0b10, poly)]
    for _ in range(n):
        h = powers[-1]
        powers.append(poly_mod(clmul(h, h), poly))

    if powers[n] != 0b10:
        return False
    for p in _prime_factors(n):
        if poly_gcd(poly, powers[n // p] ^ 0b10) != 1:
            return False
    return True


@lru_cache(maxsize=None)
def find_low_weight_irreducible(width_bits):
    """Find the lowest weight irreducible polynomial of a given degree

    Trinomials x^n + x^k + 1 are tried first with k ascending, then pentanomials
    x^n + x^a + x^b + x^c + 1 with (a, b, c) in lexicographic order. The search
    order is fixed, so the result is the same on every machine.

    Args:
        width_bits: the degree n

    Returns:
        the polynomial as an integer
    """
    n = width_bits
    top = (1 << n) | 1
    for k in range(1, n):
        candidate = top | (1 << k)
        if is_irreducible(candidate):
            logger.debug(f"Irreducible trinomial of degree {n}: {candidate:#x}")
            return candidate

    for a in range(3, n):
        for b, c in combinations(range(a - 1, 0, -1), 2):
            candidate = top | (1 << a) | (1 << b) | (1 << c)
            if is_irreducible(candidate):
                logger.debug(f"Irreducible pentanomial of degree {n}: {candidate:#x}")
                return candidate

    raise InvalidParameter(f"No low weight irreducible polynomial of degree {n}")


@dataclass(frozen=True)
class FieldSpec:
    """A binary extension field GF(2^N)

    Elements are integers whose bit i is the coefficient of x^i. Arithmetic is
    carry-less multiplication followed by reduction modulo `reduction_poly`.

    Attributes:
        width_bits: N, so that the field has Q = 2^N elements
        reduction_poly: irreducible polynomial of degree exactly N
    """

    width_bits: int
    reduction_poly: int

    def __post_init__(self):
        if self.width_bits < 1:
            raise InvalidParameter("Field width must be positive")
        if self.reduction_poly.bit_length() - 1 != self.width_bits:
            raise InvalidParameter(
                f"Reduction polynomial {self.reduction_poly:#x} has not degree {self.width_bits}"
            )
        if not self.reduction_poly & 1:
            raise InvalidParameter("Reduction polynomial must have constant term 1")

    def __repr__(self):
        return f"GF(2^{self.width_bits}) mod {self.reduction_poly:#x}"

    @classmethod
    def preset(cls, width_bits):
        """Return one of the shipped fields

        Args:
            width_bits: one of the keys of PRESET_POLYNOMIALS

        Returns:
            the FieldSpec
        """
        return _preset(width_bits)

    @classmethod
    def from_config(cls, field_config, check=True):
        """Create a field from a {width_bits, reduction_poly} dictionary

        Args:
            field_config: the parsed configuration; reduction_poly is a hex string
            check: run the irreducibility test

        Returns:
            a new FieldSpec
        """
        poly = field_config["reduction_poly"]
        if isinstance(poly, str):
            poly = int(poly, 16)
        spec = cls(int(field_config["width_bits"]), poly)
        if check and not spec.self_test():
            raise InvalidParameter(f"{poly:#x} is not irreducible")
        return spec

    def to_config(self):
        return {"width_bits": self.width_bits, "reduction_poly": f"{self.reduction_poly:#x}"}

    def self_test(self):
        """Check that the reduction polynomial is irreducible"""
        return is_irreducible(self.reduction_poly)

    @property
    def order(self):
        """Q, the number of elements"""
        return 1 << self.width_bits

    @property
    def mask(self):
        return (1 << self.width_bits) - 1

    @property
    def byte_len(self):
        return (self.width_bits + 7) // 8

    @cached_property
    def _tail_exponents(self):
        # x^N = sum of x^e for e in these exponents (mod f)
        tail = self.reduction_poly ^ (1 << self.width_bits)
        return tuple(e for e in range(self.width_bits) if (tail >> e) & 1)

    @cached_property
    def _mul_table(self):
        q = self.order
        table = []
        for a in range(q):
            for b in range(q):
                table.append(self._reduce(clmul(a, b)))
        return table

    @cached_property
    def _inv_table(self):
        table = [0] * self.order
        for a in range(1, self.order):
            table[a] = self._euclid_inverse(a)
        return table

    def _reduce(self, p):
        n = self.width_bits
        mask = self.mask
        tail = self._tail_exponents
        while p >> n:
            high = p >> n
            p &= mask
            for e in tail:
                p ^= high << e
        return p

    def _euclid_inverse(self, a):
        # Extended Euclid over GF(2)[x] keeping a*g1 = u and a*g2 = v (mod f)
        u, v = a, self.reduction_poly
        g1, g2 = 1, 0
        while u != 1:
            if u == 0:
                raise DivisionByZero(f"{a:#x} is not invertible modulo {v:#x}")
            j = u.bit_length() - v.bit_length()
            if j < 0:
                u, v = v, u
                g1, g2 = g2, g1
                j = -j
            u ^= v << j
            g1 ^= g2 << j
        return poly_mod(g1, self.reduction_poly)

    # Integer level arithmetic, used by the hot protocol paths

    def add_int(self, a, b):
        return a ^ b

    def mul_int(self, a, b):
        if self.width_bits <= TABLE_MAX_WIDTH:
            return self._mul_table[(a << self.width_bits) | b]
        return self._reduce(clmul(a, b))

    def inv_int(self, a):
        if a == 0:
            raise DivisionByZero("Zero has no inverse")
        if self.width_bits <= TABLE_MAX_WIDTH:
            return self._inv_table[a]
        return self._euclid_inverse(a)

    # Element level API

    def element(self, value):
        """Wrap an integer as an element, checking its width"""
        value = int(value)
        if value < 0 or value >> self.width_bits:
            raise InvalidParameter(f"{value:#x} does not fit in {self.width_bits} bits")
        return FieldElement(value, self)

    @property
    def zero(self):
        return FieldElement(0, self)

    @property
    def one(self):
        return FieldElement(1, self)

    def elements(self):
        """Iterate over every element, tiny fields only"""
        for value in range(self.order):
            yield FieldElement(value, self)

    def from_bytes(self, data):
        """Decode a little-endian encoding of width ceil(N/8)"""
        if len(data) != self.byte_len:
            raise InvalidParameter(
                f"Expected {self.byte_len} bytes, received {len(data)}"
            )
        value = int.from_bytes(data, "little")
        if value >> self.width_bits:
            raise InvalidParameter("Unused high bits must be zero")
        return FieldElement(value, self)

    def from_hex(self, text):
        return self.from_bytes(bytes.fromhex(text))


@lru_cache(maxsize=None)
def _preset(width_bits):
    if width_bits not in PRESET_POLYNOMIALS:
        raise InvalidParameter(
            f"No field preset of width {width_bits}, choose one of {sorted(PRESET_POLYNOMIALS)}"
        )
    poly = PRESET_POLYNOMIALS[width_bits]
    if poly is None:
        poly = find_low_weight_irreducible(width_bits)
        logger.debug(f"Preset GF(2^{width_bits}) reduction polynomial {poly:#x}")
    return FieldSpec(width_bits, poly)


class FieldElement:
    """An element of GF(2^N)

    Immutable; operators +, -, *, / and unary - follow the field laws and raise
    FieldSpecMismatch when the operands belong to different fields.

    Attributes:
        value: the integer representation, bit i is the coefficient of x^i
        spec: the field the element belongs to
    """

    __slots__ = ("value", "spec")

    def __init__(self, value, spec):
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "spec", spec)

    def __setattr__(self, name, value):
        raise AttributeError("FieldElement is immutable")

    def __reduce__(self):
        return (FieldElement, (self.value, self.spec))

    def __repr__(self):
        return f"FieldElement({self.value:#x}, N={self.spec.width_bits})"

    def __eq__(self, other):
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.value == other.value and self.spec == other.spec

    def __hash__(self):
        return hash((self.value, self.spec.width_bits))

    def __int__(self):
        return self.value

    def __bool__(self):
        return self.value != 0

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __neg__(self):
        # Characteristic 2
        return self

    def __mul__(self, other):
        return mul(self, other)

    def __truediv__(self, other):
        return mul(self, inv(other))

    def to_bytes(self):
        return self.value.to_bytes(self.spec.byte_len, "little")

    def to_hex(self):
        return self.to_bytes().hex()


def _check_same_field(u, v):
    if u.spec is not v.spec and u.spec != v.spec:
        raise FieldSpecMismatch(f"{u.spec!r} and {v.spec!r} differ")


def add(u, v):
    """Coefficient-wise sum of two elements"""
    _check_same_field(u, v)
    return FieldElement(u.value ^ v.value, u.spec)


def sub(u, v):
    """Difference of two elements, identical to add in characteristic 2"""
    return add(u, v)


def mul(u, v):
    """Product of two elements reduced modulo the field polynomial"""
    _check_same_field(u, v)
    return FieldElement(u.spec.mul_int(u.value, v.value), u.spec)


def inv(u):
    """Multiplicative inverse

    Raises:
        DivisionByZero: u is the zero element
    """
    return FieldElement(u.spec.inv_int(u.value), u.spec)


def embed_color(color, spec):
    """Map a color in {0, 1, 2} to its field element"""
    if color not in COLOR_VALUES:
        raise InvalidParameter(f"{color} is not a color")
    return FieldElement(COLOR_VALUES[color], spec)


def color_of(element):
    """Inverse of embed_color; None when the element is not a color"""
    try:
        return COLOR_VALUES.index(element.value)
    except ValueError:
        return None


def sample_uniform(rng, spec):
    """Draw a uniform element of the field from a SeededRng"""
    data = rng.bytes(spec.byte_len)
    return FieldElement(int.from_bytes(data, "little") & spec.mask, spec)


def sample_uniform_nonzero(rng, spec):
    """Draw a uniform nonzero element by rejection"""
    while True:
        element = sample_uniform(rng, spec)
        if element.value:
            return element


def sample_vector(rng, spec, count, nonzero=False):
    """Draw `count` independent uniform elements with a single stream read

    Args:
        rng: the SeededRng
        spec: the field
        count: number of elements
        nonzero: reject zero draws (they are redrawn one at a time)

    Returns:
        a tuple of FieldElement
    """
    width = spec.byte_len
    mask = spec.mask
    data = rng.bytes(width * count)
    values = []
    for k in range(count):
        value = int.from_bytes(data[k * width : (k + 1) * width], "little") & mask
        while nonzero and value == 0:
            value = int.from_bytes(rng.bytes(width), "little") & mask
        values.append(FieldElement(value, spec))
    return tuple(values)
