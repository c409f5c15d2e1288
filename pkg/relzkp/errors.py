"""
Exceptions raised by the relzkp modules.

Protocol verdicts are never exceptions: a rejected round is a `Verdict` value.
The classes below signal misuse, malformed input or impossible requests.
"""


class RelzkpError(Exception):
    """Base class of every relzkp exception"""


class InvalidParameter(RelzkpError, ValueError):
    """A numeric parameter is outside its allowed range"""


class ConfigError(RelzkpError, ValueError):
    """A configuration document is malformed or inconsistent"""


class FieldSpecMismatch(RelzkpError, ValueError):
    """Two field elements belong to different fields"""


class DivisionByZero(RelzkpError, ZeroDivisionError):
    """Inversion of the zero element"""


class GenerationFailed(RelzkpError, RuntimeError):
    """The graph generator exhausted its restart budget"""


class InvalidColoring(RelzkpError, ValueError):
    """A coloring does not assign a color in {0, 1, 2} to every vertex"""


class InvalidGraph(RelzkpError, ValueError):
    """A graph cannot be used for the requested operation"""


class InvalidQuery(RelzkpError, ValueError):
    """A commitment query x is zero"""


class RevealRejected(RelzkpError, ValueError):
    """An opened commitment does not decode to an admissible color"""


class NotAProver(RelzkpError, ValueError):
    """Prover operations were requested on a graph without witness"""


class ProtocolViolation(RelzkpError, RuntimeError):
    """A role received a message that breaks the round structure"""


class InvalidChallenge(RelzkpError, ValueError):
    """The challenged pair of vertices is not an edge of the graph"""


class TooLargeToEnumerate(RelzkpError, ValueError):
    """Exact enumeration was requested on an instance too large for it"""


class DomainMismatch(RelzkpError, ValueError):
    """Two distributions are defined over different outcome universes"""


class TransportError(RelzkpError, IOError):
    """The peer of a socket transport went away"""


class FrameError(RelzkpError, ValueError):
    """A wire frame is malformed or oversized"""
