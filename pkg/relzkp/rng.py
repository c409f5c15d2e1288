import numpy as np

# Stream identifiers, first element of every spawn key
PROVER_TAPE_STREAM = 0
V1_STREAM = 1
V2_STREAM = 2
JITTER_STREAM = 3
CLOCK_STREAM = 4
PROVER_PRIVATE_STREAM = 5
SIMULATOR_STREAM = 6
GRAPH_STREAM = 7


class SeededRng:
    """Deterministic random stream

    Every stream is a numpy PCG64 generator whose seed sequence is keyed by the
    run seed and a tuple of integers (role, round index, ...). Two streams with
    different keys share no state, so rounds can be replayed or computed out of
    order and still produce identical values.

    Instances are single-owner: they may be moved between processes but never
    drawn from concurrently.

    Attributes:
        seed: the run seed
        key: the spawn key identifying this stream
    """

    def __init__(self, seed, *key):
        """Initialize the stream

        Args:
            seed: non-negative integer run seed
            *key: non-negative integers identifying the stream
        """
        if seed is None or int(seed) < 0:
            raise ValueError("A non-negative seed is mandatory")
        self.seed = int(seed)
        self.key = tuple(int(k) for k in key)
        sequence = np.random.SeedSequence(self.seed, spawn_key=self.key)
        self._gen = np.random.Generator(np.random.PCG64(sequence))

    def __repr__(self):
        return f"SeededRng(seed={self.seed}, key={self.key})"

    def child(self, *key):
        """Derive an independent stream below this one"""
        return SeededRng(self.seed, *(self.key + tuple(key)))

    def bytes(self, length):
        return self._gen.bytes(length)

    def integers(self, low, high=None, size=None):
        """Uniform integers in [low, high), numpy semantics"""
        values = self._gen.integers(low, high, size=size)
        if size is None:
            return int(values)
        return values

    def random(self, size=None):
        values = self._gen.random(size)
        if size is None:
            return float(values)
        return values

    def normal(self, loc=0.0, scale=1.0, size=None):
        values = self._gen.normal(loc, scale, size)
        if size is None:
            return float(values)
        return values

    def uniform(self, low, high, size=None):
        values = self._gen.uniform(low, high, size)
        if size is None:
            return float(values)
        return values
