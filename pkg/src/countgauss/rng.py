"""Seeded, counter-based random numbers.

Every random object in the package is generated from a 64-bit seed through
SplitMix64: output ``i`` (1-based) of a stream with seed ``s`` is
``fmix64(s + i * GOLDEN)`` modulo 2**64.  Because outputs are a pure function
of (seed, position) the stream can be evaluated in vectorized blocks and is
reproducible across platforms, runs, and thread counts.

Normals use the inverse CDF (``scipy.special.ndtri``) of the 52-bit uniform
``((x >> 12) + 0.5) / 2**52``, one 64-bit draw per normal; with 52 bits the
half-offset keeps the result strictly inside (0, 1) in double precision.

Trial ``t`` of a Monte-Carlo run uses ``SeededRng(mix64(master_seed, t))``.
"""
import numpy as np
from scipy.special import ndtri

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_TRIAL_MUL = 0xD1B54A32D192ED03

STREAM = "splitmix64/ndtri"

_U64 = np.uint64


def _fmix(z):
    # SplitMix64 finalizer on a uint64 array (wrap-around arithmetic)
    z = (z ^ (z >> _U64(30))) * _U64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> _U64(27))) * _U64(0x94D049BB133111EB)
    return z ^ (z >> _U64(31))


def fmix64(x: int) -> int:
    """Scalar SplitMix64 finalizer on a Python int."""
    x &= MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def mix64(master: int, t: int) -> int:
    """Child seed for trial ``t`` of a run seeded with ``master``."""
    return fmix64((master & MASK64) ^ fmix64(((t + 1) * _TRIAL_MUL) & MASK64))


def stream_bits(seeds, count, offset=0):
    """Raw draws ``offset+1 .. offset+count`` of several streams at once.

    Returns a ``(len(seeds), count)`` uint64 array; row ``r`` equals what
    ``SeededRng(seeds[r])`` would produce after skipping ``offset`` draws.
    """
    seeds = np.asarray(seeds, dtype=np.uint64).reshape(-1, 1)
    pos = np.arange(offset + 1, offset + count + 1, dtype=np.uint64).reshape(1, -1)
    return _fmix(seeds + pos * _U64(GOLDEN))


def bits_to_uniform(bits):
    return ((bits >> _U64(12)).astype(np.float64) + 0.5) * (1.0 / 4503599627370496.0)


def bits_to_normal(bits):
    return ndtri(bits_to_uniform(bits))


class SeededRng:
    """A SplitMix64 stream: a 64-bit seed plus a position counter.

    Each request consumes a contiguous block of the stream, so identical
    (seed, request sequence) pairs give identical output.
    """

    stream = STREAM

    def __init__(self, seed: int):
        if isinstance(seed, SeededRng):
            seed = seed.seed
        self.seed = int(seed) & MASK64
        self.position = 0

    def __repr__(self):
        return f"SeededRng(seed={self.seed}, position={self.position})"

    def bits64(self, n: int) -> np.ndarray:
        n = int(n)
        if n < 0:
            raise ValueError("negative draw count")
        out = stream_bits([self.seed], n, self.position)[0]
        self.position += n
        return out

    def uniform(self, size=None):
        shape = () if size is None else size
        n = int(np.prod(shape, dtype=np.int64))
        u = bits_to_uniform(self.bits64(n))
        return float(u[0]) if size is None else u.reshape(shape)

    def normal(self, size=None):
        shape = () if size is None else size
        n = int(np.prod(shape, dtype=np.int64))
        z = bits_to_normal(self.bits64(n))
        return float(z[0]) if size is None else z.reshape(shape)

    def integers(self, high: int, size: int) -> np.ndarray:
        """Values in ``[0, high)`` from one draw each, reduced modulo ``high``."""
        if high < 1:
            raise ValueError("high must be >= 1")
        return (self.bits64(size) % _U64(high)).astype(np.int64)

    def signs(self, size: int) -> np.ndarray:
        """+1/-1 from the top bit of one draw each."""
        top = (self.bits64(size) >> _U64(63)).astype(np.int64)
        return 1 - 2 * top

    def permutation(self, n: int) -> np.ndarray:
        # stable argsort of random keys; ties are impossible in practice
        return np.argsort(self.bits64(n), kind="stable")

    def next_seed(self) -> int:
        return int(self.bits64(1)[0])

    def child(self, t: int) -> "SeededRng":
        return SeededRng(mix64(self.seed, t))


def as_rng(rng) -> SeededRng:
    if isinstance(rng, SeededRng):
        return rng
    if rng is None:
        raise ValueError("an explicit seed or SeededRng is required")
    return SeededRng(int(rng))
