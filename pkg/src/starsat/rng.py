"""Deterministic pseudo-randomness for samplers and experiments.

Everything random in this package draws from one documented generator so
that runs are reproducible across machines and can be re-derived from the
numbers recorded in experiment output.

The generator is SplitMix64 used in counter mode: a (master, stream) seed
pair is folded into a 64-bit stream base, and the i-th output word is

    word(i) = mix64(base + (i + 1) * GOLDEN)   (mod 2**64)

where mix64 is the standard SplitMix64 finalizer and GOLDEN is the 64-bit
golden-ratio constant.  Because each word depends only on (base, i), the
same stream can be produced one word at a time or as a vectorized numpy
block, and the two agree bit for bit.

Floats in [0, 1) take the top 53 bits of a word: (word >> 11) * 2**-53.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

RNG_ID = "splitmix64-v1"

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_FLOAT_SCALE = 2.0 ** -53


def mix64(z: int) -> int:
    """SplitMix64 finalizer: a fixed 64-bit bijective mixing function."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


@dataclass(frozen=True)
class RngSeed:
    """A (master, stream) pair naming one reproducible random stream.

    The master seed identifies a whole experiment; the stream index carves
    out independent substreams (one per trial, per sampler, ...) without
    the caller having to invent unrelated master seeds.
    """

    master: int
    stream: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.master <= _MASK64:
            raise ValueError(f"master seed must be a u64, got {self.master}")
        if not 0 <= self.stream <= _MASK64:
            raise ValueError(f"stream index must be a u64, got {self.stream}")

    def with_stream(self, stream: int) -> "RngSeed":
        return RngSeed(self.master, stream)


def stream_base(seed: RngSeed) -> int:
    """Fold a (master, stream) pair into the 64-bit base of its stream."""
    return mix64((mix64(seed.master) + (seed.stream + 1) * _GOLDEN) & _MASK64)


def word_at(base: int, index: int) -> int:
    """The index-th raw u64 of the stream with the given base."""
    return mix64((base + (index + 1) * _GOLDEN) & _MASK64)


def u64_block(base: int, start: int, count: int) -> np.ndarray:
    """Vectorized stream words [start, start + count) as a uint64 array.

    Bit-identical to calling word_at for each index in the range.
    """
    if count < 0:
        raise ValueError(f"count must be nonnegative, got {count}")
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    z = np.uint64(base) + idx * np.uint64(_GOLDEN)  # wraps mod 2**64
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def float_block(base: int, start: int, count: int) -> np.ndarray:
    """Vectorized stream floats in [0, 1), top 53 bits of each word."""
    words = u64_block(base, start, count)
    return (words >> np.uint64(11)).astype(np.float64) * _FLOAT_SCALE


class Stream:
    """Sequential view of one random stream.

    Thin stateful wrapper over word_at: it just remembers the next position.
    next_below uses rejection sampling, so it may consume several words;
    the exact consumption pattern is part of the reproducibility contract.
    """

    __slots__ = ("base", "position")

    def __init__(self, seed: RngSeed | int, stream: int = 0):
        if isinstance(seed, int):
            seed = RngSeed(seed, stream)
        self.base = stream_base(seed)
        self.position = 0

    def next_u64(self) -> int:
        w = word_at(self.base, self.position)
        self.position += 1
        return w

    def next_float(self) -> float:
        """Uniform float in [0, 1)."""
        return (self.next_u64() >> 11) * _FLOAT_SCALE

    def next_below(self, bound: int) -> int:
        """Uniform integer in [0, bound), free of modulo bias."""
        if bound <= 0:
            raise ValueError(f"bound must be positive, got {bound}")
        threshold = ((1 << 64) // bound) * bound
        while True:
            w = self.next_u64()
            if w < threshold:
                return w % bound

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.next_below(i + 1)
            items[i], items[j] = items[j], items[i]


def fnv1a64(data: bytes, seed: int = 0xCBF29CE484222325) -> int:
    """FNV-1a 64-bit hash, used for content hashes and seed derivation."""
    h = seed & _MASK64
    for byte in data:
        h ^= byte
        h = (h * 0x100000001B3) & _MASK64
    return h
