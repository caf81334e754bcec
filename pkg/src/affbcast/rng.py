"""Seeded random streams shared by the simulator and its compiled kernel.

The generator is SplitMix64. It was picked because it is trivial to
implement identically in Python and C, which lets the pure engine and the
compiled kernel consume bit-identical streams. Substreams for independent
purposes (topology, source draw, injection, contention) are derived from a
master seed with keyed blake2b so changing one knob never perturbs the
others. This generator identity is part of the reproducibility contract:
changing it changes every seeded output.
"""

import hashlib

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_TWO53 = 1.0 / 9007199254740992.0


class SplitMix64:
    """SplitMix64 generator over 64-bit state."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def random(self) -> float:
        """Uniform double in [0, 1) built from the top 53 bits."""
        return (self.next_u64() >> 11) * _TWO53

    def randrange(self, n: int) -> int:
        """Integer in [0, n); floor(u*n), matching the kernel's C cast."""
        return int(self.random() * n)

    def bernoulli(self, p: float) -> bool:
        return self.random() < p


def derive_seed(master: int, label: str) -> int:
    """Stable 64-bit substream seed for (master, label)."""
    key = (master & _MASK).to_bytes(8, "little")
    digest = hashlib.blake2b(label.encode("utf-8"), digest_size=8, key=key).digest()
    return int.from_bytes(digest, "little")
