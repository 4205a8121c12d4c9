"""Seedable shift-register RNG with a fixed published algorithm.

The generator is xorshift64* (Vigna): the 64-bit state s is updated by
    s ^= s >> 12;  s ^= s << 25;  s ^= s >> 27
and the output is (s * 2685821657736338717) mod 2^64. Uniform doubles take
the top 53 bits of the output. The initial state is one splitmix64 step of
the seed (so seed 0 is usable). Per-cell seeds for sweeps are derived by
xoring the run seed with an FNV-1a hash of the cell label. Everything here
is integer arithmetic, so any language reproduces the streams bit-for-bit.
"""

MASK = (1 << 64) - 1


def splitmix64(x):
    x = (x + 0x9E3779B97F4A7C15) & MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK
    return x ^ (x >> 31)


def fnv1a64(data):
    h = 0xCBF29CE484222325
    for b in data:
        h ^= b
        h = (h * 0x100000001B3) & MASK
    return h


def cell_seed(seed, *labels):
    """Derive a per-cell seed: seed xor hash of the printed labels."""
    text = ":".join(repr(x) for x in labels)
    return (seed & MASK) ^ fnv1a64(text.encode("ascii"))


class Xorshift64Star:
    def __init__(self, seed):
        self.state = splitmix64(seed & MASK)
        if self.state == 0:
            self.state = 0x9E3779B97F4A7C15

    def next_u64(self):
        s = self.state
        s ^= s >> 12
        s = (s ^ (s << 25)) & MASK
        s ^= s >> 27
        self.state = s
        return (s * 2685821657736338717) & MASK

    def uniform(self):
        """Uniform in [0, 1) with 53-bit resolution."""
        return (self.next_u64() >> 11) * (2.0 ** -53)

    def uniform_symmetric(self, half_width):
        """Uniform in [-half_width, half_width], rejection-free scaling."""
        return (2.0 * self.uniform() - 1.0) * half_width

    def normal_pair(self):
        """Two standard normals by Box-Muller."""
        import math
        u1 = self.uniform()
        while u1 == 0.0:
            u1 = self.uniform()
        u2 = self.uniform()
        rad = math.sqrt(-2.0 * math.log(u1))
        return rad * math.cos(2.0 * math.pi * u2), rad * math.sin(2.0 * math.pi * u2)
