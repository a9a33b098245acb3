"""Deterministic per-cell seeds derived from one master seed."""

_MASK = (1 << 64) - 1


def splitmix64(x):
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def derive_seed(master, *coords):
    """Mix integer coordinates into ``master`` one splitmix64 round at a time."""
    s = splitmix64(int(master) & _MASK)
    for c in coords:
        s = splitmix64(s ^ (int(c) & _MASK))
    return s
