"""Stateless splitmix64 stream.

Element ``k`` of the stream for ``seed`` is ``mix(seed + (k + 1) * GOLDEN)``
computed modulo 2**64, where ``mix`` is the splitmix64 finalizer::

    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    z =  z ^ (z >> 31)

Every value depends only on ``(seed, k)``, so sequences are identical on every
platform and independent of numpy's generator versions.
"""
import numpy as np

GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_MASK64 = (1 << 64) - 1


def mix64(z: int) -> int:
    z &= _MASK64
    z = ((z ^ (z >> 30)) * _M1) & _MASK64
    z = ((z ^ (z >> 27)) * _M2) & _MASK64
    return z ^ (z >> 31)


def splitmix64(seed: int, count: int, start: int = 0) -> np.ndarray:
    """Return elements ``start .. start+count-1`` of the stream as uint64."""
    k = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed & _MASK64) + k * np.uint64(GOLDEN)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
        z = z ^ (z >> np.uint64(31))
    return z


def permutation(seed: int, n: int) -> np.ndarray:
    """Seeded shuffle of ``range(n)``: indices sorted by their stream value (ties by index)."""
    keys = splitmix64(seed, n)
    return np.argsort(keys, kind="stable")
