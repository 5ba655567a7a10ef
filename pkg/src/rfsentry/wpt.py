"""Two-level Haar wavelet packet decomposition.

One filter-bank stage convolves with the orthonormal Haar pair

    g = (1/sqrt(2), 1/sqrt(2))     (low pass)
    h = (1/sqrt(2), -1/sqrt(2))    (high pass)

and downsamples by 2. Unlike a plain DWT, the packet transform splits the
detail branch again, so two levels yield four equal-width sub-bands
a1, d1 (from the low branch) and a2, d2 (from the high branch). With this
normalization the transform is orthogonal and preserves signal energy
exactly, which the tests rely on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import TooShort
from .signals import Signal

_SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class PacketSet:
    """The four level-2 packet coefficient sequences of one signal."""

    a1: np.ndarray
    d1: np.ndarray
    a2: np.ndarray
    d2: np.ndarray

    def packets(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        return (self.a1, self.d1, self.a2, self.d2)

    def energy(self) -> float:
        return float(sum(np.dot(p, p) for p in self.packets()))


def haar_step(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """One analysis stage: pairwise sum/difference scaled by 1/sqrt(2).

    A trailing odd sample is dropped; captures default to a multiple of 4 so
    this is a guard, not the common path.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.size < 2:
        raise TooShort(f"need at least 2 samples for a filter stage, got {x.size}")
    n = x.size - (x.size % 2)
    even = x[0:n:2]
    odd = x[1:n:2]
    return (even + odd) / _SQRT2, (even - odd) / _SQRT2


def wpt2(signal: Signal | np.ndarray) -> PacketSet:
    """Full two-level packet decomposition of a burst (or raw samples)."""
    x = signal.samples if isinstance(signal, Signal) else np.asarray(signal, dtype=np.float64)
    if x.size < 4:
        raise TooShort(f"two-level decomposition needs >= 4 samples, got {x.size}")
    low, high = haar_step(x)
    a1, d1 = haar_step(low)
    a2, d2 = haar_step(high)
    return PacketSet(a1=a1, d1=d1, a2=a2, d2=d2)
