"""Seeded, labelled random streams feeding the harmonic constructions.

Every primitive sequence (Poisson arrivals, frequency uniforms, Rayleigh
amplitudes, phases, shot-noise exponentials) lives on its own labelled
substream of one master seed. Regenerating a substream restarts its
sequence, which is what couples truncation levels on a common probability
space: enlarging the arrival horizon extends the arrival sequence without
disturbing the draws already consumed by retained terms.
"""

from __future__ import annotations

import hashlib
import math

import numpy as np

_U64 = (1 << 64) - 1


def _label_entropy(label: str) -> list[int]:
    digest = hashlib.sha256(label.encode("utf-8")).digest()
    return [int.from_bytes(digest[i : i + 8], "little") for i in (0, 8, 16, 24)]


class RandomStream:
    """Reproducible random source identified by (seed, label).

    Equal (seed, label) pairs replay bit-identical sequences; distinct
    labels give statistically independent substreams of the same seed.
    A stream is single-owner: share seeds and labels, not instances.
    """

    def __init__(self, seed: int, label: str = ""):
        self.seed = int(seed) & _U64
        self.label = str(label)
        self._generator: np.random.Generator | None = None

    def __repr__(self):
        return f"RandomStream(seed={self.seed}, label={self.label!r})"

    @property
    def generator(self) -> np.random.Generator:
        if self._generator is None:
            entropy = [self.seed] + _label_entropy(self.label)
            self._generator = np.random.default_rng(np.random.SeedSequence(entropy))
        return self._generator

    def child(self, name: str) -> "RandomStream":
        """Fresh substream labelled `<label>/<name>` under the same seed."""
        sep = "/" if self.label else ""
        return RandomStream(self.seed, f"{self.label}{sep}{name}")

    def uniform(self, size=None):
        """Uniform draws on the open interval (0, 1); zeros are redrawn."""
        g = self.generator
        if size is None:
            u = g.random()
            while u == 0.0:
                u = g.random()
            return u
        u = g.random(size)
        mask = u == 0.0
        while mask.any():
            u[mask] = g.random(int(mask.sum()))
            mask = u == 0.0
        return u

    def exponential(self, size=None):
        """Unit-mean exponentials via inversion of the open uniform."""
        return -np.log(self.uniform(size))

    def rayleigh(self, size=None):
        """Standard Rayleigh (density r*exp(-r^2/2)) via r = sqrt(-2 ln u)."""
        return np.sqrt(-2.0 * np.log(self.uniform(size)))

    def phase(self, size=None):
        """Phases uniform on [0, 2*pi)."""
        return 2.0 * np.pi * self.generator.random(size)

    def normal(self, size=None):
        return self.generator.standard_normal(size)


def rayleigh_from_uniform(u):
    """Inversion map u -> sqrt(-2 ln u) used by the Rayleigh draws."""
    return np.sqrt(-2.0 * np.log(u))


def exponential_from_uniform(u):
    """Inversion map u -> -ln u used by the exponential draws."""
    return -np.log(u)


def poisson_arrivals(stream, horizon):
    """Unit-rate Poisson arrival times up to `horizon`.

    Returns (arrivals, next_arrival): the cumulated unit-mean exponential
    gaps that land at or below `horizon` (possibly empty) and the first
    arrival beyond it. The arrival count is len(arrivals) ~ Poisson(horizon).
    """
    horizon = float(horizon)
    if not horizon > 0.0:
        raise ValueError("poisson_arrivals requires a positive horizon")
    block = max(16, int(horizon + 10.0 * math.sqrt(horizon) + 10.0))
    times = np.cumsum(stream.exponential(block))
    while times[-1] <= horizon:
        more = stream.exponential(block)
        times = np.concatenate([times, times[-1] + np.cumsum(more)])
    idx = int(np.searchsorted(times, horizon, side="right"))
    return times[:idx].copy(), float(times[idx])
