"""Harmonic expansions: random-amplitude cosine sums and their sample paths.

Every generator realizes the same object, a finite list of
(amplitude, frequency, phase) terms with amplitude xi = sqrt(2*w)*R where
R is standard Rayleigh and w is a subordinator jump. The jump point
process runs at intensity spectral_mass * Lambda, which is the scaling
under which the synthesized law matches the closed-form characteristic
functions for every sigma0 (and reduces to the classical
sigma0*sqrt(Lambda^-1(Gamma_i))*R_i series when sigma0 = sqrt(2)).

Weights (the jumps w) are stored next to the amplitudes so the ergodic
diagnostics can evaluate the random time-average limits exactly.
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass, field

import numpy as np

from .levy import GammaLevyMeasure, truncation_for_variance
from .streams import RandomStream, poisson_arrivals

TWO_PI = 2.0 * np.pi

_BINARY_HEADER = struct.Struct("<ddq")  # t0, dt, n


@dataclass
class HarmonicExpansion:
    """A realized finite sum of cosines plus generation metadata.

    amplitudes, frequencies, phases and weights are equal-length arrays;
    amplitudes satisfy xi_i = sqrt(2 * weights_i) * R_i for the Rayleigh
    draw R_i that produced them.
    """

    amplitudes: np.ndarray
    frequencies: np.ndarray
    phases: np.ndarray
    weights: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("amplitudes", "frequencies", "phases", "weights"):
            arr = np.asarray(getattr(self, name), dtype=float)
            setattr(self, name, arr)
        n = len(self.amplitudes)
        if not all(len(getattr(self, k)) == n for k in ("frequencies", "phases", "weights")):
            raise ValueError("expansion arrays must have equal length")
        if n and (not np.all(np.isfinite(self.amplitudes)) or np.any(self.amplitudes < 0.0)):
            raise ValueError("amplitudes must be finite and nonnegative")
        if n and (np.any(self.phases < 0.0) or np.any(self.phases >= TWO_PI)):
            raise ValueError("phases must lie in [0, 2*pi)")

    @property
    def n_terms(self) -> int:
        return len(self.amplitudes)

    @property
    def amplitude_sum(self) -> float:
        """Pointwise bound: |X(t)| never exceeds the sum of amplitudes."""
        return float(self.amplitudes.sum())

    @property
    def max_frequency(self) -> float:
        return float(self.frequencies.max()) if self.n_terms else 0.0

    def to_json(self) -> str:
        doc = {
            "meta": self.meta,
            "terms": [
                [float(a), float(f), float(p), float(w)]
                for a, f, p, w in zip(
                    self.amplitudes, self.frequencies, self.phases, self.weights
                )
            ],
        }
        return json.dumps(doc, sort_keys=True, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "HarmonicExpansion":
        doc = json.loads(text)
        terms = np.asarray(doc["terms"], dtype=float).reshape(-1, 4)
        return cls(
            amplitudes=terms[:, 0],
            frequencies=terms[:, 1],
            phases=terms[:, 2],
            weights=terms[:, 3],
            meta=doc.get("meta", {}),
        )


@dataclass
class SignalPath:
    """A sampled realization X(t0 + j*dt), j = 0..n-1."""

    t0: float
    dt: float
    values: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1 or self.values.size < 1:
            raise ValueError("a path needs a 1-d, nonempty value array")
        if not float(self.dt) > 0.0:
            raise ValueError("dt must be positive")

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n)

    @property
    def duration(self) -> float:
        return self.dt * (self.n - 1)

    def save_csv(self, path):
        with open(path, "w", newline="\n") as fh:
            fh.write("t,x\n")
            for t, x in zip(self.times, self.values):
                fh.write(f"{t:.17g},{x:.17g}\n")

    def save_binary(self, path):
        with open(path, "wb") as fh:
            fh.write(_BINARY_HEADER.pack(float(self.t0), float(self.dt), self.n))
            fh.write(self.values.astype("<f8").tobytes())

    @classmethod
    def load_binary(cls, path) -> "SignalPath":
        with open(path, "rb") as fh:
            t0, dt, n = _BINARY_HEADER.unpack(fh.read(_BINARY_HEADER.size))
            values = np.frombuffer(fh.read(8 * n), dtype="<f8").copy()
        if values.size != n:
            raise ValueError("binary path file is truncated")
        return cls(t0=t0, dt=dt, values=values)


def evaluate(expansion, t0, dt, n, chunk=4_000_000) -> SignalPath:
    """Sum the expansion on a uniform grid; O(n * n_terms) direct summation."""
    n = int(n)
    if n < 1:
        raise ValueError("need at least one sample")
    t = t0 + dt * np.arange(n)
    values = np.zeros(n)
    m = expansion.n_terms
    if m:
        rows = max(1, min(m, chunk // n))
        for start in range(0, m, rows):
            sl = slice(start, min(start + rows, m))
            values += (
                expansion.amplitudes[sl, None]
                * np.cos(expansion.frequencies[sl, None] * t[None, :] + expansion.phases[sl, None])
            ).sum(axis=0)
    return SignalPath(t0=float(t0), dt=float(dt), values=values, provenance=dict(expansion.meta))


def evaluate_at(expansion, times) -> np.ndarray:
    """Evaluate the expansion at arbitrary time points."""
    t = np.atleast_1d(np.asarray(times, dtype=float))
    if expansion.n_terms == 0:
        return np.zeros_like(t)
    return (
        expansion.amplitudes[:, None]
        * np.cos(expansion.frequencies[:, None] * t[None, :] + expansion.phases[:, None])
    ).sum(axis=0)


def default_truncation_level(measure, spectrum, keep=0.999) -> float:
    """Arrival horizon keeping at least `keep` of the target variance."""
    return truncation_for_variance(measure, spectrum.total_mass, keep=keep)


def _term_draws(stream: RandomStream, level: float):
    arrivals, _ = poisson_arrivals(stream.child("arrivals"), level)
    n = len(arrivals)
    u = stream.child("frequency").uniform(n) if n else np.empty(0)
    r = stream.child("rayleigh").rayleigh(n) if n else np.empty(0)
    ph = stream.child("phase").phase(n) if n else np.empty(0)
    return arrivals, u, r, ph


def _meta(method, spectrum, measure, level, stream, **extra):
    doc = {
        "method": method,
        "sigma0": spectrum.sigma0,
        "frequencies": spectrum.frequencies.describe(),
        "measure": measure.describe() if measure is not None else None,
        "level": level,
        "seed": stream.seed,
        "stream_label": stream.label,
    }
    doc.update(extra)
    return doc


def generate_inverse_levy(measure, spectrum, level=None, stream=None) -> HarmonicExpansion:
    """Series with non-increasing jump weights via the inverse tail.

    Arrival times up to `level` are pushed through the mass-scaled tail
    inverse; arrivals whose weight is zero (beyond the measure's mass)
    are dropped. Per-term draws come from fixed substream labels, so a
    larger level extends an expansion without disturbing its prefix.
    """
    if stream is None:
        raise ValueError("a RandomStream is required")
    if level is None:
        level = default_truncation_level(measure, spectrum)
    level = float(level)
    effective = measure.scale(spectrum.total_mass)
    arrivals, u, r, ph = _term_draws(stream, level)
    weights = effective.tail_inverse(arrivals) if len(arrivals) else np.empty(0)
    keep = weights > 0.0
    amplitudes = np.sqrt(2.0 * weights[keep]) * r[keep]
    freqs = spectrum.frequencies.quantile(u[keep]) if keep.any() else np.empty(0)
    return HarmonicExpansion(
        amplitudes=amplitudes,
        frequencies=np.atleast_1d(freqs),
        phases=ph[keep],
        weights=weights[keep],
        meta=_meta("inverse_levy", spectrum, measure, level, stream),
    )


def generate_gamma_shotnoise(nu, spectrum, level=None, stream=None) -> HarmonicExpansion:
    """Gamma-subordinator series with explicit exponential shot weights.

    Weights nu * V_i * exp(-nu * Gamma_i / spectral_mass) reproduce the
    gamma jumps in law without inverting the exponential integral; the
    expansion equals the inverse-tail one in distribution only.
    """
    if stream is None:
        raise ValueError("a RandomStream is required")
    nu = float(nu)
    if not nu > 0.0:
        raise ValueError("nu must be positive")
    measure = GammaLevyMeasure(nu)
    if level is None:
        level = default_truncation_level(measure, spectrum)
    level = float(level)
    mass = spectrum.total_mass
    arrivals, u, r, ph = _term_draws(stream, level)
    v = stream.child("shot").exponential(len(arrivals)) if len(arrivals) else np.empty(0)
    weights = nu * v * np.exp(-nu * arrivals / mass)
    freqs = spectrum.frequencies.quantile(u) if len(arrivals) else np.empty(0)
    return HarmonicExpansion(
        amplitudes=np.sqrt(2.0 * weights) * r,
        frequencies=np.atleast_1d(freqs),
        phases=ph,
        weights=weights,
        meta=_meta("gamma_shotnoise", spectrum, measure, level, stream, nu=nu),
    )


def generate_conditioned(
    n_terms, level, measure, spectrum, stream, variant="inverse"
) -> HarmonicExpansion:
    """Exactly n_terms harmonics, conditioned on that arrival count.

    Conditioned on N(level) = n_terms the arrivals are uniform order
    statistics, so each weight is an independent copy of the inverse tail
    at level*U. variant="shotnoise" (gamma measures only) uses the
    explicit form nu * V * exp(-nu * level * U / spectral_mass) instead.
    """
    n_terms = int(n_terms)
    if n_terms < 1:
        raise ValueError("n_terms must be >= 1")
    level = float(level)
    if not level > 0.0:
        raise ValueError("level must be positive")
    mass = spectrum.total_mass
    u_amp = stream.child("amplitude").uniform(n_terms)
    r = stream.child("rayleigh").rayleigh(n_terms)
    ph = stream.child("phase").phase(n_terms)
    u_freq = stream.child("frequency").uniform(n_terms)
    if variant == "inverse":
        weights = measure.scale(mass).tail_inverse(level * u_amp)
    elif variant == "shotnoise":
        if not isinstance(measure, GammaLevyMeasure):
            raise ValueError("the shotnoise variant needs a gamma measure")
        v = stream.child("shot").exponential(n_terms)
        weights = measure.nu * v * np.exp(-measure.nu * level * u_amp / mass)
    else:
        raise ValueError(f"unknown conditioned variant {variant!r}")
    return HarmonicExpansion(
        amplitudes=np.sqrt(2.0 * weights) * r,
        frequencies=np.atleast_1d(spectrum.frequencies.quantile(u_freq)),
        phases=ph,
        weights=weights,
        meta=_meta(
            "conditioned", spectrum, measure, level, stream,
            n_terms=n_terms, variant=variant,
        ),
    )


def gamma_increments(nu):
    """Subordinator increment sampler: Gamma(mean/nu, scale nu) jumps."""
    nu = float(nu)
    if not nu > 0.0:
        raise ValueError("nu must be positive")

    def sampler(mean, stream):
        return float(stream.generator.gamma(mean / nu, nu))

    return sampler


def deterministic_increments():
    """Degenerate subordinator: every increment equals its mean."""

    def sampler(mean, stream):
        return float(mean)

    return sampler


def generate_discrete(spectrum, increment_sampler, stream) -> HarmonicExpansion:
    """Fixed-frequency harmonics for a purely atomic frequency law.

    Atom k receives an independent subordinator increment G_k with mean
    nu_k * sigma0^2/2 and the amplitude sqrt(2*G_k)*R_k; the frequency
    randomness collapses into the K fixed atom positions.
    """
    freq = spectrum.frequencies
    if not getattr(freq, "is_discrete", False):
        raise ValueError("generate_discrete needs a discrete frequency law")
    mass = spectrum.total_mass
    k = len(freq.frequencies)
    weights = np.array(
        [
            increment_sampler(mass * freq.masses[i], stream.child(f"increment{i}"))
            for i in range(k)
        ]
    )
    if np.any(weights < 0.0):
        raise ValueError("subordinator increments must be nonnegative")
    r = stream.child("rayleigh").rayleigh(k)
    ph = stream.child("phase").phase(k)
    return HarmonicExpansion(
        amplitudes=np.sqrt(2.0 * weights) * r,
        frequencies=freq.frequencies.copy(),
        phases=ph,
        weights=weights,
        meta=_meta("discrete", spectrum, None, None, stream),
    )


def generate_gaussian_limit(
    measure, spectrum, limit_scale, stream, level=None
) -> HarmonicExpansion:
    """Realization of the rescaled process X_L/sqrt(L) for L = limit_scale.

    The jump measure is mass-scaled by L (making the conditioned amplitude
    law L-free) and every amplitude divided by sqrt(L); the law tends to
    the Gaussian process with the same spectrum as L grows. limit_scale=1
    reproduces generate_inverse_levy exactly.
    """
    limit_scale = float(limit_scale)
    if not limit_scale > 0.0:
        raise ValueError("limit_scale must be positive")
    scaled = measure.scale(limit_scale)
    if level is None:
        level = default_truncation_level(scaled, spectrum)
    base = generate_inverse_levy(scaled, spectrum, level, stream)
    root = math.sqrt(limit_scale)
    return HarmonicExpansion(
        amplitudes=base.amplitudes / root,
        frequencies=base.frequencies,
        phases=base.phases,
        weights=base.weights / limit_scale,
        meta=_meta(
            "gaussian_limit", spectrum, measure, float(level), stream,
            limit_scale=limit_scale,
        ),
    )
