"""Frequency laws and the spectral distribution they induce.

Frequency laws are carried by their quantile functions, which is the one
representation both the generators (inverse-CDF sampling) and the theory
integrals (substitution lambda = quantile(v)) need. Anything exposing
`quantile`, `cdf` and `is_discrete` works; the classes below are the
config-loadable built-ins.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def _unit_interval_array(u, name):
    arr = np.asarray(u, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if arr.size and (np.any(arr <= 0.0) or np.any(arr >= 1.0) or np.any(np.isnan(arr))):
        raise ValueError(f"{name} requires arguments strictly inside (0, 1)")
    return arr, scalar


class UniformFrequencies:
    """Frequencies uniform on [a, b] with 0 <= a < b."""

    kind = "uniform"
    is_discrete = False

    def __init__(self, a=0.0, b=1.0):
        a, b = float(a), float(b)
        if a < 0.0 or not b > a:
            raise ValueError("uniform frequency law requires 0 <= a < b")
        self.a, self.b = a, b

    def quantile(self, u):
        arr, scalar = _unit_interval_array(u, "quantile")
        out = self.a + (self.b - self.a) * arr
        return float(out[0]) if scalar else out

    def cdf(self, lam):
        lam = np.asarray(lam, dtype=float)
        return np.clip((lam - self.a) / (self.b - self.a), 0.0, 1.0)

    def describe(self):
        return {"kind": "uniform", "a": self.a, "b": self.b}


class ExponentialFrequencies:
    """Frequencies exponential with the given rate (mean 1/rate)."""

    kind = "exponential"
    is_discrete = False

    def __init__(self, rate=1.0):
        rate = float(rate)
        if not rate > 0.0:
            raise ValueError("exponential frequency law requires rate > 0")
        self.rate = rate

    def quantile(self, u):
        arr, scalar = _unit_interval_array(u, "quantile")
        out = -np.log1p(-arr) / self.rate
        return float(out[0]) if scalar else out

    def cdf(self, lam):
        lam = np.asarray(lam, dtype=float)
        return np.where(lam <= 0.0, 0.0, -np.expm1(-self.rate * lam))

    def describe(self):
        return {"kind": "exponential", "rate": self.rate}


class DiscreteFrequencies:
    """Atoms (l_k, nu_k) with distinct l_k >= 0 and masses summing to 1."""

    kind = "atoms"
    is_discrete = True

    def __init__(self, points):
        pts = [(float(l), float(p)) for l, p in points]
        if not pts:
            raise ValueError("discrete frequency law requires at least one atom")
        ls = np.array([p[0] for p in pts])
        ps = np.array([p[1] for p in pts])
        if np.any(ls < 0.0) or np.any(ps <= 0.0):
            raise ValueError("frequencies must be >= 0 with positive masses")
        if len(np.unique(ls)) != len(ls):
            raise ValueError("frequency atoms must be distinct")
        if abs(ps.sum() - 1.0) > 1e-9:
            raise ValueError("frequency masses must sum to 1")
        order = np.argsort(ls)
        self.frequencies = ls[order]
        self.masses = ps[order] / ps.sum()
        self._cum = np.cumsum(self.masses)
        self._cum[-1] = 1.0

    def quantile(self, u):
        arr, scalar = _unit_interval_array(u, "quantile")
        idx = np.searchsorted(self._cum, arr, side="left")
        out = self.frequencies[idx]
        return float(out[0]) if scalar else out

    def cdf(self, lam):
        lam = np.asarray(lam, dtype=float)
        idx = np.searchsorted(self.frequencies, lam, side="right")
        padded = np.concatenate([[0.0], self._cum])
        return padded[idx]

    def describe(self):
        return {
            "kind": "atoms",
            "points": [[float(l), float(p)] for l, p in zip(self.frequencies, self.masses)],
        }


class TableFrequencies:
    """Quantile given as a piecewise-linear table [(u, lambda)] on [0, 1]."""

    kind = "table"
    is_discrete = False

    def __init__(self, points):
        pts = sorted((float(u), float(l)) for u, l in points)
        us = np.array([p[0] for p in pts])
        ls = np.array([p[1] for p in pts])
        if us.size < 2 or us[0] != 0.0 or us[-1] != 1.0:
            raise ValueError("quantile table must span u in [0, 1]")
        if np.any(np.diff(us) <= 0.0):
            raise ValueError("table u-values must be strictly increasing")
        if np.any(np.diff(ls) < 0.0) or ls[0] < 0.0:
            raise ValueError("table quantile values must be nonnegative and non-decreasing")
        self.us = us
        self.lambdas = ls

    def quantile(self, u):
        arr, scalar = _unit_interval_array(u, "quantile")
        out = np.interp(arr, self.us, self.lambdas)
        return float(out[0]) if scalar else out

    def cdf(self, lam):
        # inverse of a non-decreasing piecewise-linear map; flat quantile
        # stretches become jumps of the cdf, resolved upward
        lam = np.asarray(lam, dtype=float)
        return np.interp(lam, self.lambdas, self.us, left=0.0, right=1.0)

    def describe(self):
        return {
            "kind": "table",
            "quantile": [[float(u), float(l)] for u, l in zip(self.us, self.lambdas)],
        }


def frequency_from_config(cfg: dict):
    """Build a frequency law from its config dictionary."""
    if not isinstance(cfg, dict) or "kind" not in cfg:
        raise ValueError("frequency config must be a dict with a 'kind' entry")
    kind = cfg["kind"]
    if kind == "uniform":
        return UniformFrequencies(cfg.get("a", 0.0), cfg.get("b", 1.0))
    if kind == "exponential":
        return ExponentialFrequencies(cfg.get("rate", 1.0))
    if kind == "atoms":
        return DiscreteFrequencies(cfg["points"])
    if kind == "table":
        return TableFrequencies(cfg["quantile"])
    raise ValueError(f"unknown frequency kind {kind!r}")


@dataclass(frozen=True)
class SpectralDistribution:
    """One-sided spectral distribution: mass sigma0^2/2 spread by the frequency law."""

    sigma0: float
    frequencies: object = field(default_factory=UniformFrequencies)

    def __post_init__(self):
        if not float(self.sigma0) > 0.0:
            raise ValueError("sigma0 must be positive")
        object.__setattr__(self, "sigma0", float(self.sigma0))

    @property
    def total_mass(self) -> float:
        return 0.5 * self.sigma0**2

    def spectral_cdf(self, lam):
        """Spectral mass of (0, lam]; no atom at zero, saturates at sigma0^2/2."""
        lam = np.asarray(lam, dtype=float)
        if np.any(lam < 0.0):
            raise ValueError("spectral_cdf requires lam >= 0")
        out = self.total_mass * self.frequencies.cdf(lam)
        return float(out) if out.ndim == 0 else out

    def describe(self):
        return {"sigma0": self.sigma0, "frequencies": self.frequencies.describe()}
