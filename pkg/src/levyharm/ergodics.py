"""Time averages on single realizations and ensemble (non-)ergodicity diagnostics.

The central fact exercised here: the single-path time-average
autocovariance converges, but to the random variable
sum xi_i^2/2 cos(lambda_i tau) determined by the realized terms, not to
the deterministic autocovariance. `random_limit_acov` evaluates that limit
exactly from an expansion's stored terms; `time_average_acov` approximates
it from a sampled path; the ensemble helpers quantify the spread that
refuses to vanish as the horizon grows.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from . import ensemble
from .levy import GammaLevyMeasure
from .streams import RandomStream
from .synthesis import (
    evaluate,
    evaluate_at,
    generate_conditioned,
    generate_gamma_shotnoise,
    generate_gaussian_limit,
    generate_inverse_levy,
)

_MAX_FREQ_STEP = 0.2  # largest admissible lambda_max * dt for the trapezoid rule


def time_average_mean(path):
    """Trapezoidal (1/T) integral of X over the sampled window."""
    if path.n < 2:
        raise ValueError("time averages need at least two samples")
    return float(np.trapezoid(path.values, dx=path.dt) / path.duration)


def time_average_acov(path, tau):
    """Trapezoidal (1/(T-tau)) integral of X(t) X(t+tau).

    tau must sit on the sample grid and leave at least half the window,
    i.e. tau < T/2.
    """
    if path.n < 2:
        raise ValueError("time averages need at least two samples")
    tau = float(tau)
    if tau < 0.0:
        raise ValueError("tau must be nonnegative")
    k_float = tau / path.dt
    k = int(round(k_float))
    if abs(k_float - k) > 1e-8 * max(1.0, abs(k_float)):
        raise ValueError(f"tau={tau} is not a multiple of the sample step {path.dt}")
    if tau >= path.duration / 2.0:
        raise ValueError("tau must be below half the sampled horizon")
    prod = path.values[: path.n - k] * path.values[k:]
    return float(np.trapezoid(prod, dx=path.dt) / (path.duration - tau))


def random_limit_acov(expansion, tau):
    """Exact almost-sure limit of the time-average autocovariance.

    sum over terms of xi^2/2 * cos(lambda*tau), computed from the stored
    terms; vectorized over an array of lags.
    """
    tau_arr = np.asarray(tau, dtype=float)
    scalar = tau_arr.ndim == 0
    flat = np.atleast_1d(tau_arr)
    if expansion.n_terms == 0:
        out = np.zeros(flat.shape)
    else:
        out = 0.5 * (
            expansion.amplitudes[None, :] ** 2
            * np.cos(expansion.frequencies[None, :] * flat[:, None])
        ).sum(axis=1)
    return float(out[0]) if scalar else out.reshape(tau_arr.shape)


def kay_variance(fourth_moment, second_moment, n_terms, acov_t, acov_2t):
    """Limiting variance of the sample autocorrelation for an n-term harmonic sum.

    e4/m + e4*r(2t)/(m*e2) - r(t)^2/m with e4, e2 the amplitude moments in
    the 1/sqrt(m/2)-normalized parametrization and r the autocovariance.
    """
    e4, e2, m = float(fourth_moment), float(second_moment), int(n_terms)
    if m < 1:
        raise ValueError("n_terms must be >= 1")
    if not e2 > 0.0 or e4 < e2 * e2:
        raise ValueError("moments must satisfy e4 >= e2^2 > 0")
    return e4 / m + e4 * float(acov_2t) / (m * e2) - float(acov_t) ** 2 / m


def suggested_dt(expansion, cap=0.05):
    """Largest step keeping lambda_max * dt within the trapezoid budget."""
    lam = expansion.max_frequency
    return min(cap, _MAX_FREQ_STEP / lam) if lam > 0.0 else cap


@dataclass
class TimeAverageReport:
    """Per-lag comparison of one path's time averages with its exact limit."""

    horizon: float
    taus: np.ndarray
    time_avg_mean: float
    time_avg_acov: np.ndarray
    random_limit: np.ndarray
    abs_error: np.ndarray = field(init=False)

    def __post_init__(self):
        self.taus = np.asarray(self.taus, dtype=float)
        self.time_avg_acov = np.asarray(self.time_avg_acov, dtype=float)
        self.random_limit = np.asarray(self.random_limit, dtype=float)
        self.abs_error = np.abs(self.time_avg_acov - self.random_limit)

    def to_dict(self):
        return {
            "horizon": self.horizon,
            "taus": self.taus.tolist(),
            "time_avg_mean": self.time_avg_mean,
            "time_avg_acov": self.time_avg_acov.tolist(),
            "random_limit": self.random_limit.tolist(),
            "abs_error": self.abs_error.tolist(),
        }

    def write_csv(self, path):
        with open(path, "w", newline="\n") as fh:
            fh.write("tau,time_avg,random_limit,abs_err\n")
            for t, a, l, e in zip(self.taus, self.time_avg_acov, self.random_limit, self.abs_error):
                fh.write(f"{t:.17g},{a:.17g},{l:.17g},{e:.17g}\n")


def time_average_report(expansion, horizon, taus, dt, t0=0.0) -> TimeAverageReport:
    """Evaluate one path and compare its time averages with the exact limit.

    Rejects sample steps that under-resolve the fastest harmonic
    (lambda_max * dt must stay below 0.2).
    """
    lam_max = expansion.max_frequency
    if lam_max * dt > _MAX_FREQ_STEP * (1.0 + 1e-9):
        raise ValueError(
            f"dt={dt} under-resolves the expansion: lambda_max*dt = {lam_max * dt:.3f} > 0.2"
        )
    n = int(round(horizon / dt)) + 1
    path = evaluate(expansion, t0, dt, n)
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    acov = np.array([time_average_acov(path, t) for t in taus])
    return TimeAverageReport(
        horizon=path.duration,
        taus=taus,
        time_avg_mean=time_average_mean(path),
        time_avg_acov=acov,
        random_limit=random_limit_acov(expansion, taus),
    )


@dataclass
class EnsembleReport:
    """Cross-realization statistics of the random time-average limits."""

    n_real: int
    taus: np.ndarray
    limit_mean: np.ndarray
    limit_std: np.ndarray
    excess_kurtosis_x0: float
    ks_normal_stat: float
    ks_normal_pvalue: float
    cf_grid: np.ndarray
    cf_empirical: np.ndarray
    timeavg_std: np.ndarray | None = None
    horizon: float | None = None

    def to_dict(self):
        doc = {
            "n_real": self.n_real,
            "taus": self.taus.tolist(),
            "limit_mean": self.limit_mean.tolist(),
            "limit_std": self.limit_std.tolist(),
            "excess_kurtosis_x0": self.excess_kurtosis_x0,
            "ks_normal_stat": self.ks_normal_stat,
            "ks_normal_pvalue": self.ks_normal_pvalue,
            "cf_grid": self.cf_grid.tolist(),
            "cf_empirical": self.cf_empirical.tolist(),
        }
        if self.timeavg_std is not None:
            doc["timeavg_std"] = self.timeavg_std.tolist()
            doc["horizon"] = self.horizon
        return doc

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)


def make_expansion(method, measure, spectrum, stream, level=None, n_terms=None,
                   variant="inverse", limit_scale=None):
    """Dispatch a single realization by generator name."""
    if method == "inverse_levy":
        return generate_inverse_levy(measure, spectrum, level, stream)
    if method == "gamma_shotnoise":
        if not isinstance(measure, GammaLevyMeasure):
            raise ValueError("gamma_shotnoise needs a gamma measure")
        return generate_gamma_shotnoise(measure.nu, spectrum, level, stream)
    if method == "conditioned":
        if n_terms is None:
            raise ValueError("the conditioned generator needs n_terms")
        if level is None:
            raise ValueError("the conditioned generator needs a level")
        return generate_conditioned(n_terms, level, measure, spectrum, stream, variant=variant)
    if method == "gaussian_limit":
        if limit_scale is None:
            raise ValueError("the gaussian_limit generator needs limit_scale")
        return generate_gaussian_limit(measure, spectrum, limit_scale, stream, level=level)
    raise ValueError(f"unknown generator method {method!r}")


def ensemble_diagnostics(
    measure,
    spectrum,
    method="inverse_levy",
    level=None,
    n_terms=None,
    variant="inverse",
    limit_scale=None,
    taus=(0.0, 1.0, 2.0),
    n_real=200,
    seed=0,
    horizon=None,
    dt=None,
    u_grid=None,
    label="diagnostics",
) -> EnsembleReport:
    """Simulate independent realizations and report limit spread and shape.

    Per realization: the exact random limits at each lag and X(0); when a
    horizon is given, also the single-path time averages (the expensive
    part). Reported: per-lag mean/std of the limits (the non-ergodicity
    witness), excess kurtosis of X(0), a fitted-normal KS statistic, and
    the empirical characteristic function on u_grid.
    """
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    if u_grid is None:
        u_grid = np.linspace(-5.0, 5.0, 41)
    u_grid = np.asarray(u_grid, dtype=float)
    limits = np.empty((n_real, taus.size))
    timeavg = np.empty((n_real, taus.size)) if horizon is not None else None
    x0 = np.empty(n_real)
    for k in range(n_real):
        stream = RandomStream(seed, f"{label}/r{k}")
        exp = make_expansion(
            method, measure, spectrum, stream,
            level=level, n_terms=n_terms, variant=variant, limit_scale=limit_scale,
        )
        limits[k] = random_limit_acov(exp, taus)
        x0[k] = evaluate_at(exp, 0.0)[0]
        if horizon is not None:
            step = dt if dt is not None else suggested_dt(exp)
            rep = time_average_report(exp, horizon, taus, step)
            timeavg[k] = rep.time_avg_acov
    ks_stat, ks_p = stats.kstest(x0, "norm", args=(x0.mean(), x0.std(ddof=1)))
    return EnsembleReport(
        n_real=n_real,
        taus=taus,
        limit_mean=limits.mean(axis=0),
        limit_std=limits.std(axis=0, ddof=1),
        excess_kurtosis_x0=float(stats.kurtosis(x0, fisher=True, bias=False)),
        ks_normal_stat=float(ks_stat),
        ks_normal_pvalue=float(ks_p),
        cf_grid=u_grid,
        cf_empirical=np.cos(np.outer(u_grid, x0)).mean(axis=1),
        timeavg_std=None if timeavg is None else timeavg.std(axis=0, ddof=1),
        horizon=horizon,
    )


def stationarity_shift_ks(
    measure,
    spectrum,
    shift,
    tau,
    n_real,
    seed,
    method="inverse_levy",
    level=None,
    n_terms=None,
    variant="inverse",
    phase_high=2.0 * math.pi,
):
    """Two-sample KS witnesses of strict shift-invariance.

    Compares (X(0), X(tau)) against (X(s), X(s+tau)) across two independent
    realization batches through the first marginal and the pair sum. With
    uniform phases both tests should be quiet; phase_high < 2*pi breaks
    stationarity and should trip them.
    """
    a = ensemble.sample_at_times(
        measure, spectrum, [0.0, tau], n_real, seed,
        method=method, level=level, n_terms=n_terms, variant=variant,
        phase_high=phase_high, tag="stationarity-a",
    )
    b = ensemble.sample_at_times(
        measure, spectrum, [shift, shift + tau], n_real, seed,
        method=method, level=level, n_terms=n_terms, variant=variant,
        phase_high=phase_high, tag="stationarity-b",
    )
    marg = stats.ks_2samp(a[:, 0], b[:, 0])
    pair = stats.ks_2samp(a.sum(axis=1), b.sum(axis=1))
    return {
        "marginal": {"stat": float(marg.statistic), "pvalue": float(marg.pvalue)},
        "pair_sum": {"stat": float(pair.statistic), "pvalue": float(pair.pvalue)},
    }
