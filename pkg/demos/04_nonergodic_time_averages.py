"""Non-ergodicity: each path's time-average autocovariance converges, but
to a limit built from that path's own amplitudes and frequencies. The
spread across realizations does not shrink however long you observe.

Run:  python3 demos/04_nonergodic_time_averages.py
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from levyharm import (
    GammaLevyMeasure,
    RandomStream,
    SpectralDistribution,
    UniformFrequencies,
    autocovariance,
    default_truncation_level,
    evaluate,
    generate_inverse_levy,
    random_limit_acov,
    time_average_acov,
)

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

nu, sigma0 = 1.5, np.sqrt(3.0)
measure = GammaLevyMeasure(nu)
spectrum = SpectralDistribution(sigma0, UniformFrequencies(0.5, 3.0))
level = default_truncation_level(measure, spectrum)

## Watch five paths' running time averages at lag 0 approach five different
## limits; the dashed line is the deterministic autocovariance they ignore.
horizons = np.linspace(100.0, 3000.0, 30)
fig, ax = plt.subplots(figsize=(8, 4.5))
for k in range(5):
    exp = generate_inverse_levy(measure, spectrum, level, RandomStream(3, f"path{k}"))
    path = evaluate(exp, 0.0, 0.05, int(3000.0 / 0.05) + 1)
    runs = []
    for T in horizons:
        n = int(T / 0.05) + 1
        sub = evaluate(exp, 0.0, 0.05, n)
        runs.append(time_average_acov(sub, 0.0))
    line, = ax.plot(horizons, runs, lw=1.0)
    ax.axhline(random_limit_acov(exp, 0.0), color=line.get_color(), ls=":", lw=1.0)
ax.axhline(autocovariance(0.0, spectrum), color="k", ls="--", lw=1.5,
           label="ensemble autocovariance")
ax.set_xlabel("horizon T")
ax.set_ylabel("(1/T) integral of X(t)^2")
ax.set_title("time averages converge to path-specific random limits")
ax.legend()
fig.tight_layout()
fig.savefig(os.path.join(OUT, "04_running_averages.png"), dpi=110)
print("wrote", os.path.join(OUT, "04_running_averages.png"))

## The cross-realization standard deviation of the limit is horizon-free.
limits = [
    random_limit_acov(
        generate_inverse_levy(measure, spectrum, level, RandomStream(8, f"r{k}")), 0.0
    )
    for k in range(400)
]
print(f"std of the lag-0 limit across 400 realizations: {np.std(limits):.2f}")
print(f"ensemble autocovariance at lag 0 (their mean):  {np.mean(limits):.2f}"
      f"  (theory {autocovariance(0.0, spectrum):.2f})")
