"""The ergodicity trade-off: forcing the amplitude law to be free of the
truncation level drives the rescaled process to a Gaussian limit. Excess
kurtosis of X_L(0)/sqrt(L) decays like 3*nu/(L*mass).

Run:  python3 demos/05_gaussian_limit.py
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
from scipy import stats

from levyharm import (
    GammaLevyMeasure,
    SpectralDistribution,
    UniformFrequencies,
    ensemble,
)

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

nu, sigma0 = 1.5, np.sqrt(3.0)
measure = GammaLevyMeasure(nu)
spectrum = SpectralDistribution(sigma0, UniformFrequencies(0.0, 1.0))
mass = spectrum.total_mass

scales = (1.0, 10.0, 100.0)
samples = {}
for L in scales:
    samples[L] = ensemble.sample_at_times(
        measure, spectrum, [0.0], 60_000, seed=9, method="gaussian_limit", limit_scale=L,
        tag=f"L{L}",
    )[:, 0]
    kurt = stats.kurtosis(samples[L], fisher=True, bias=False)
    print(f"L = {L:>5}: var = {samples[L].var():.3f}  excess kurtosis = {kurt:+.3f} "
          f"(prediction {3*nu/(L*mass):.3f})")

x = np.linspace(-6, 6, 200)
fig, axes = plt.subplots(1, 3, figsize=(12, 3.8), sharey=True)
for ax, L in zip(axes, scales):
    ax.hist(samples[L], bins=60, range=(-6, 6), density=True, alpha=0.6)
    ax.plot(x, stats.norm.pdf(x, scale=sigma0), "k-", lw=1.2, label="gaussian")
    ax.set_title(f"L = {L:g}")
    ax.set_yscale("log")
    ax.set_ylim(1e-5, 1)
axes[0].legend()
fig.suptitle("rescaled marginals flatten onto the gaussian as L grows (log scale)")
fig.tight_layout()
fig.savefig(os.path.join(OUT, "05_gaussian_limit.png"), dpi=110)
print("wrote", os.path.join(OUT, "05_gaussian_limit.png"))
