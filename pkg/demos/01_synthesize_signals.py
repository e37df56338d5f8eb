"""Synthesize stationary signals whose spectrum and marginal law are set
independently: the frequency distribution fixes the spectrum, the jump
measure fixes the amplitude law. Three generators realize the same model.

Run:  python3 demos/01_synthesize_signals.py   (writes PNGs next to it)
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
    default_truncation_level,
    evaluate,
    generate_conditioned,
    generate_gamma_shotnoise,
    generate_inverse_levy,
)

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

## The running model: gamma jumps with nu = 1.5, spectral mass 1.5
## (sigma0 = sqrt(3)), frequencies uniform on [0, 1]. Its marginal is the
## exact Laplace-type law with CF (1 + 1.5 u^2)^(-1).
nu = 1.5
sigma0 = np.sqrt(3.0)
measure = GammaLevyMeasure(nu)
spectrum = SpectralDistribution(sigma0, UniformFrequencies(0.0, 1.0))

level = default_truncation_level(measure, spectrum)
print(f"truncation level keeping 99.9% of the variance: {level:.3f}")

## Three ways to realize the same law (equal in distribution, not pathwise):
## inverse-tail weights, shot-noise weights, and the conditioned fixed-count sum.
stream = RandomStream(seed=20260810)
expansions = {
    "inverse tail": generate_inverse_levy(measure, spectrum, level, stream.child("a")),
    "shot noise": generate_gamma_shotnoise(nu, spectrum, level, stream.child("b")),
    "conditioned m=8": generate_conditioned(8, level, measure, spectrum, stream.child("c")),
}

fig, axes = plt.subplots(3, 1, figsize=(9, 7), sharex=True)
for ax, (name, exp) in zip(axes, expansions.items()):
    path = evaluate(exp, 0.0, 0.05, 2000)
    ax.plot(path.times, path.values, lw=0.7)
    ax.set_ylabel("X(t)")
    ax.set_title(f"{name}: {exp.n_terms} harmonics, sum of amplitudes {exp.amplitude_sum:.2f}")
axes[-1].set_xlabel("t")
fig.tight_layout()
fig.savefig(os.path.join(OUT, "01_paths.png"), dpi=110)
print("wrote", os.path.join(OUT, "01_paths.png"))

## Each expansion is a short list of (amplitude, frequency, phase) terms;
## the inverse-tail weights are non-increasing by construction.
exp = expansions["inverse tail"]
print("\nfirst terms of the inverse-tail expansion:")
for i in range(min(5, exp.n_terms)):
    print(
        f"  xi={exp.amplitudes[i]:.3f}  lambda={exp.frequencies[i]:.3f} "
        f" phase={exp.phases[i]:.3f}  weight={exp.weights[i]:.4f}"
    )
