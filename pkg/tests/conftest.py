import numpy as np
import pytest

from levyharm import GammaLevyMeasure, SpectralDistribution, UniformFrequencies

# the running example everywhere: gamma nu=1.5 with spectral mass 1.5
# (sigma0^2 = 3), exact-Laplace marginal (1 + 1.5 u^2)^(-1)
NU = 1.5
SIGMA0 = np.sqrt(3.0)
F_TOTAL = 1.5


@pytest.fixture(scope="session")
def gamma_measure():
    return GammaLevyMeasure(NU)


@pytest.fixture(scope="session")
def laplace_spectrum():
    return SpectralDistribution(SIGMA0, UniformFrequencies(0.0, 1.0))
