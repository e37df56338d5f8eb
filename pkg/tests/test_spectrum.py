import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from levyharm import (
    DiscreteFrequencies,
    ExponentialFrequencies,
    SpectralDistribution,
    TableFrequencies,
    UniformFrequencies,
    frequency_from_config,
)


def test_uniform_identity_quantile():
    assert UniformFrequencies(0, 1).quantile(0.3) == pytest.approx(0.3)


def test_discrete_quantile_cumulative_masses():
    f = DiscreteFrequencies([(1.0, 0.5), (2.0, 0.5)])
    assert f.quantile(0.25) == 1.0
    assert f.quantile(0.75) == 2.0
    assert f.quantile(0.5) == 1.0  # boundary goes to the lower atom


def test_exponential_quantile_inversion():
    f = ExponentialFrequencies(1.0)
    assert f.quantile(1.0 - np.exp(-2.0)) == pytest.approx(2.0, rel=1e-12)


def test_table_quantile_interpolates():
    f = TableFrequencies([(0.0, 0.0), (0.5, 1.0), (1.0, 3.0)])
    assert f.quantile(0.25) == pytest.approx(0.5)
    assert f.quantile(0.75) == pytest.approx(2.0)


@pytest.mark.parametrize("bad", [0.0, 1.0, -0.1, 1.1])
def test_quantile_domain_errors(bad):
    for f in (UniformFrequencies(), ExponentialFrequencies(), DiscreteFrequencies([(1, 1.0)])):
        with pytest.raises(ValueError):
            f.quantile(bad)


@settings(max_examples=60, deadline=None)
@given(u=st.floats(1e-9, 1 - 1e-9))
def test_quantile_cdf_consistency(u):
    for f in (
        UniformFrequencies(0.2, 1.7),
        ExponentialFrequencies(0.8),
        TableFrequencies([(0.0, 0.1), (0.4, 0.5), (1.0, 2.0)]),
    ):
        assert f.cdf(f.quantile(u)) == pytest.approx(u, abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(u1=st.floats(1e-9, 1 - 1e-9), u2=st.floats(1e-9, 1 - 1e-9))
def test_quantile_monotone(u1, u2):
    lo, hi = sorted((u1, u2))
    for f in (
        UniformFrequencies(0, 2),
        ExponentialFrequencies(2.0),
        DiscreteFrequencies([(0.5, 0.3), (1.0, 0.4), (4.0, 0.3)]),
    ):
        assert f.quantile(lo) <= f.quantile(hi) + 1e-12


class TestSpectralDistribution:
    def test_direct_substitution(self):
        spec = SpectralDistribution(np.sqrt(2.0), UniformFrequencies(0, 1))
        assert spec.spectral_cdf(0.5) == pytest.approx(0.5)

    def test_no_atom_at_zero(self):
        for freq in (UniformFrequencies(0, 1), ExponentialFrequencies(1.0)):
            spec = SpectralDistribution(1.3, freq)
            assert spec.spectral_cdf(0.0) == 0.0

    def test_total_mass(self):
        spec = SpectralDistribution(1.0, UniformFrequencies(0, 1))
        assert spec.spectral_cdf(np.inf) == pytest.approx(0.5)
        assert spec.total_mass == pytest.approx(0.5)

    def test_monotone_and_bounded(self):
        spec = SpectralDistribution(2.0, ExponentialFrequencies(1.5))
        lam = np.linspace(0, 20, 200)
        vals = spec.spectral_cdf(lam)
        assert np.all(np.diff(vals) >= 0.0)
        assert np.all(vals >= 0.0)
        assert np.all(vals <= spec.total_mass + 1e-12)

    def test_negative_lambda_rejected(self):
        spec = SpectralDistribution(1.0, UniformFrequencies())
        with pytest.raises(ValueError):
            spec.spectral_cdf(-0.5)

    def test_sigma0_validation(self):
        with pytest.raises(ValueError):
            SpectralDistribution(0.0, UniformFrequencies())


def test_frequency_config_roundtrip():
    configs = [
        {"kind": "uniform", "a": 0.0, "b": 2.0},
        {"kind": "exponential", "rate": 1.5},
        {"kind": "atoms", "points": [[1.0, 0.5], [2.0, 0.5]]},
        {"kind": "table", "quantile": [[0.0, 0.0], [1.0, 3.0]]},
    ]
    for cfg in configs:
        f = frequency_from_config(cfg)
        again = frequency_from_config(f.describe())
        u = np.linspace(0.05, 0.95, 19)
        assert np.allclose(f.quantile(u), again.quantile(u))


def test_frequency_validation():
    with pytest.raises(ValueError):
        UniformFrequencies(1.0, 1.0)
    with pytest.raises(ValueError):
        UniformFrequencies(-0.5, 1.0)
    with pytest.raises(ValueError):
        ExponentialFrequencies(0.0)
    with pytest.raises(ValueError):
        DiscreteFrequencies([(1.0, 0.4), (2.0, 0.4)])  # masses must total 1
    with pytest.raises(ValueError):
        DiscreteFrequencies([(1.0, 0.5), (1.0, 0.5)])
    with pytest.raises(ValueError):
        TableFrequencies([(0.1, 0.0), (1.0, 1.0)])  # must span u in [0, 1]
    with pytest.raises(ValueError):
        TableFrequencies([(0.0, 1.0), (1.0, 0.5)])  # decreasing quantile
    with pytest.raises(ValueError):
        frequency_from_config({"kind": "nope"})
