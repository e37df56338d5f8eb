import numpy as np
import pytest
from scipy.integrate import quad

from levyharm import (
    AtomLevyMeasure,
    DiscreteFrequencies,
    GammaLevyMeasure,
    HarmonicExpansion,
    RandomStream,
    SpectralDistribution,
    UniformFrequencies,
    default_truncation_level,
    deterministic_increments,
    ensemble,
    evaluate,
    evaluate_at,
    exp_integral_e1_inverse,
    gamma_increments,
    generate_conditioned,
    generate_discrete,
    generate_gamma_shotnoise,
    generate_gaussian_limit,
    generate_inverse_levy,
    laplace_marginal_cf,
    poisson_arrivals,
)

ROOT2 = np.sqrt(2.0)


def expansion_of(terms):
    a, f, p = map(np.asarray, zip(*terms))
    return HarmonicExpansion(a, f, p, weights=(a**2) / 2.0)


class TestEvaluate:
    def test_constant_term(self):
        path = evaluate(expansion_of([(1.0, 0.0, 0.0)]), 0.0, 0.1, 5)
        assert np.allclose(path.values, 1.0)

    def test_single_cosine(self):
        path = evaluate(expansion_of([(2.0, np.pi, 0.0)]), 1.0, 0.5, 1)
        assert path.values[0] == pytest.approx(-2.0)

    def test_phase_cancellation(self):
        path = evaluate(expansion_of([(1.0, 1.0, 0.0), (1.0, 1.0, np.pi)]), 0.0, 0.3, 50)
        assert np.allclose(path.values, 0.0, atol=1e-14)

    def test_grid(self):
        path = evaluate(expansion_of([(1.0, 1.0, 0.0)]), -1.0, 0.25, 9)
        assert path.times[0] == -1.0
        assert path.times[-1] == pytest.approx(1.0)
        assert path.duration == pytest.approx(2.0)

    def test_empty_expansion_gives_zero_path(self):
        empty = HarmonicExpansion(*(np.empty(0),) * 4)
        assert np.allclose(evaluate(empty, 0.0, 0.1, 10).values, 0.0)
        assert np.allclose(evaluate_at(empty, [0.0, 1.0]), 0.0)


class TestInverseLevy:
    def test_atom_measure_unit_weights(self):
        # atoms of mass 2 at x=1: every arrival below the mass carries weight 1,
        # so amplitudes are sigma0 * Rayleigh at sigma0 = sqrt(2)
        spec = SpectralDistribution(ROOT2, UniformFrequencies(0, 1))
        measure = AtomLevyMeasure([(1.0, 2.0)])
        stream = RandomStream(11)
        exp = generate_inverse_levy(measure, spec, 1.5, stream)
        rays = RandomStream(11).child("rayleigh").rayleigh(exp.n_terms)
        assert np.allclose(exp.weights, 1.0)
        assert np.allclose(exp.amplitudes, ROOT2 * rays)

    def test_gamma_weights_are_inverse_tail_of_arrivals(self):
        # at sigma0 = sqrt(2) the stored weights are exactly the measure's
        # inverse tail at the raw arrival times (the classical series)
        measure = GammaLevyMeasure(1.0)
        spec = SpectralDistribution(ROOT2, UniformFrequencies(0, 1))
        exp = generate_inverse_levy(measure, spec, 4.0, RandomStream(19))
        arrivals, _ = poisson_arrivals(RandomStream(19).child("arrivals"), 4.0)
        assert np.allclose(exp.weights, measure.tail_inverse(arrivals), rtol=1e-12)
        rays = RandomStream(19).child("rayleigh").rayleigh(len(arrivals))
        assert np.allclose(exp.amplitudes, ROOT2 * np.sqrt(exp.weights) * rays, rtol=1e-12)

    def test_drops_zero_weight_terms(self):
        # mass 0.8 atom: arrivals beyond 0.8 invert to zero and are dropped
        spec = SpectralDistribution(ROOT2, UniformFrequencies(0, 1))
        measure = AtomLevyMeasure([(1.0, 0.8)])
        exp = generate_inverse_levy(measure, spec, 20.0, RandomStream(3))
        arrivals, _ = poisson_arrivals(RandomStream(3).child("arrivals"), 20.0)
        assert exp.n_terms == int(np.sum(arrivals < 0.8))
        assert np.all(exp.weights > 0.0)

    def test_empty_when_level_below_first_arrival(self):
        spec = SpectralDistribution(1.0, UniformFrequencies(0, 1))
        measure = GammaLevyMeasure(1.0)
        for seed in range(30):
            first = poisson_arrivals(RandomStream(seed).child("arrivals"), 100.0)[0][0]
            level = first * 0.5
            exp = generate_inverse_levy(measure, spec, level, RandomStream(seed))
            assert exp.n_terms == 0

    def test_weights_non_increasing(self, gamma_measure, laplace_spectrum):
        for seed in range(10):
            exp = generate_inverse_levy(
                gamma_measure, laplace_spectrum, 8.0, RandomStream(seed)
            )
            assert np.all(np.diff(exp.weights) <= 1e-15)

    def test_pointwise_bound(self, gamma_measure, laplace_spectrum):
        for seed in range(10):
            exp = generate_inverse_levy(
                gamma_measure, laplace_spectrum, 6.0, RandomStream(seed)
            )
            path = evaluate(exp, 0.0, 0.21, 300)
            assert np.max(np.abs(path.values)) <= exp.amplitude_sum + 1e-12

    def test_prefix_coupling(self, gamma_measure, laplace_spectrum):
        for seed in (0, 5, 9):
            small = generate_inverse_levy(gamma_measure, laplace_spectrum, 3.0, RandomStream(seed))
            large = generate_inverse_levy(gamma_measure, laplace_spectrum, 9.0, RandomStream(seed))
            n = small.n_terms
            assert large.n_terms >= n
            assert np.array_equal(small.frequencies, large.frequencies[:n])
            assert np.array_equal(small.phases, large.phases[:n])
            assert np.allclose(small.weights, large.weights[:n], rtol=1e-12)

    def test_default_level_keeps_variance(self, gamma_measure, laplace_spectrum):
        level = default_truncation_level(gamma_measure, laplace_spectrum)
        x0 = ensemble.sample_at_times(
            gamma_measure, laplace_spectrum, [0.0], 40_000, seed=101, level=level
        )[:, 0]
        sig2 = laplace_spectrum.sigma0**2
        se = np.std(x0**2, ddof=1) / np.sqrt(x0.size)
        assert x0.var() == pytest.approx(0.999 * sig2, abs=3 * se + 0.01)


class TestGammaShotnoise:
    def test_amplitude_formula_at_root2(self):
        # at sigma0 = sqrt(2) the weights are nu*V*exp(-nu*Gamma) exactly
        nu = 1.0
        spec = SpectralDistribution(ROOT2, UniformFrequencies(0, 1))
        stream = RandomStream(21)
        exp = generate_gamma_shotnoise(nu, spec, 5.0, stream)
        arrivals, _ = poisson_arrivals(RandomStream(21).child("arrivals"), 5.0)
        v = RandomStream(21).child("shot").exponential(len(arrivals))
        r = RandomStream(21).child("rayleigh").rayleigh(len(arrivals))
        expect_w = nu * v * np.exp(-nu * arrivals)
        assert np.allclose(exp.weights, expect_w, rtol=1e-12)
        assert np.allclose(exp.amplitudes, np.sqrt(2 * expect_w) * r, rtol=1e-12)

    def test_shot_sum_unit_mean_oracle(self):
        # E sum nu*V_i*exp(-nu*Gamma_i) = 1 - exp(-nu L); raw numpy oracle
        rng = np.random.default_rng(7)
        n, m = 100_000, 70
        gaps = rng.exponential(size=(n, m))
        g = np.cumsum(gaps, axis=1)
        v = rng.exponential(size=(n, m))
        sums = np.sum(v * np.exp(-g) * (g <= 30.0), axis=1)
        assert sums.mean() == pytest.approx(1.0, abs=0.01)

    def test_generator_weights_reach_spectral_mass(self, laplace_spectrum):
        # sum of stored weights estimates G(F(0,inf)) whose mean is the mass
        totals = [
            generate_gamma_shotnoise(1.5, laplace_spectrum, 40.0, RandomStream(5, f"r{k}"))
            .weights.sum()
            for k in range(2000)
        ]
        totals = np.asarray(totals)
        se = totals.std(ddof=1) / np.sqrt(totals.size)
        assert totals.mean() == pytest.approx(laplace_spectrum.total_mass, abs=3 * se)

    def test_residual_variance_closed_form_and_coupling(self):
        # residual variance sigma0^2 * exp(-nu L / mass); at nu=1, L=20,
        # sigma0=sqrt(2) that is 2e-20 = 2.06e-9 sigma0^2
        assert 2.0 * np.exp(-20.0) <= 2.1e-9 * 2.0
        # measurable scale: mean of the coupled tail sum beyond L=1
        spec = SpectralDistribution(ROOT2, UniformFrequencies(0, 1))
        diffs = []
        for k in range(2000):
            hi = generate_gamma_shotnoise(1.0, spec, 30.0, RandomStream(17, f"r{k}"))
            lo = generate_gamma_shotnoise(1.0, spec, 1.0, RandomStream(17, f"r{k}"))
            diffs.append(0.5 * (hi.amplitudes**2).sum() - 0.5 * (lo.amplitudes**2).sum())
        diffs = np.asarray(diffs)
        target = 2.0 * (np.exp(-1.0) - np.exp(-30.0))
        se = diffs.std(ddof=1) / np.sqrt(diffs.size)
        assert diffs.mean() == pytest.approx(target, abs=3 * se)

    def test_prefix_coupling(self, laplace_spectrum):
        small = generate_gamma_shotnoise(1.5, laplace_spectrum, 2.0, RandomStream(4))
        large = generate_gamma_shotnoise(1.5, laplace_spectrum, 7.0, RandomStream(4))
        n = small.n_terms
        assert np.allclose(small.amplitudes, large.amplitudes[:n], rtol=1e-12)
        assert np.array_equal(small.frequencies, large.frequencies[:n])


class TestConditioned:
    def test_exact_term_count(self, gamma_measure, laplace_spectrum):
        exp = generate_conditioned(8, 5.0, gamma_measure, laplace_spectrum, RandomStream(1))
        assert exp.n_terms == 8

    def test_atom_measure_flat_weights(self):
        spec = SpectralDistribution(ROOT2, UniformFrequencies(0, 1))
        measure = AtomLevyMeasure([(1.0, 1.0)])
        exp = generate_conditioned(6, 1.0, measure, spec, RandomStream(9))
        rays = RandomStream(9).child("rayleigh").rayleigh(6)
        assert np.allclose(exp.weights, 1.0)
        assert np.allclose(exp.amplitudes, ROOT2 * rays)

    def test_shotnoise_variant_formula(self):
        nu, level = 1.3, 4.0
        spec = SpectralDistribution(ROOT2, UniformFrequencies(0, 1))
        stream = RandomStream(30)
        exp = generate_conditioned(
            5, level, GammaLevyMeasure(nu), spec, stream, variant="shotnoise"
        )
        u = RandomStream(30).child("amplitude").uniform(5)
        v = RandomStream(30).child("shot").exponential(5)
        assert np.allclose(exp.weights, nu * v * np.exp(-nu * level * u), rtol=1e-12)

    def test_shotnoise_variant_needs_gamma(self, laplace_spectrum):
        with pytest.raises(ValueError):
            generate_conditioned(
                3, 1.0, AtomLevyMeasure([(1, 1.0)]), laplace_spectrum, RandomStream(0),
                variant="shotnoise",
            )

    def test_second_moment_quadrature_oracle(self):
        # E xi^2 = 2*sigma0^2*(1/5)*int_0^5 inv(g) dg at nu=1, sigma0=sqrt(2);
        # closed form (4/5) exp(-E1inv(5)) cross-checks the quadrature
        measure = GammaLevyMeasure(1.0)
        spec = SpectralDistribution(ROOT2, UniformFrequencies(0, 1))
        by_quad = 0.8 * quad(lambda g: measure.tail_inverse(g), 0.0, 5.0, limit=200)[0]
        closed = 0.8 * np.exp(-exp_integral_e1_inverse(5.0))
        assert by_quad == pytest.approx(closed, rel=1e-6)
        assert closed == pytest.approx(0.7969677897971678, rel=1e-9)  # frozen
        xi2 = np.concatenate(
            [
                generate_conditioned(8, 5.0, measure, spec, RandomStream(2, f"r{k}"))
                .amplitudes ** 2
                for k in range(3000)
            ]
        )
        se = xi2.std(ddof=1) / np.sqrt(xi2.size)
        assert xi2.mean() == pytest.approx(closed, abs=3 * se)


class TestDiscrete:
    def test_deterministic_single_atom(self):
        # one atom with the degenerate subordinator: xi = sigma0 * Rayleigh,
        # giving E X(0)^2 = sigma0^2 as the spectral mass demands
        sigma0 = 1.7
        spec = SpectralDistribution(sigma0, DiscreteFrequencies([(2.0, 1.0)]))
        exp = generate_discrete(spec, deterministic_increments(), RandomStream(6))
        ray = RandomStream(6).child("rayleigh").rayleigh(1)
        assert exp.n_terms == 1
        assert exp.frequencies[0] == 2.0
        assert exp.weights[0] == pytest.approx(sigma0**2 / 2.0)
        assert exp.amplitudes[0] == pytest.approx(sigma0 * ray[0])

    def test_variance_matches_spectral_mass(self):
        sigma0 = np.sqrt(3.0)
        spec = SpectralDistribution(
            sigma0, DiscreteFrequencies([(1.0, 0.25), (2.0, 0.5), (5.0, 0.25)])
        )
        sampler = gamma_increments(1.5)
        x0 = np.array(
            [
                evaluate_at(generate_discrete(spec, sampler, RandomStream(40, f"r{k}")), 0.0)[0]
                for k in range(8000)
            ]
        )
        se = np.std(x0**2, ddof=1) / np.sqrt(x0.size)
        assert np.mean(x0**2) == pytest.approx(sigma0**2, abs=3 * se)

    def test_requires_discrete_law(self, laplace_spectrum):
        with pytest.raises(ValueError):
            generate_discrete(laplace_spectrum, deterministic_increments(), RandomStream(0))


class TestGaussianLimit:
    def test_scale_one_reproduces_inverse_levy(self, gamma_measure, laplace_spectrum):
        a = generate_gaussian_limit(gamma_measure, laplace_spectrum, 1.0, RandomStream(3), level=5.0)
        b = generate_inverse_levy(gamma_measure.scale(1.0), laplace_spectrum, 5.0, RandomStream(3))
        assert np.allclose(a.amplitudes, b.amplitudes, rtol=1e-14)
        assert np.array_equal(a.frequencies, b.frequencies)

    def test_weights_non_increasing(self, gamma_measure, laplace_spectrum):
        exp = generate_gaussian_limit(gamma_measure, laplace_spectrum, 25.0, RandomStream(8))
        assert np.all(np.diff(exp.weights) <= 1e-15)

    def test_variance_independent_of_scale(self, gamma_measure, laplace_spectrum):
        # Var(X_L(0)/sqrt(L)) = sigma0^2 * retained fraction, for every L
        sig2 = laplace_spectrum.sigma0**2
        for scale in (1.0, 10.0, 100.0):
            x0 = ensemble.sample_at_times(
                gamma_measure, laplace_spectrum, [0.0], 30_000, seed=50,
                method="gaussian_limit", limit_scale=scale,
            )[:, 0]
            assert x0.var() == pytest.approx(sig2, rel=0.02)


class TestStationarity:
    def test_joint_cf_shift_invariance(self, gamma_measure, laplace_spectrum):
        # empirical joint CF of (X(0), X(tau)) vs (X(s), X(s+tau))
        tau, n = 1.0, 20_000
        probes = [(1.0, 0.0), (0.7, -0.5), (0.3, 1.1)]
        base = ensemble.sample_at_times(
            gamma_measure, laplace_spectrum, [0.0, tau], n, seed=60, tag="base"
        )
        for s in (0.3, 1.7):
            shifted = ensemble.sample_at_times(
                gamma_measure, laplace_spectrum, [s, s + tau], n, seed=61, tag=f"s{s}"
            )
            for u1, u2 in probes:
                za = np.cos(u1 * base[:, 0] + u2 * base[:, 1])
                zb = np.cos(u1 * shifted[:, 0] + u2 * shifted[:, 1])
                gap = abs(za.mean() - zb.mean())
                se = np.sqrt(za.var() / n + zb.var() / n)
                assert gap <= 3.5 * se


def test_marginal_cf_of_synthesized_signal(gamma_measure, laplace_spectrum):
    # ensemble CF against the closed-form marginal at the spec's envelope
    n = 30_000
    x0 = ensemble.sample_at_times(gamma_measure, laplace_spectrum, [0.0], n, seed=77)[:, 0]
    u = np.linspace(-5, 5, 41)
    phi = laplace_marginal_cf(u, 1.5, 1.5)
    emp = np.cos(np.outer(u, x0)).mean(axis=1)
    envelope = 3.0 * np.sqrt((1.0 - phi**2) / n) + 1e-3
    assert np.all(np.abs(emp - phi) <= envelope)


class TestSerialization:
    def test_expansion_json_roundtrip(self, gamma_measure, laplace_spectrum):
        exp = generate_inverse_levy(gamma_measure, laplace_spectrum, 6.0, RandomStream(12))
        again = HarmonicExpansion.from_json(exp.to_json())
        assert np.array_equal(exp.amplitudes, again.amplitudes)
        assert np.array_equal(exp.frequencies, again.frequencies)
        assert again.meta["method"] == "inverse_levy"

    def test_path_csv_and_binary_roundtrip(self, tmp_path, gamma_measure, laplace_spectrum):
        from levyharm import SignalPath

        exp = generate_inverse_levy(gamma_measure, laplace_spectrum, 6.0, RandomStream(13))
        path = evaluate(exp, 0.5, 0.05, 200)
        fn = tmp_path / "p.bin"
        path.save_binary(fn)
        again = SignalPath.load_binary(fn)
        assert again.t0 == path.t0 and again.dt == path.dt
        assert np.array_equal(again.values, path.values)

        csv_fn = tmp_path / "p.csv"
        path.save_csv(csv_fn)
        rows = csv_fn.read_text().strip().split("\n")
        assert rows[0] == "t,x"
        assert len(rows) == 201
        t0, x0 = map(float, rows[1].split(","))
        assert t0 == path.t0 and x0 == path.values[0]

    def test_expansion_validation(self):
        with pytest.raises(ValueError):
            HarmonicExpansion(np.array([-1.0]), np.array([1.0]), np.array([0.0]), np.array([0.5]))
        with pytest.raises(ValueError):
            HarmonicExpansion(np.array([1.0]), np.array([1.0]), np.array([7.0]), np.array([0.5]))
        with pytest.raises(ValueError):
            HarmonicExpansion(np.array([1.0, 2.0]), np.array([1.0]), np.array([0.0]), np.array([0.5]))
