import numpy as np
import pytest

from dmajor.dissipation import (
    BathRates,
    Generator,
    apply_gamma,
    b0_from_rates,
    equidistant_d,
    flow,
    gibbs_vector,
    lowering_raising_ops,
    propagator,
    sigma_plus,
    steady_state,
    thermal_angles,
    thermal_rates,
    zero_temperature_rates,
)


class TestB0FromRates:
    def test_two_level_form(self):
        a1, b1 = 0.8, 0.3
        gen = b0_from_rates(BathRates(n=2, a=[a1], b=[b1]))
        assert np.allclose(gen.b0, [[b1 ** 2, -a1 ** 2], [-b1 ** 2, a1 ** 2]])

    def test_zero_temperature_three_level(self):
        gen = b0_from_rates(zero_temperature_rates(3))
        expected = np.array([[0, -2, 0], [0, 2, -2], [0, 0, 2]], dtype=float)
        assert np.allclose(gen.b0, expected, atol=1e-12)

    def test_zero_rates(self):
        gen = b0_from_rates(BathRates(n=3, a=np.zeros(2), b=np.zeros(2)))
        assert np.array_equal(gen.b0, np.zeros((3, 3)))

    def test_column_sums_vanish_exactly(self):
        rng = np.random.default_rng(0)
        rates = BathRates(n=5, a=rng.uniform(0, 2, 4), b=rng.uniform(0, 2, 4))
        gen = b0_from_rates(rates)
        assert np.max(np.abs(gen.b0.sum(axis=0))) == 0.0


class TestThermalRates:
    def test_uniform_d(self):
        n = 4
        rates = thermal_rates(np.full(n, 1.0 / n))
        j = np.arange(1, n)
        assert np.allclose(rates.a, np.sqrt(j * (n - j) / 2))
        assert np.allclose(rates.b, np.sqrt(j * (n - j) / 2))

    def test_two_level_example(self):
        rates = thermal_rates([0.9, 0.1])
        assert np.isclose(rates.a[0], np.sqrt(0.9))
        assert np.isclose(rates.b[0], np.sqrt(0.1))

    def test_amplitude_identity(self):
        rng = np.random.default_rng(1)
        for n in (2, 3, 5):
            d = rng.uniform(0.1, 1.0, size=n)
            rates = thermal_rates(d)
            j = np.arange(1, n)
            assert np.allclose(rates.a ** 2 + rates.b ** 2, j * (n - j), atol=1e-12)

    def test_kernel(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            d = rng.uniform(0.05, 1.0, size=4)
            gen = b0_from_rates(thermal_rates(d))
            assert np.abs(gen.b0 @ d).sum() <= 1e-12 * max(1.0, d.sum())

    def test_angles(self):
        d = np.array([0.7, 0.2, 0.1])
        theta = thermal_angles(d)
        assert np.allclose(np.cos(theta) ** 2, d[:-1] / (d[:-1] + d[1:]))
        assert np.all((theta > 0) & (theta < np.pi / 2))


class TestGibbs:
    def test_three_level_example(self):
        d = gibbs_vector([0.0, 0.25, 4.25], 1.0)
        assert np.allclose(d, [0.5577, 0.4343, 0.0080], atol=5e-5)

    def test_symmetric_ladder_example(self):
        d = gibbs_vector([-0.64, 0.0, 0.64], 1.0)
        assert np.allclose(d, [0.5539, 0.2921, 0.1540], atol=5e-5)

    def test_high_temperature_limit(self):
        d = gibbs_vector([0.3, 1.4, 2.2], 1e9)
        assert np.max(np.abs(d - 1.0 / 3.0)) <= 1e-8

    def test_shift_invariance(self):
        e = np.array([100.0, 101.0, 105.0])
        assert np.allclose(gibbs_vector(e, 2.0), gibbs_vector(e - 100.0, 2.0))

    def test_rejects_nonpositive_temperature(self):
        with pytest.raises(ValueError):
            gibbs_vector([0.0, 1.0], 0.0)


class TestEquidistant:
    def test_half(self):
        assert np.allclose(equidistant_d(0.5, 3), [4 / 7, 2 / 7, 1 / 7])

    def test_normalized(self):
        for alpha in (0.1, 0.37, 0.9):
            assert np.isclose(equidistant_d(alpha, 5).sum(), 1.0)

    def test_constant_ratio(self):
        d = equidistant_d(0.3, 6)
        assert np.allclose(d[1:] / d[:-1], 0.3)

    def test_matches_gibbs_of_arithmetic_ladder(self):
        t, gap, n = 1.7, 0.9, 5
        d1 = gibbs_vector(gap * np.arange(n), t)
        d2 = equidistant_d(np.exp(-gap / t), n)
        assert np.max(np.abs(d1 - d2)) <= 1e-12

    def test_range_guard(self):
        with pytest.raises(ValueError):
            equidistant_d(1.0, 3)


class TestFlow:
    def test_time_zero(self):
        gen = b0_from_rates(thermal_rates([0.5, 0.5]))
        x = np.array([0.3, 0.7])
        assert np.allclose(flow(gen, x, 0.0), x)

    def test_three_level_thermal_example(self):
        # weighted-ladder convention, fixed by this example
        d = gibbs_vector([0.0, 0.25, 4.25], 1.0)
        gen = b0_from_rates(thermal_rates(d))
        x = np.array([d[2], d[0], d[1]])
        out = flow(gen, x, 0.1)
        assert np.allclose(out, [0.0683, 0.5730, 0.3587], atol=5e-4)

    def test_three_level_unit_ladder_example(self):
        # reference values computed with unit ladder weights, which
        # for n = 3 is exactly the weighted generator at half speed
        d = gibbs_vector([-0.64, 0.0, 0.64], 1.0)
        theta2 = d[:-1] / (d[:-1] + d[1:])
        rates = BathRates(n=3, a=np.sqrt(theta2), b=np.sqrt(1 - theta2))
        gen = b0_from_rates(rates)
        out = flow(gen, [0.55, 0.4, 0.05], 1.0)
        assert np.allclose(out, [0.5783, 0.3098, 0.1119], atol=5e-4)
        gen_w = b0_from_rates(thermal_rates(d))
        assert np.allclose(flow(gen_w, [0.55, 0.4, 0.05], 0.5), out, atol=1e-12)

    def test_preserves_total_and_positivity(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            d = rng.uniform(0.05, 1.0, size=4)
            gen = b0_from_rates(thermal_rates(d))
            x = rng.dirichlet(np.ones(4))
            out = flow(gen, x, rng.uniform(0, 5))
            assert abs(out.sum() - 1.0) <= 1e-10
            assert out.min() >= -1e-10

    def test_rejects_negative_time(self):
        gen = b0_from_rates(thermal_rates([0.5, 0.5]))
        with pytest.raises(ValueError):
            flow(gen, [1.0, 0.0], -0.1)

    def test_propagator_column_stochastic(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            n = rng.integers(2, 6)
            rates = BathRates(n=n, a=rng.uniform(0, 1.5, n - 1), b=rng.uniform(0, 1.5, n - 1))
            gen = b0_from_rates(rates)
            for t in (0.1, 1.0, 10.0):
                p = propagator(gen, t)
                assert np.max(np.abs(p.sum(axis=0) - 1.0)) <= 1e-10
                assert p.min() >= -1e-10


class TestSteadyState:
    def test_zero_temperature(self):
        gen = b0_from_rates(zero_temperature_rates(4))
        assert np.allclose(steady_state(gen), [1, 0, 0, 0])

    def test_zero_temperature_long_time_propagator(self):
        gen = b0_from_rates(zero_temperature_rates(3))
        p = propagator(gen, 60.0)
        target = np.zeros((3, 3))
        target[0] = 1.0
        assert np.max(np.abs(p - target)) <= 1e-8

    def test_thermal(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            d = rng.dirichlet(np.ones(4))
            gen = b0_from_rates(thermal_rates(d))
            assert np.abs(steady_state(gen) - d).sum() <= 1e-8

    def test_single_level(self):
        gen = Generator(np.zeros((1, 1)))
        assert np.array_equal(steady_state(gen), [1.0])

    def test_relaxation(self):
        rng = np.random.default_rng(6)
        d = rng.dirichlet(np.ones(3))
        gen = b0_from_rates(thermal_rates(d))
        x = rng.dirichlet(np.ones(3))
        horizon = 50.0 / np.min(np.diag(gen.b0)[1:])
        assert np.abs(flow(gen, x, horizon) - d).sum() <= 1e-8

    def test_rejects_multidimensional_kernel(self):
        with pytest.raises(ValueError):
            steady_state(b0_from_rates(BathRates(n=3, a=np.zeros(2), b=np.zeros(2))))


class TestDissipator:
    def test_normal_operator_annihilates_identity(self):
        rng = np.random.default_rng(7)
        m = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        normal = m + m.conj().T  # Hermitian, hence normal
        out = apply_gamma([normal], np.eye(3, dtype=complex))
        assert np.max(np.abs(out)) <= 1e-12

    def test_hand_evaluated_two_level(self):
        v = np.zeros((2, 2), dtype=complex)
        v[0, 1] = 1.0  # |e1><e2|
        rho = np.diag([0.0, 1.0]).astype(complex)
        out = apply_gamma([v], rho)
        assert np.allclose(out, np.diag([-1.0, 1.0]))

    def test_diagonal_reduction_matches_rate_matrix(self):
        rng = np.random.default_rng(8)
        for n in range(2, 6):
            rates = BathRates(n=n, a=rng.uniform(0, 2, n - 1), b=rng.uniform(0, 2, n - 1))
            gen = b0_from_rates(rates)
            ops = lowering_raising_ops(rates)
            x = rng.dirichlet(np.ones(n))
            out = apply_gamma(ops, np.diag(x).astype(complex))
            assert np.max(np.abs(out - np.diag(np.diag(out)))) <= 1e-12
            assert np.max(np.abs(np.diag(out).real - gen.b0 @ x)) <= 1e-12

    def test_entrywise_formula_on_general_input(self):
        # the dissipator of a ladder pair has a closed entrywise form; check
        # it on a random non-diagonal matrix
        rng = np.random.default_rng(9)
        n = 5
        a = rng.uniform(0, 2, n - 1)
        b = rng.uniform(0, 2, n - 1)
        ops = lowering_raising_ops(BathRates(n=n, a=a, b=b))
        y = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        out = apply_gamma(ops, y)
        a_prev = np.concatenate(([0.0], a))
        b_next = np.concatenate((b, [0.0]))
        for j in range(n):
            for k in range(n):
                val = 0.5 * (a_prev[j] ** 2 + a_prev[k] ** 2
                             + b_next[j] ** 2 + b_next[k] ** 2) * y[j, k]
                if j + 1 < n and k + 1 < n:
                    val -= a[j] * a[k] * y[j + 1, k + 1]
                if j >= 1 and k >= 1:
                    val -= b[j - 1] * b[k - 1] * y[j - 1, k - 1]
                assert abs(out[j, k] - val) <= 1e-12

    def test_sigma_plus_matches_zero_temperature_rates(self):
        n = 4
        ops = lowering_raising_ops(zero_temperature_rates(n))
        assert np.allclose(ops[0], sigma_plus(n))
        assert np.max(np.abs(ops[1])) == 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            apply_gamma([np.eye(2, dtype=complex)], np.eye(3, dtype=complex))
