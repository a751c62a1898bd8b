import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import (
    PAULI_X,
    PAULI_Z,
    op,
    random_hermitian,
    random_projector,
    random_unit,
    riemann_line_mean,
    state,
)

from hobs import (
    DimensionMismatch,
    GammaModel,
    HiddenPoint,
    LineSteps,
    NonQuadraticFirstMoment,
    NotAProjector,
    SharedParameterSum,
    ZeroInput,
    apply_borel,
    build_hidden_observable,
    cdf,
    draw_u,
    evaluate,
    expectation,
    gamma_from_complex,
    line_integral_exact,
    line_mean,
    line_weights,
    merge_distribution,
    moments_check,
    orthodoxy_reconstruct,
    orthodoxy_second_moment_gap,
    parse,
    proposition_from_projector,
    proposition_measure_on_line,
    pushforward_ks,
    quantile,
    random_ray,
    spectral_decompose,
    spectral_support_check,
    statistical_equivalence_check,
    validate_hermitian,
)
from hobs.kernel import u_from_words

UNIFORM = GammaModel.uniform()
ARG = GammaModel.complex_arg()


class SharedParameterProduct:
    """Test-local pointwise product on a shared hidden point.

    Products of observable functions generally fall outside the
    orthodox class; this drives the NonQuadraticFirstMoment path.
    """

    def __init__(self, *parts):
        self.parts = parts

    @property
    def dim(self):
        return self.parts[0].dim

    def evaluate(self, point):
        out = 1.0
        for p in self.parts:
            out *= p.evaluate(point)
        return out

    def line_steps(self, psi):
        profiles = [p.line_steps(psi) for p in self.parts]
        right = np.unique(np.concatenate([s.right_edges for s in profiles]))
        values = profiles[0].value_at(right).astype(float).copy()
        for s in profiles[1:]:
            values = values * s.value_at(right)
        return LineSteps(edges=np.concatenate(([0.0], right)), values=values)


class TestGammaModel:
    def test_kinds_validated(self):
        with pytest.raises(ValueError):
            GammaModel(kind="other")

    def test_arg_of_minus_one_is_half(self):
        assert gamma_from_complex(complex(math.cos(math.pi), math.sin(math.pi))) == pytest.approx(0.5, abs=1e-15)

    def test_arg_of_i_is_quarter(self):
        assert gamma_from_complex(1j) == pytest.approx(0.25, abs=1e-16)

    def test_arg_of_minus_i_wraps_to_three_quarters(self):
        assert gamma_from_complex(-1j) == pytest.approx(0.75, abs=1e-16)

    def test_positive_real_axis_remapped_interior(self):
        u = gamma_from_complex(1.0)
        assert 0.0 < u < 1e-300

    def test_zero_rejected(self):
        with pytest.raises(ZeroInput):
            gamma_from_complex(0.0)

    @pytest.mark.parametrize("gamma", [UNIFORM, ARG])
    def test_words_map_into_open_interval(self, gamma):
        w = np.linspace(0.0, 1.0, 1001, endpoint=False)
        u = u_from_words(gamma, w, np.flip(w))
        assert np.all(u > 0.0) and np.all(u < 1.0)

    def test_uniform_kind_passes_words_through(self):
        w1 = np.array([0.0, 0.25, 0.875])
        u = u_from_words(UNIFORM, w1, np.zeros(3))
        assert u[1] == 0.25 and u[2] == 0.875 and 0 < u[0] < 1e-300

    @pytest.mark.parametrize("gamma", [UNIFORM, ARG])
    def test_pushforward_is_uniform(self, gamma):
        report = pushforward_ks(gamma, 100000, np.random.default_rng(17))
        assert report.passed, f"KS statistic {report.statistic} >= {report.critical_value}"


class TestHiddenPoint:
    def test_normalizes_ray(self):
        p = HiddenPoint(ray=state(3, 4), u=0.5)
        assert np.linalg.norm(p.ray.components) == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize("u", [0.0, 1.0, -0.2, 1.5])
    def test_parameter_must_be_interior(self, u):
        with pytest.raises(ValueError):
            HiddenPoint(ray=state(1, 0), u=u)


class TestCdf:
    def test_equal_weights_at_zero(self):
        S = spectral_decompose(op(np.diag([-1.0, 1.0])))
        assert cdf(S, state(1, 1), 0.0) == pytest.approx(0.5, abs=1e-15)

    def test_below_spectrum_is_zero(self):
        S = spectral_decompose(op(np.diag([-1.0, 1.0])))
        assert cdf(S, state(1, 1), -2.0) == 0.0

    def test_at_top_is_one(self):
        S = spectral_decompose(op(np.diag([-1.0, 1.0])))
        assert cdf(S, state(1, 1), 1.0) == pytest.approx(1.0, abs=1e-15)

    def test_pauli_x_weight_from_hand_eigenvector(self):
        # weight of eigenvalue -1 on (1,0) is |<(1,-1)/sqrt2, (1,0)>|^2 = 1/2
        S = spectral_decompose(op(PAULI_X))
        w, v = np.linalg.eigh(PAULI_X)  # independent eigensolver route
        expected = abs(np.vdot(v[:, 0], np.array([1.0, 0.0]))) ** 2
        assert cdf(S, state(1, 0), -1.0) == pytest.approx(expected, abs=1e-12)
        assert expected == pytest.approx(0.5, abs=1e-12)


class TestQuantile:
    def test_jump_tie_selects_lower(self):
        S = spectral_decompose(op(np.diag([-1.0, 1.0])))
        psi = state(1, 1)
        assert quantile(S, psi, 0.3) == -1.0
        assert quantile(S, psi, 0.5) == -1.0  # inf with >= at the jump
        assert quantile(S, psi, 0.7) == 1.0

    def test_identity_operator_constant(self):
        S = spectral_decompose(op(np.eye(3)))
        for u in (0.001, 0.5, 0.999):
            assert quantile(S, state(1, 2j, -1), u) == 1.0

    def test_zero_weight_eigenvalue_skipped(self):
        S = spectral_decompose(op(np.diag([0.0, 5.0])))
        for u in (0.001, 0.5, 0.999):
            assert quantile(S, state(0, 1), u) == 5.0

    def test_u_out_of_range(self):
        S = spectral_decompose(op(np.eye(2)))
        with pytest.raises(ValueError):
            quantile(S, state(1, 0), 0.0)

    @given(st.floats(1e-6, 1 - 1e-6), st.floats(1e-6, 1 - 1e-6))
    @settings(max_examples=60, deadline=None)
    def test_monotone_in_u(self, u1, u2):
        rng = np.random.default_rng(5)
        T = random_hermitian(rng, 5)
        S = spectral_decompose(T)
        psi = state(*random_unit(rng, 5))
        lo, hi = sorted((u1, u2))
        assert quantile(S, psi, lo) <= quantile(S, psi, hi)


class TestHiddenObservable:
    def test_eigenstate_is_constant(self):
        f = build_hidden_observable(op(np.diag([1.0, 0.0])), UNIFORM)
        for u in (0.01, 0.5, 0.99):
            assert evaluate(f, HiddenPoint(ray=state(1, 0), u=u)) == 1.0

    def test_balanced_diagonal_threshold(self):
        f = build_hidden_observable(op(np.diag([-1.0, 1.0])), UNIFORM)
        psi = state(1, 1)
        assert evaluate(f, HiddenPoint(ray=psi, u=0.5)) == -1.0
        assert evaluate(f, HiddenPoint(ray=psi, u=0.5000001)) == 1.0

    def test_pauli_x_threshold_from_cdf_oracle(self):
        f = build_hidden_observable(op(PAULI_X), UNIFORM)
        psi = state(1, 0)
        c = cdf(f.decomposition, psi, -1.0)
        assert evaluate(f, HiddenPoint(ray=psi, u=c)) == f.decomposition.eigenvalues[0]
        assert evaluate(f, HiddenPoint(ray=psi, u=c + 1e-12)) == f.decomposition.eigenvalues[1]

    def test_dimension_mismatch(self):
        f = build_hidden_observable(op(np.eye(3)), UNIFORM)
        with pytest.raises(DimensionMismatch):
            evaluate(f, HiddenPoint(ray=state(1, 0), u=0.5))

    def test_values_stay_in_spectrum(self):
        rng = np.random.default_rng(23)
        f = build_hidden_observable(random_hermitian(rng, 8), UNIFORM)
        report = spectral_support_check(f, n_rays=50, samples_per_ray=200, rng=rng)
        assert report.passed and report.n_evaluations == 10000

    def test_ray_invariance_of_evaluate(self):
        rng = np.random.default_rng(29)
        f = build_hidden_observable(random_hermitian(rng, 4), UNIFORM)
        v = random_unit(rng, 4)
        for z in (2.0, -0.5 + 0.25j, 1j):
            for u in rng.random(10) * 0.98 + 0.01:
                a = evaluate(f, HiddenPoint(ray=state(*v), u=float(u)))
                b = evaluate(f, HiddenPoint(ray=state(*(z * v)), u=float(u)))
                assert a == b

    def test_line_steps_partition_unit_interval(self):
        rng = np.random.default_rng(31)
        f = build_hidden_observable(random_hermitian(rng, 6), UNIFORM)
        steps = f.line_steps(state(*random_unit(rng, 6)))
        assert steps.edges[0] == 0.0 and steps.edges[-1] == 1.0
        assert np.all(np.diff(steps.edges) > 0)
        assert np.sum(np.diff(steps.edges)) == pytest.approx(1.0, abs=1e-12)


class TestLineIntegral:
    def test_symmetric_identity_function(self):
        f = build_hidden_observable(op(np.diag([-1.0, 1.0])), UNIFORM)
        assert line_integral_exact(f, parse("x"), state(1, 1)) == pytest.approx(0.0, abs=1e-15)

    def test_square_of_sign_spectrum(self):
        f = build_hidden_observable(op(np.diag([-1.0, 1.0])), UNIFORM)
        assert line_integral_exact(f, parse("x^2"), state(1, 1)) == pytest.approx(1.0, abs=1e-15)

    def test_pauli_x_mean_hand_value(self):
        # <X psi, psi>/||psi||^2 at psi=(2,1): 2*Re(2*conj(1))/5 = 4/5
        f = build_hidden_observable(op(PAULI_X), UNIFORM)
        assert line_integral_exact(f, parse("x"), state(2, 1)) == pytest.approx(0.8, abs=1e-12)

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_functional_calculus_expectation(self, seed):
        rng = np.random.default_rng(seed)
        T = random_hermitian(rng, 6)
        f = build_hidden_observable(T, UNIFORM)
        psi = state(*random_unit(rng, 6))
        b = parse("min(x^2, 2) - abs(x)")
        lhs = line_integral_exact(f, b, psi)
        rhs = expectation(apply_borel(f.decomposition, b), psi)
        assert lhs == pytest.approx(rhs, abs=1e-12)

    def test_matches_riemann_grid_oracle(self):
        rng = np.random.default_rng(77)
        T = random_hermitian(rng, 4)
        f = build_hidden_observable(T, UNIFORM)
        psi = state(*random_unit(rng, 4))
        exact = line_integral_exact(f, parse("x"), psi)
        grid = riemann_line_mean(f, psi, n=20001)
        assert exact == pytest.approx(grid, abs=2e-3)

    def test_line_mean_agrees_with_line_integral(self):
        rng = np.random.default_rng(13)
        f = build_hidden_observable(random_hermitian(rng, 5), UNIFORM)
        psi = state(*random_unit(rng, 5))
        assert line_mean(f, psi) == pytest.approx(line_integral_exact(f, parse("x"), psi), abs=1e-14)


class TestMoments:
    def test_identity_operator_all_zero_error(self):
        f = build_hidden_observable(op(np.eye(3)), UNIFORM)
        report = moments_check(f, state(1, 1j, -2), n_max=5, tol=1e-12)
        assert report.passed
        assert all(e == pytest.approx(0.0, abs=1e-14) for e in report.errors)

    def test_sign_spectrum_second_moment(self):
        f = build_hidden_observable(op(np.diag([-1.0, 1.0])), UNIFORM)
        report = moments_check(f, state(1, 1), n_max=2, tol=1e-12)
        assert report.line_moments[2] == pytest.approx(1.0, abs=1e-15)
        assert report.operator_moments[2] == pytest.approx(1.0, abs=1e-15)
        assert report.errors[2] <= 1e-14

    @pytest.mark.parametrize("seed", range(6))
    def test_random_operator_matches_matrix_powers(self, seed):
        rng = np.random.default_rng(seed)
        f = build_hidden_observable(random_hermitian(rng, 4), UNIFORM)
        psi = state(*random_unit(rng, 4))
        report = moments_check(f, psi, n_max=5, tol=1e-10)
        assert report.passed, report.errors


class TestOrthodoxy:
    def test_reconstructs_known_operator(self):
        rng = np.random.default_rng(3)
        T = random_hermitian(rng, 4)
        f = build_hidden_observable(T, UNIFORM)
        rebuilt = orthodoxy_reconstruct(f, rng=rng)
        assert np.linalg.norm(rebuilt.entries - T.entries) <= 1e-10 * max(1.0, np.linalg.norm(T.entries))

    def test_constant_function_gives_scaled_identity(self):
        f = build_hidden_observable(op(2.5 * np.eye(3)), UNIFORM)
        rebuilt = orthodoxy_reconstruct(f)
        np.testing.assert_allclose(rebuilt.entries, 2.5 * np.eye(3), atol=1e-12)

    def test_shared_sum_reconstructs_operator_sum(self):
        h = SharedParameterSum(
            parts=(
                build_hidden_observable(op(PAULI_Z), UNIFORM),
                build_hidden_observable(op(PAULI_X), UNIFORM),
            )
        )
        rebuilt = orthodoxy_reconstruct(h)
        np.testing.assert_allclose(rebuilt.entries, PAULI_Z + PAULI_X, atol=1e-12)

    def test_shared_product_is_not_quadratic(self):
        # per-line mean of f_Z * f_X is 1 - 2|p - q|, kinked in the ray
        h = SharedParameterProduct(
            build_hidden_observable(op(PAULI_Z), UNIFORM),
            build_hidden_observable(op(PAULI_X), UNIFORM),
        )
        with pytest.raises(NonQuadraticFirstMoment):
            orthodoxy_reconstruct(h)

    def test_genuine_observable_has_zero_gap(self):
        rng = np.random.default_rng(9)
        T = random_hermitian(rng, 4)
        f = build_hidden_observable(T, UNIFORM)
        for _ in range(5):
            psi = random_ray(rng, 4)
            assert orthodoxy_second_moment_gap(f, T, psi) <= 1e-10

    def test_pauli_sum_gap_vanishes_on_basis_state(self):
        h = SharedParameterSum(
            parts=(
                build_hidden_observable(op(PAULI_Z), UNIFORM),
                build_hidden_observable(op(PAULI_X), UNIFORM),
            )
        )
        total = validate_hermitian(PAULI_Z + PAULI_X)
        assert orthodoxy_second_moment_gap(h, total, state(1, 0)) <= 1e-12

    def test_pauli_sum_gap_is_two_at_balanced_ray(self):
        # p_Z(-1) = p_X(-1) = (1 - sqrt2/2)/2 at this ray, so the sum is
        # -2 then +2 with one breakpoint: integral of h^2 is 4, while
        # <(Z+X)^2> = <2 I> = 2
        h = SharedParameterSum(
            parts=(
                build_hidden_observable(op(PAULI_Z), UNIFORM),
                build_hidden_observable(op(PAULI_X), UNIFORM),
            )
        )
        total = validate_hermitian(PAULI_Z + PAULI_X)
        psi = state(math.cos(math.pi / 8), math.sin(math.pi / 8))
        assert line_mean(h, psi, transform=lambda v: v * v) == pytest.approx(4.0, abs=1e-12)
        assert orthodoxy_second_moment_gap(h, total, psi) == pytest.approx(2.0, abs=1e-12)

    @pytest.mark.parametrize("seed", range(8))
    def test_pauli_sum_gap_matches_step_integral_formula(self, seed):
        # independent oracle: with both summands valued in {-1,+1} and
        # breakpoints p, q, the integral of h^2 is 4(1 - |p - q|)
        rng = np.random.default_rng(seed)
        fZ = build_hidden_observable(op(PAULI_Z), UNIFORM)
        fX = build_hidden_observable(op(PAULI_X), UNIFORM)
        h = SharedParameterSum(parts=(fZ, fX))
        total = validate_hermitian(PAULI_Z + PAULI_X)
        psi = random_ray(rng, 2)
        p = line_weights(fZ.decomposition, psi)[0]
        q = line_weights(fX.decomposition, psi)[0]
        expected = abs(4.0 * (1.0 - abs(p - q)) - 2.0)
        assert orthodoxy_second_moment_gap(h, total, psi) == pytest.approx(expected, abs=1e-12)

    def test_shared_sum_riemann_oracle(self):
        h = SharedParameterSum(
            parts=(
                build_hidden_observable(op(PAULI_Z), UNIFORM),
                build_hidden_observable(op(PAULI_X), UNIFORM),
            )
        )
        rng = np.random.default_rng(41)
        psi = random_ray(rng, 2)
        assert line_mean(h, psi) == pytest.approx(riemann_line_mean(h, psi), abs=2e-3)
        assert line_mean(h, psi, transform=lambda v: v * v) == pytest.approx(
            riemann_line_mean(h, psi, transform=lambda v: v * v), abs=2e-2
        )


class TestPropositions:
    def test_full_space(self):
        L = proposition_from_projector(np.eye(2), UNIFORM)
        assert proposition_measure_on_line(L, state(1, 1j)) == 1.0
        assert L.evaluate(HiddenPoint(ray=state(1, 0), u=0.42)) == 1.0

    def test_empty_event(self):
        L = proposition_from_projector(np.zeros((2, 2)), UNIFORM)
        assert proposition_measure_on_line(L, state(1, 1)) == 0.0
        assert L.evaluate(HiddenPoint(ray=state(1, 0), u=0.42)) == 0.0

    def test_rank_one_half_measure(self):
        # <E>_psi = |<(1,1)/sqrt2, (1,0)>|^2 = 1/2
        E = np.full((2, 2), 0.5)
        L = proposition_from_projector(E, UNIFORM)
        assert proposition_measure_on_line(L, state(1, 0)) == pytest.approx(0.5, abs=1e-12)

    def test_indicator_values_exactly_binary(self):
        rng = np.random.default_rng(4)
        E = random_projector(rng, 5, 2)
        L = proposition_from_projector(E, UNIFORM)
        for _ in range(20):
            point = HiddenPoint(ray=random_ray(rng, 5), u=float(rng.uniform(0.01, 0.99)))
            assert L.evaluate(point) in (0.0, 1.0)

    def test_measure_equals_expectation(self):
        rng = np.random.default_rng(6)
        E = random_projector(rng, 6, 3)
        L = proposition_from_projector(E, UNIFORM)
        for _ in range(10):
            psi = random_ray(rng, 6)
            assert proposition_measure_on_line(L, psi) == pytest.approx(
                expectation(validate_hermitian(E), psi), abs=1e-12
            )

    def test_disjoint_family_measures_add(self):
        rng = np.random.default_rng(8)
        q, _ = np.linalg.qr(rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6)))
        projectors = [np.outer(q[:, i], q[:, i].conj()) for i in range(4)]
        props = [proposition_from_projector(E, UNIFORM) for E in projectors]
        total = validate_hermitian(np.sum(projectors, axis=0))
        for _ in range(5):
            psi = random_ray(rng, 6)
            added = sum(proposition_measure_on_line(L, psi) for L in props)
            assert added == pytest.approx(expectation(total, psi), abs=1e-12)

    @pytest.mark.parametrize("bad", [np.diag([0.5, 0.5]), [[0.0, 1.0], [0.0, 0.0]], np.ones((2, 3))])
    def test_not_a_projector(self, bad):
        with pytest.raises(NotAProjector):
            proposition_from_projector(bad, UNIFORM)


class TestStatisticalEquivalence:
    def test_same_observable(self):
        rng = np.random.default_rng(2)
        f = build_hidden_observable(random_hermitian(rng, 4), UNIFORM)
        rays = [random_ray(rng, 4) for _ in range(10)]
        assert statistical_equivalence_check(f, f, rays).passed

    def test_same_operator_under_both_parameter_models(self):
        rng = np.random.default_rng(12)
        T = random_hermitian(rng, 5)
        f1 = build_hidden_observable(T, UNIFORM)
        f2 = build_hidden_observable(T, ARG)
        rays = [random_ray(rng, 5) for _ in range(20)]
        report = statistical_equivalence_check(f1, f2, rays, weight_tol=1e-12)
        assert report.passed
        assert report.max_weight_error <= 1e-12

    def test_shifted_operator_not_equivalent(self):
        rng = np.random.default_rng(15)
        T = random_hermitian(rng, 3)
        shifted = validate_hermitian(T.entries + np.eye(3))
        f1 = build_hidden_observable(T, UNIFORM)
        f2 = build_hidden_observable(shifted, UNIFORM)
        rays = [random_ray(rng, 3) for _ in range(5)]
        report = statistical_equivalence_check(f1, f2, rays)
        assert not report.passed
        assert report.failures

    def test_composition_compatible_distributions(self):
        # the per-line law of b(f) equals the per-line law of the
        # observable built from b applied through the functional calculus
        rng = np.random.default_rng(21)
        T = random_hermitian(rng, 5)
        f = build_hidden_observable(T, UNIFORM)
        b = parse("clamp(-1, 1) * x + ind(0, 2)")
        g = build_hidden_observable(apply_borel(f.decomposition, b), UNIFORM)
        for _ in range(10):
            psi = random_ray(rng, 5)
            values, weights = f.line_distribution(psi)
            v1, w1 = merge_distribution(b(values), weights)
            v2, w2 = g.line_distribution(psi)
            v2, w2 = merge_distribution(v2, w2)
            keep1, keep2 = w1 > 1e-12, w2 > 1e-12
            np.testing.assert_allclose(v1[keep1], v2[keep2], atol=1e-9)
            np.testing.assert_allclose(w1[keep1], w2[keep2], atol=1e-10)


class TestDrawU:
    @pytest.mark.parametrize("gamma", [UNIFORM, ARG])
    def test_open_interval_and_deterministic(self, gamma):
        u1 = draw_u(gamma, np.random.default_rng(99), 1000)
        u2 = draw_u(gamma, np.random.default_rng(99), 1000)
        assert np.array_equal(u1, u2)
        assert np.all((u1 > 0.0) & (u1 < 1.0))
