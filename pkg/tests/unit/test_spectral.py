"""고유값 문제 풀이 테스트 - 정렬, 정규화, 대칭, 영 모드 보조 함수 g"""

import numpy as np
import pytest

from twoway.exceptions import PreconditionError, ZeroModeError
from twoway.quad import build_grid, inner_A
from twoway.spectral import (
    TrigBasis,
    _fix_phase,
    compute_g,
    half_range_moments,
    make_basis,
    solve_pencil,
    solve_spectrum,
    wronskian_overlap_check,
)

from ..conftest import TEST_CONFIG


class TestSolvePencil:
    """일반화 고유값 문제 K c = λ H c"""

    def test_diagonal_indefinite_pencil(self):
        K = np.diag([1.0, 2.0])
        H = np.diag([1.0, -1.0])
        lam, _ = solve_pencil(K, H, None)
        np.testing.assert_allclose(np.sort(lam), [-2.0, 1.0])

    def test_constant_null_space_is_removed(self, cos_spec):
        basis = make_basis(cos_spec, 32)
        assert isinstance(basis, TrigBasis)
        K, H, _, _ = basis.matrices(cos_spec)
        lam, C = solve_pencil(K, H, basis.constant_vector())
        assert np.all(np.isfinite(lam))
        assert np.abs(lam).min() > 1.0
        residual = np.linalg.norm(K @ C - H @ C * lam, axis=0) / np.linalg.norm(K @ C, axis=0)
        assert residual.max() < 1e-8


class TestSpectrumOrdering:
    """열 순서 j = −N..−1, 1..N"""

    @pytest.mark.critical
    def test_sign_split_and_order(self, cos_spectrum):
        N = cos_spectrum.N
        lam = cos_spectrum.eigenvalues
        assert N == TEST_CONFIG["modes"]
        assert np.all(lam[:N] < 0) and np.all(lam[N:] > 0)
        assert np.all(np.diff(lam) > 0)
        np.testing.assert_array_equal(cos_spectrum.indices[[0, N - 1, N, -1]], [-N, -1, 1, N])

    def test_column_lookup(self, cos_spectrum):
        assert cos_spectrum.eigenvalue(1) == cos_spectrum.eigenvalues[cos_spectrum.N]
        assert cos_spectrum.eigenvalue(-1) == cos_spectrum.eigenvalues[cos_spectrum.N - 1]
        with pytest.raises(IndexError):
            cos_spectrum.column(0)

    def test_truncate_keeps_smallest(self, cos_spectrum):
        small = cos_spectrum.truncate(4)
        N = cos_spectrum.N
        np.testing.assert_array_equal(small.eigenvalues, cos_spectrum.eigenvalues[N - 4 : N + 4])
        assert small.values.shape == (cos_spectrum.grid.size, 8)

    def test_invalid_mode_count(self, cos_spec):
        with pytest.raises(PreconditionError):
            solve_spectrum(cos_spec, 0)


class TestNormalization:
    """부호 가중 정규화와 에너지 노름"""

    @pytest.mark.critical
    def test_residual_filter(self, cos_spectrum, linear_spectrum):
        assert cos_spectrum.residuals.max() < 1e-6
        assert linear_spectrum.residuals.max() < 1e-6

    @pytest.mark.critical
    def test_signed_biorthonormality(self, cos_spectrum, linear_spectrum):
        for spectrum in (cos_spectrum, linear_spectrum):
            V = spectrum.values
            signed = V.T @ (spectrum.grid.signed_weights[:, None] * V)
            np.testing.assert_allclose(
                spectrum.signs[:, None] * signed,
                np.eye(2 * spectrum.N),
                atol=TEST_CONFIG["orthogonality_tol"],
            )

    def test_energy_norm_equals_abs_eigenvalue(self, linear_spectrum):
        grid = linear_spectrum.grid
        for col in (0, linear_spectrum.N - 1, linear_spectrum.N, 2 * linear_spectrum.N - 1):
            v = linear_spectrum.values[:, col]
            dv = linear_spectrum.derivatives[:, col]
            energy = inner_A(v, v, grid, du=dv, dv=dv)
            assert energy == pytest.approx(abs(linear_spectrum.eigenvalues[col]), rel=1e-6)


class TestPeriodicSymmetry:
    """h(θ + π) = −h(θ) 인 주기 cos 문제의 반주기 대칭"""

    @pytest.mark.critical
    def test_mirrored_eigenvalues(self, cos_spectrum):
        assert cos_spectrum.mirrored
        N = cos_spectrum.N
        np.testing.assert_allclose(
            cos_spectrum.eigenvalues[:N], -cos_spectrum.eigenvalues[N:][::-1], rtol=1e-12
        )

    @pytest.mark.critical
    def test_half_period_shift_maps_modes(self, cos_spectrum):
        theta = np.linspace(-np.pi, 0.0, 37)
        shifted = cos_spectrum.evaluate_modes(theta + np.pi)
        plain = cos_spectrum.evaluate_modes(theta)
        for j in range(1, cos_spectrum.N + 1):
            np.testing.assert_allclose(
                shifted[:, cos_spectrum.column(j)],
                plain[:, cos_spectrum.column(-j)],
                atol=TEST_CONFIG["orthogonality_tol"],
            )

    def test_odd_sector_moments_vanish(self, cos_spectrum):
        X = half_range_moments(cos_spectrum)
        significant = np.abs(X) > 1e-8 * np.abs(X).max()
        assert 0 < significant.sum() < X.size


class TestPhaseConvention:
    """|v|가 최댓값의 절반을 처음 넘는 노드에서 v > 0 (mirrored면 양의 모드만)"""

    @pytest.mark.critical
    @pytest.mark.parametrize("fixture", ["linear_spectrum", "cos_r_spectrum"])
    def test_all_modes_follow_phase_rule(self, request, fixture):
        spectrum = request.getfixturevalue(fixture)
        assert not spectrum.mirrored
        np.testing.assert_array_equal(_fix_phase(spectrum.values), 1.0)

    @pytest.mark.critical
    def test_mirrored_positive_modes_follow_phase_rule(self, cos_spectrum):
        N = cos_spectrum.N
        np.testing.assert_array_equal(_fix_phase(cos_spectrum.values[:, N:]), 1.0)

    def test_mirrored_negative_modes_follow_symmetry(self, cos_spectrum):
        # 음의 모드 부호는 반주기 이동된 양의 모드를 따름
        N = cos_spectrum.N
        theta = cos_spectrum.grid.nodes
        shifted = cos_spectrum.evaluate_modes(theta + np.pi)[:, N:]
        expected = _fix_phase(shifted)[::-1]
        np.testing.assert_array_equal(_fix_phase(cos_spectrum.values[:, :N]), expected)


class TestZeroMode:
    """영 모드와 g"""

    @pytest.mark.critical
    def test_g_for_cosine_weight(self, cos_spectrum):
        # A g = −h, ∫g = 0 의 해는 g = −cos θ
        np.testing.assert_allclose(
            cos_spectrum.g, -np.cos(cos_spectrum.grid.nodes), atol=1e-8
        )
        assert cos_spectrum.grid.integrate(cos_spectrum.g) == pytest.approx(0.0, abs=1e-10)

    def test_g_evaluation_off_grid(self, cos_spectrum):
        theta = np.array([0.1, 1.0, 2.5])
        np.testing.assert_allclose(cos_spectrum.evaluate_g(theta), -np.cos(theta), atol=1e-8)

    def test_compute_g_matches(self, cos_spec, cos_spectrum):
        g = compute_g(cos_spec, cos_spectrum.grid, basis_size=64)
        np.testing.assert_allclose(g, cos_spectrum.g, atol=1e-8)

    def test_dirichlet_has_no_zero_mode(self, linear_spec, linear_spectrum):
        assert not linear_spectrum.has_zero_mode
        assert linear_spectrum.g is None
        with pytest.raises(ZeroModeError):
            compute_g(linear_spec, linear_spectrum.grid)
        with pytest.raises(ZeroModeError):
            linear_spectrum.evaluate_g(np.array([0.0]))

    def test_cos_minus_r_has_zero_mode_without_g(self, cos_r_spectrum):
        assert cos_r_spectrum.has_zero_mode
        assert cos_r_spectrum.g is None
        assert not cos_r_spectrum.mirrored


class TestElementBasis:
    """흡수 경계 문제 (조각 Legendre 기저)"""

    def test_dirichlet_modes_vanish_at_ends(self, linear_spectrum):
        ends = linear_spectrum.evaluate_modes(np.array([-1.0, 1.0]))
        np.testing.assert_allclose(ends, 0.0, atol=1e-10)

    def test_explicit_grid_is_used(self, linear_spec):
        grid = build_grid(linear_spec, 512)
        spectrum = solve_spectrum(linear_spec, 4, grid=grid)
        assert spectrum.grid is grid
        assert spectrum.values.shape == (grid.size, 8)


class TestWronskianOverlap:
    """반대 부호 모드 겹침의 전환점 Wronskian 표현"""

    @pytest.mark.important
    def test_linear_weight(self, linear_spectrum):
        lhs, rhs = wronskian_overlap_check(linear_spectrum, 1, -1)
        assert lhs == pytest.approx(rhs, rel=1e-3)

    def test_same_sign_rejected(self, linear_spectrum):
        with pytest.raises(PreconditionError):
            wronskian_overlap_check(linear_spectrum, 1, 2)

    def test_periodic_rejected(self, cos_spectrum):
        with pytest.raises(PreconditionError):
            wronskian_overlap_check(cos_spectrum, 1, -1)
