"""경계값 문제 풀이 테스트 - Neumann 급수, 직접 풀이 오라클, 해 평가"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twoway.exceptions import OutOfRangeError, PreconditionError
from twoway.models import BoundaryData, DirectMethod, Framework
from twoway.solver import (
    boundary_residual,
    density_profile,
    direct_solve,
    evaluate,
    evaluate_on_grid,
    exit_distribution,
    flux,
    neumann_solve,
    quadrature_flux,
)

from ..conftest import TEST_CONFIG


@pytest.fixture(scope="module")
def cos_solution(cos_spec, cos_spectrum):
    return neumann_solve(cos_spec, cos_spectrum)


@pytest.fixture(scope="module")
def linear_solution(linear_spec, linear_spectrum):
    return neumann_solve(linear_spec, linear_spectrum)


class TestNeumannSeries:
    """u = Σ (P W_L)ⁿ P w"""

    @pytest.mark.critical
    def test_converges_for_cosine(self, cos_solution):
        assert cos_solution.converged
        assert cos_solution.framework == Framework.EXTENDED
        assert cos_solution.observed_ratio < 1.0
        assert cos_solution.increment_norms[-1] < 1e-10

    @pytest.mark.critical
    def test_order_zero_coefficients(self, cos_solution):
        # ρ₁ = 1, ρ₂ = 2, L = 1
        order0 = cos_solution.truncated(0)
        assert order0.d == pytest.approx(2.0 / (2.0 + np.pi), abs=1e-10)
        assert order0.c == pytest.approx(1.5 - 1.0 / (2.0 + np.pi), abs=1e-10)
        assert order0.iterations == 1

    def test_partial_sums_add_up(self, cos_solution):
        full = cos_solution.truncated(cos_solution.iterations - 1)
        assert full.c == pytest.approx(cos_solution.c)
        np.testing.assert_allclose(full.a, cos_solution.a)

    @pytest.mark.critical
    def test_equal_densities_are_trivial(self, cos_spec, cos_spectrum):
        spec = cos_spec.with_boundary_data(BoundaryData(1.5, 1.5))
        sol = neumann_solve(spec, cos_spectrum)
        assert sol.converged and sol.iterations == 1
        assert sol.c == pytest.approx(1.5, abs=1e-10)
        assert sol.d == pytest.approx(0.0, abs=1e-10)
        assert np.abs(sol.a).max() < 1e-10

    def test_iteration_cap_reports_partial_sum(self, cos_spec, cos_spectrum):
        sol = neumann_solve(cos_spec, cos_spectrum, max_iter=2)
        assert not sol.converged
        assert sol.iterations == 2
        assert len(sol.order_history) == 2

    def test_simple_framework(self, linear_solution):
        assert linear_solution.converged
        assert linear_solution.framework == Framework.SIMPLE
        assert linear_solution.c == 0.0 and linear_solution.d == 0.0

    def test_to_dict(self, cos_solution):
        data = cos_solution.to_dict()
        assert data["framework"] == "extended"
        assert data["method"] == "neumann"
        assert len(data["a"]) == 2 * cos_solution.spectrum.N
        assert set(data["a"][0]) == {"j", "lambda", "a_j"}
        assert len(data["increment_norms"]) == cos_solution.iterations


class TestDirectSolve:
    """직접 풀이 오라클"""

    @pytest.mark.critical
    def test_projected_matches_neumann(self, cos_spec, cos_spectrum, cos_solution):
        oracle = direct_solve(cos_spec, cos_spectrum)
        assert oracle.method == "projected"
        assert oracle.c == pytest.approx(cos_solution.c, abs=TEST_CONFIG["oracle_tol"])
        assert oracle.d == pytest.approx(cos_solution.d, abs=TEST_CONFIG["oracle_tol"])
        np.testing.assert_allclose(oracle.a, cos_solution.a, atol=TEST_CONFIG["oracle_tol"])

    def test_projected_matches_neumann_without_zero_mode(
        self, linear_spec, linear_spectrum, linear_solution
    ):
        oracle = direct_solve(linear_spec, linear_spectrum)
        np.testing.assert_allclose(oracle.a, linear_solution.a, atol=TEST_CONFIG["oracle_tol"])

    @pytest.mark.important
    def test_least_squares_agrees(self, cos_spec, cos_spectrum, cos_solution):
        oracle = direct_solve(cos_spec, cos_spectrum, method=DirectMethod.LEAST_SQUARES)
        assert oracle.method == "least_squares"
        assert oracle.c == pytest.approx(cos_solution.c, abs=1e-2)
        assert oracle.d == pytest.approx(cos_solution.d, abs=1e-2)

    def test_truncated_mode_count(self, cos_spec, cos_spectrum):
        oracle = direct_solve(cos_spec, cos_spectrum, N=8)
        assert oracle.a.shape == (16,)
        assert oracle.spectrum.N == 8

    @pytest.mark.parametrize("extra", [1, 8])
    def test_mode_count_beyond_spectrum(self, cos_spec, cos_spectrum, extra):
        with pytest.raises(PreconditionError) as exc_info:
            direct_solve(cos_spec, cos_spectrum, N=cos_spectrum.N + extra)
        assert exc_info.value.details["available"] == cos_spectrum.N

    def test_mode_count_lower_bound(self, cos_spec, cos_spectrum):
        with pytest.raises(PreconditionError):
            direct_solve(cos_spec, cos_spectrum, N=0)

    def test_oversample_lower_bound(self, cos_spec, cos_spectrum):
        with pytest.raises(PreconditionError):
            direct_solve(cos_spec, cos_spectrum, oversample=1)

    def test_no_order_history(self, cos_spec, cos_spectrum):
        with pytest.raises(PreconditionError):
            direct_solve(cos_spec, cos_spectrum).truncated(0)

    @pytest.mark.property
    @settings(max_examples=15, deadline=None)
    @given(
        rho_plus=st.floats(-3.0, 3.0),
        rho_minus=st.floats(-3.0, 3.0),
        L=st.floats(0.05, 5.0),
    )
    def test_neumann_equals_projected(self, cos_spec, cos_spectrum, rho_plus, rho_minus, L):
        spec = cos_spec.with_L(L).with_boundary_data(BoundaryData(rho_plus, rho_minus))
        series = neumann_solve(spec, cos_spectrum)
        oracle = direct_solve(spec, cos_spectrum)
        assert series.converged
        assert series.c == pytest.approx(oracle.c, abs=TEST_CONFIG["oracle_tol"])
        assert series.d == pytest.approx(oracle.d, abs=TEST_CONFIG["oracle_tol"])


class TestEvaluation:
    """f(x, θ) 평가와 관측량"""

    def test_output_shapes(self, cos_solution):
        theta = np.linspace(-np.pi, np.pi, 9)
        assert evaluate(cos_solution, 0.5, theta).shape == (9,)
        assert evaluate(cos_solution, np.array([0.0, 0.5, 1.0]), theta).shape == (3, 9)

    def test_out_of_range(self, cos_solution):
        with pytest.raises(OutOfRangeError):
            evaluate(cos_solution, 1.5, np.zeros(3))
        with pytest.raises(OutOfRangeError):
            evaluate(cos_solution, -0.1, np.zeros(3))

    def test_grid_and_basis_evaluation_agree(self, cos_solution):
        nodes = cos_solution.spectrum.grid.nodes
        np.testing.assert_allclose(
            evaluate(cos_solution, 0.3, nodes), evaluate_on_grid(cos_solution, 0.3), atol=1e-10
        )

    @pytest.mark.critical
    def test_flux_is_x_independent(self, cos_solution):
        expected = -np.pi * cos_solution.d
        assert flux(cos_solution) == pytest.approx(expected, abs=1e-10)
        for x in (0.0, 0.25, 0.5, 1.0):
            assert quadrature_flux(cos_solution, x) == pytest.approx(
                expected, abs=TEST_CONFIG["flux_tol"]
            )

    def test_flux_requires_zero_mode(self, linear_solution):
        with pytest.raises(PreconditionError):
            flux(linear_solution)

    def test_boundary_residual_drops_with_order(self, cos_spec, cos_solution):
        full = sum(boundary_residual(cos_solution, cos_spec))
        order0 = sum(boundary_residual(cos_solution.truncated(0), cos_spec))
        assert full < order0

    def test_density_profile(self, cos_solution):
        density = density_profile(cos_solution, np.linspace(0.0, 1.0, 11))
        assert density.shape == (11,)
        assert np.all(np.isfinite(density))
        # ρ₂ > ρ₁
        assert density[0] < density[-1]

    def test_exit_distribution_normalized(self, cos_solution):
        dist = exit_distribution(cos_solution)
        grid = cos_solution.spectrum.grid
        assert np.nansum(grid.abs_h_weights * dist.at_exit) == pytest.approx(1.0)
        assert np.nansum(grid.abs_h_weights * dist.at_entrance) == pytest.approx(1.0)
        assert np.all(np.isnan(dist.at_exit[grid.neg_mask]))
