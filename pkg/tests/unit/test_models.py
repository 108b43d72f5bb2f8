"""문제 정의 모델 테스트 - 가중치, 경계 조건, 경계 데이터, 표본 함수"""

import numpy as np
import pytest

from twoway.exceptions import InvalidProblemError
from twoway.models import (
    BoundaryCondition,
    BoundaryData,
    BoundaryKind,
    Coefficient,
    ProblemSpec,
    TabulatedFunction,
    Weight,
    WeightKind,
)


class TestWeight:
    """가중치 h(θ)와 전환점"""

    @pytest.mark.critical
    def test_cos_turning_points(self):
        zeros = Weight(WeightKind.COS).zeros(-np.pi, np.pi)
        np.testing.assert_allclose(zeros, [-np.pi / 2, np.pi / 2], atol=1e-12)

    def test_cos_minus_r_turning_points(self):
        r = 0.3
        zeros = Weight(WeightKind.COS_MINUS_R, r=r).zeros(-np.pi, np.pi)
        np.testing.assert_allclose(zeros, [-np.arccos(r), np.arccos(r)], atol=1e-12)

    @pytest.mark.parametrize(
        "kind, expected",
        [(WeightKind.SGN, 0), (WeightKind.LINEAR, 1), (WeightKind.CUBIC, 3), (WeightKind.COS, 1)],
    )
    def test_multiplicity(self, kind, expected):
        assert Weight(kind).multiplicity == expected

    def test_polynomial_weights_vanish_at_origin(self):
        for kind in (WeightKind.LINEAR, WeightKind.CUBIC):
            zeros = Weight(kind).zeros(-1.0, 1.0)
            np.testing.assert_allclose(zeros, [0.0])

    def test_tabulated_weight_roots(self):
        theta = np.linspace(0.05, np.pi - 0.05, 401)
        table = TabulatedFunction(theta, np.sin(theta) * np.cos(theta))
        zeros = Weight(WeightKind.TABULATED, table=table).zeros(theta[0], theta[-1])
        np.testing.assert_allclose(zeros, [np.pi / 2], atol=1e-8)


class TestTabulatedFunction:
    """표본 함수 보간"""

    def test_spline_interpolation_accuracy(self):
        theta = np.linspace(0.0, np.pi, 201)
        table = TabulatedFunction(theta, np.sin(theta))
        points = np.linspace(0.1, 3.0, 17)
        np.testing.assert_allclose(table(points), np.sin(points), atol=1e-6)
        np.testing.assert_allclose(table(points, 1), np.cos(points), atol=1e-4)

    def test_too_few_samples_rejected(self):
        with pytest.raises(InvalidProblemError):
            TabulatedFunction(np.array([0.0, 1.0, 2.0]), np.array([0.0, 1.0, 0.0]))

    def test_non_increasing_samples_rejected(self):
        with pytest.raises(InvalidProblemError):
            TabulatedFunction(np.array([0.0, 1.0, 1.0, 2.0]), np.zeros(4))

    def test_periodic_wraps(self):
        theta = np.linspace(-np.pi, np.pi, 257)
        table = TabulatedFunction(theta, np.cos(theta), periodic=True)
        np.testing.assert_allclose(table(np.array([0.5 + 2 * np.pi])), np.cos(0.5), atol=1e-6)


class TestBoundaryCondition:
    """θ 방향 경계 조건과 영 모드"""

    @pytest.mark.critical
    @pytest.mark.parametrize(
        "kind, zero_mode",
        [
            (BoundaryKind.PERIODIC, True),
            (BoundaryKind.NEUMANN, True),
            (BoundaryKind.DIRICHLET, False),
        ],
    )
    def test_zero_mode(self, kind, zero_mode):
        assert BoundaryCondition(kind).has_zero_mode is zero_mode

    def test_separated_neumann_angles_have_zero_mode(self):
        bc = BoundaryCondition(BoundaryKind.SEPARATED, alpha=np.pi / 2, beta=np.pi / 2)
        assert bc.has_zero_mode
        assert bc.robin_coefficient(0) == pytest.approx(0.0, abs=1e-14)

    def test_robin_coefficient(self):
        bc = BoundaryCondition(BoundaryKind.SEPARATED, alpha=np.pi / 4, beta=np.pi / 3)
        assert bc.robin_coefficient(0) == pytest.approx(1.0)
        assert bc.robin_coefficient(1) == pytest.approx(1.0 / np.sqrt(3.0))
        assert not bc.has_zero_mode

    def test_dirichlet_ends(self):
        bc = BoundaryCondition(BoundaryKind.DIRICHLET)
        assert bc.is_dirichlet_at(0) and bc.is_dirichlet_at(1)
        assert not BoundaryCondition(BoundaryKind.PERIODIC).is_dirichlet_at(0)


class TestBoundaryData:
    """반구간 경계 데이터"""

    def test_sample_by_sign_of_h(self):
        w = BoundaryData(rho_plus=1.0, rho_minus=2.0)
        np.testing.assert_array_equal(
            w.sample(np.zeros(3), np.array([0.5, -0.5, 1.0])), [1.0, 2.0, 1.0]
        )
        assert w.delta_rho == 1.0


class TestProblemSpec:
    """문제 정의 검증"""

    def _spec(self, **kwargs):
        params = dict(
            a=-1.0,
            b=1.0,
            weight=Weight(WeightKind.LINEAR),
            bc=BoundaryCondition(BoundaryKind.DIRICHLET),
        )
        params.update(kwargs)
        return ProblemSpec(**params)

    @pytest.mark.critical
    def test_domain_order(self):
        with pytest.raises(InvalidProblemError) as exc_info:
            self._spec(a=1.0, b=-1.0)
        assert exc_info.value.details["field"] == "domain"

    def test_positive_length(self):
        with pytest.raises(InvalidProblemError):
            self._spec(L=0.0)

    def test_cos_minus_r_range(self):
        with pytest.raises(InvalidProblemError):
            self._spec(
                a=-np.pi,
                b=np.pi,
                weight=Weight(WeightKind.COS_MINUS_R, r=1.0),
                bc=BoundaryCondition(BoundaryKind.PERIODIC),
            )

    def test_positive_diffusion_coefficient(self):
        with pytest.raises(InvalidProblemError):
            self._spec(p=Coefficient(-1.0))

    def test_breakpoints_include_turning_point(self):
        np.testing.assert_allclose(self._spec().breakpoints(), [-1.0, 0.0, 1.0])

    def test_with_L_and_boundary_data_copy(self):
        spec = self._spec()
        longer = spec.with_L(5.0)
        assert longer.L == 5.0 and spec.L == 1.0
        other = spec.with_boundary_data(BoundaryData(3.0, 4.0))
        assert other.w.rho_plus == 3.0 and other.weight is spec.weight

    def test_copy_keeps_all_fields(self):
        spec = self._spec(p=Coefficient(2.0))
        longer = spec.with_L(3.0)
        for name in ("a", "b", "weight", "bc", "p", "w", "name"):
            assert getattr(longer, name) is getattr(spec, name)

    @pytest.mark.parametrize("L", [0.0, -2.0])
    def test_with_L_revalidates(self, L):
        with pytest.raises(InvalidProblemError) as exc_info:
            self._spec().with_L(L)
        assert exc_info.value.details["field"] == "L"
