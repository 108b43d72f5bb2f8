"""테스트 공통 설정 - 세션 단위로 공유하는 스펙트럼과 허용 오차"""

import numpy as np
import pytest

from twoway.operators import build_operators
from twoway.problems import ProblemFactory
from twoway.spectral import solve_spectrum

# 테스트 설정 (허용 오차 일괄 관리)
TEST_CONFIG = {
    "modes": 32,  # 주기 cos 기본 모드 수
    "small_modes": 16,  # 흡수 경계 문제 모드 수
    "quadrature_tol": 1e-12,  # 매끄러운 피적분 함수 구적 오차
    "orthogonality_tol": 1e-6,  # 쌍직교성·대칭성
    "oracle_tol": 1e-6,  # Neumann 급수 vs 사영 직접 풀이
    "flux_tol": 1e-8,  # 플럭스 x 무관성
    "identity_tol": 1e-8,  # 노름 항등식 상대 오차
    "p_norm": 4.0 * np.sqrt(6.0) / (3.0 * np.pi),  # 주기 cos ‖P‖
}


@pytest.fixture(scope="session")
def cos_spec():
    """h = cos θ 주기 문제 (ρ₁ = 1, ρ₂ = 2, L = 1)"""
    return ProblemFactory.create("periodic-cos")


@pytest.fixture(scope="session")
def cos_spectrum(cos_spec):
    return solve_spectrum(cos_spec, TEST_CONFIG["modes"])


@pytest.fixture(scope="session")
def cos_ops(cos_spectrum):
    return build_operators(cos_spectrum, 1.0)


@pytest.fixture(scope="session")
def linear_spec():
    return ProblemFactory.create("linear")


@pytest.fixture(scope="session")
def linear_spectrum(linear_spec):
    return solve_spectrum(linear_spec, TEST_CONFIG["small_modes"])


@pytest.fixture(scope="session")
def cubic_spectrum():
    return solve_spectrum(ProblemFactory.create("cubic"), TEST_CONFIG["small_modes"])


@pytest.fixture(scope="session")
def step_spectrum():
    return solve_spectrum(ProblemFactory.create("step"), TEST_CONFIG["small_modes"])


@pytest.fixture(scope="session")
def cos_r_spectrum():
    """h = cos θ − 0.1 (영 모드는 있지만 ∫h ≠ 0, g 없음)"""
    return solve_spectrum(ProblemFactory.create("periodic-cos-r", {"r": 0.1}), 16)


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)
