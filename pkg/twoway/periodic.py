"""주기 cos θ 채널 문제: 닫힌 형태 급수 계수, 큰 L 점근식, λ_R, 확산 계수.

u = 2L/(2L + π), Δρ = ρ₂ − ρ₁ (h < 0 쪽 유입값 − h > 0 쪽 유입값) 표기를 씁니다.
"""

import logging
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .exceptions import PreconditionError
from .models import BoundaryData, WeightKind
from .operators import build_operators
from .problems import ProblemFactory, cos_minus_r_spec
from .solver import flux, neumann_solve
from .spectral import Spectrum, half_range_moments, solve_spectrum

logger = logging.getLogger(__name__)

DEFAULT_SUM_TERMS = 64

# 큰 L 한-지수 근사의 공표 상수
PUBLISHED_A_INF = 0.0699
PUBLISHED_A_EXP = 0.0446
PUBLISHED_B_INF = 0.0349
PUBLISHED_B_EXP = 0.016


@dataclass
class SeriesCoefficients:
    L: float
    delta_rho: float
    A_L: float
    B_L: float
    C_j: np.ndarray
    X: np.ndarray
    c_orders: List[float]
    d_orders: List[float]
    a0: np.ndarray
    a1: np.ndarray
    tail: float
    n_terms: int

    @property
    def c(self) -> float:
        return float(sum(self.c_orders))

    @property
    def d(self) -> float:
        return float(sum(self.d_orders))

    @property
    def a_first_order(self) -> np.ndarray:
        return self.a0 + self.a1

    def to_dict(self) -> Dict[str, Any]:
        return {
            "L": self.L,
            "A_L": self.A_L,
            "B_L": self.B_L,
            "c": self.c,
            "d": self.d,
            "c_orders": list(self.c_orders),
            "d_orders": list(self.d_orders),
            "tail": self.tail,
            "n_terms": self.n_terms,
        }


def _require_symmetric_cos(spectrum: Spectrum) -> None:
    spec = spectrum.spec
    if not (spec.periodic and spec.weight.kind == WeightKind.COS and spectrum.mirrored):
        raise PreconditionError(
            "반주기 대칭을 갖는 주기 cos θ 스펙트럼이 필요합니다", problem=spec.name
        )


def _pair_terms(spectrum: Spectrum, n_terms: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """음의 모드 열 인덱스, 그 짝 (v_{−k}) 열 인덱스, (Q₊v_k − Q₋v_{−k}) 표본."""
    N = spectrum.N
    n = min(n_terms, N)
    neg = np.arange(N - n, N)
    partner = 2 * N - 1 - neg
    grid = spectrum.grid
    U = np.where(grid.pos_mask[:, None], spectrum.values[:, neg], 0.0) - np.where(
        grid.neg_mask[:, None], spectrum.values[:, partner], 0.0
    )
    return neg, partner, U


def _coupling(spectrum: Spectrum, n_terms: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """X (전체), 음의 모드 인덱스, 그리고 sgn(λ_j)∫(Q₊v_k − Q₋v_{−k}) v_j h 행렬 (2N × n)."""
    X = half_range_moments(spectrum)
    neg, _, U = _pair_terms(spectrum, n_terms)
    overlap = spectrum.values.T @ (spectrum.grid.signed_weights[:, None] * U)
    return X, neg, spectrum.signs[:, None] * overlap


def _sums(
    spectrum: Spectrum, L: float, n_terms: int
) -> Tuple[float, float, np.ndarray, np.ndarray, np.ndarray, float]:
    """(𝒜, ℬ, 𝒞_j, X_j, 음의 모드 인덱스, 𝒜 꼬리 추정)."""
    X, neg, coupling = _coupling(spectrum, n_terms)
    E = -np.expm1(-np.abs(spectrum.eigenvalues[neg]) * L)
    weights = X[neg] * E
    A_L = float(np.sum(X[neg] * weights))
    C_j = coupling @ weights
    B_L = float(-np.sum(C_j[neg] * weights))
    # 절댓값이 큰 절반의 기여
    far = slice(0, neg.size // 2)
    tail = float(np.sum(X[neg][far] * weights[far]))
    return A_L, B_L, C_j, X, neg, abs(tail)


def series_coefficients(
    L: float,
    spectrum: Spectrum,
    order: int = 2,
    rho_plus: float = 1.0,
    rho_minus: float = 2.0,
    n_terms: int = DEFAULT_SUM_TERMS,
) -> SeriesCoefficients:
    """
    c, d (2차까지)와 a_j (1차까지)의 닫힌 형태.

    𝒜(L) = Σ_{k<0} X_k² E_k, 𝒞_j(L) = sgn(λ_j) Σ_{k<0} X_k E_k ∫(Q₊v_k − Q₋v_{−k}) v_j h,
    ℬ(L) = −Σ_{k<0} 𝒞_k X_k E_k, E_k = 1 − e^{−|λ_k| L}.
    """
    _require_symmetric_cos(spectrum)
    if spectrum.N < 16:
        raise PreconditionError("급수 계수에는 N ≥ 16 이 필요합니다", N=spectrum.N)
    if not 0 <= order <= 2:
        raise PreconditionError("order는 0, 1, 2 중 하나여야 합니다", order=order)
    A_L, B_L, C_j, X, neg, tail = _sums(spectrum, L, n_terms)

    delta = rho_minus - rho_plus
    denom = 2.0 * L + np.pi
    d0 = 2.0 * delta / denom
    c0 = 0.5 * (rho_plus + rho_minus) - L * delta / denom
    alpha = -delta + d0 * L
    a0 = alpha * X
    c_orders, d_orders = [c0], [d0]
    a1 = np.zeros_like(a0)
    if order >= 1:
        d1 = -(2.0 / denom) * A_L * (delta - d0 * L)
        c_orders.append((L / denom) * A_L * (delta - d0 * L))
        d_orders.append(d1)
        a1 = alpha * C_j + d1 * L * X
    if order >= 2:
        d2 = (2.0 / denom) * B_L * (delta - d0 * L) + (2.0 * L / denom) * d_orders[1] * A_L
        d_orders.append(d2)
    return SeriesCoefficients(
        L=L,
        delta_rho=delta,
        A_L=A_L,
        B_L=B_L,
        C_j=C_j,
        X=X,
        c_orders=c_orders,
        d_orders=d_orders,
        a0=a0,
        a1=a1,
        tail=tail,
        n_terms=int(neg.size),
    )


def leading_symmetric_eigenvalue(spectrum: Spectrum) -> Tuple[float, float]:
    """
    (반구간 모멘트 X_j ≠ 0 인 최소 양의 고유값, 전체 최소 양의 고유값).
    """
    X = half_range_moments(spectrum)
    pos = spectrum.positive
    lam = spectrum.eigenvalues
    significant = np.abs(X) > 1e-8 * np.abs(X).max()
    symmetric = lam[pos & significant]
    if symmetric.size == 0:
        raise PreconditionError("X_j ≠ 0 인 양의 모드가 없습니다")
    return float(symmetric.min()), float(lam[pos].min())


def _leading_negative(spectrum: Spectrum, neg: np.ndarray, X: np.ndarray) -> int:
    significant = np.abs(X[neg]) > 1e-8 * np.abs(X[neg]).max()
    candidates = neg[significant]
    return int(candidates[np.argmin(np.abs(spectrum.eigenvalues[candidates]))])


def regenerated_constants(
    spectrum: Spectrum, n_terms: int = DEFAULT_SUM_TERMS
) -> Dict[str, float]:
    """
    자체 스펙트럼에서 한-지수 근사 상수를 다시 계산합니다.

    𝒜 ≈ ΣX_k² − X₁²e^{−λ₁L}, ℬ ≈ ℬ(∞) − β₁e^{−λ₁L}; β₁은 ℬ = Σ T_km E_k E_m 에서
    선도 대칭 모드를 포함하는 항의 합입니다.
    """
    _require_symmetric_cos(spectrum)
    X, neg, coupling = _coupling(spectrum, n_terms)
    # T_km = −sgn(λ_k) X_k X_m ∫(Q₊v_m − Q₋v_{−m}) v_k h, k, m < 0
    T = -(X[neg][:, None] * coupling[neg]) * X[neg][None, :]
    lead = _leading_negative(spectrum, neg, X)
    i = int(np.nonzero(neg == lead)[0][0])
    return {
        "lambda_1": float(abs(spectrum.eigenvalues[lead])),
        "A_inf": float(np.sum(X[neg] ** 2)),
        "A_exp": float(X[lead] ** 2),
        "B_inf": float(T.sum()),
        "B_exp": float(T[i, :].sum() + T[:, i].sum()),
    }


def large_L_approx(
    L: float, spectrum: Spectrum, n_terms: int = DEFAULT_SUM_TERMS
) -> Dict[str, float]:
    """
    e^{−λ₁L}만 남긴 𝒜, ℬ 근사 (공표 상수와 재계산 상수 모두).
    """
    if L <= 0:
        raise PreconditionError("L은 양수여야 합니다", L=L)
    regen = regenerated_constants(spectrum, n_terms)
    decay = float(np.exp(-regen["lambda_1"] * L))
    return {
        "L": L,
        "lambda_1": regen["lambda_1"],
        "A_published": PUBLISHED_A_INF - PUBLISHED_A_EXP * decay,
        "B_published": PUBLISHED_B_INF - PUBLISHED_B_EXP * decay,
        "A_regenerated": regen["A_inf"] - regen["A_exp"] * decay,
        "B_regenerated": regen["B_inf"] - regen["B_exp"] * decay,
        **{f"const_{k}": v for k, v in regen.items() if k != "lambda_1"},
    }


@dataclass
class TransportPolynomials:
    """큰 L에서 d·L/Δρ 와 (c − (ρ₁+ρ₂)/2)/Δρ 의 u 다항식 계수."""

    A_inf: float
    B_inf: float
    d_published: Tuple[float, float, float]
    d_iterated: Tuple[float, float, float]
    c_coefficients: Tuple[float, float]

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def d_value(self, u: float, form: str = "iterated") -> float:
        coeffs = self.d_iterated if form == "iterated" else self.d_published
        return float(sum(coef * u ** (k + 1) for k, coef in enumerate(coeffs)))


def transport_polynomials(
    spectrum: Spectrum, n_terms: int = DEFAULT_SUM_TERMS
) -> TransportPolynomials:
    """L → ∞ 극한의 𝒜, ℬ로 수송 다항식 계수를 만듭니다."""
    _require_symmetric_cos(spectrum)
    A, B, *_ = _sums(spectrum, np.inf, n_terms)
    return TransportPolynomials(
        A_inf=A,
        B_inf=B,
        d_published=(1.0 - A + B, A**2 + A - B, -(A**2)),
        d_iterated=(1.0 - A + B, A - B - A**2, A**2),
        c_coefficients=((1.0 - A) / 2.0, A / 2.0),
    )


def lambda_R(
    r: float, spectrum: Optional[Spectrum] = None, N: int = 16
) -> Tuple[float, np.ndarray, Spectrum]:
    """
    cos θ − r 문제의 영점 근방 고유값 λ_R과 평균 1로 정규화한 v_R.

    Returns:
        (λ_R, 격자 노드의 v_R, 사용한 스펙트럼)
    """
    if not 0 < r < 1:
        raise PreconditionError("0 < r < 1 이어야 합니다", r=r)
    spectrum = spectrum or solve_spectrum(cos_minus_r_spec(r), N)
    col = int(np.argmin(np.abs(spectrum.eigenvalues)))
    v = spectrum.values[:, col]
    grid = spectrum.grid
    v_R = v / (grid.integrate(v) / spectrum.spec.period)
    lam = float(spectrum.eigenvalues[col])
    logger.debug(f"λ_R(r={r}) = {lam:.8f} (2r = {2 * r})")
    return lam, v_R, spectrum


@dataclass
class DiffusivityEstimate:
    D: float
    delta: float
    D_fick: float
    residual: float
    L_values: List[float]
    fluxes: List[float]
    short_channel_warning: bool

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _flux_at(spectrum: Spectrum, L: float, delta_rho: float) -> float:
    spec = spectrum.spec.with_L(L).with_boundary_data(BoundaryData(1.0, 1.0 + delta_rho))
    sol = neumann_solve(spec, spectrum, build_operators(spectrum, L))
    return flux(sol)


def diffusivity_estimate(
    L_values: Sequence[float],
    delta_rho: float = 1.0,
    spectrum: Optional[Spectrum] = None,
    N: int = 32,
) -> DiffusivityEstimate:
    """
    −Δρ/flux = (L + δ)/D 선형 적합으로 유효 확산 계수를 추정합니다.

    Fick 형태 flux = −DΔρ/L 의 최소제곱 D_fick도 함께 보고합니다.
    """
    L_arr = np.asarray(sorted(float(L) for L in L_values))
    if L_arr.size < 2:
        raise PreconditionError("확산 계수 적합에는 L 값이 둘 이상 필요합니다")
    short = bool(np.any(L_arr < 10.0))
    if short:
        logger.warning(f"Diffusivity fit includes short channels L < 10: {L_arr.tolist()}")
    if spectrum is None:
        spectrum = solve_spectrum(ProblemFactory.create("periodic-cos"), N)
    fluxes = np.array([_flux_at(spectrum, L, delta_rho) for L in L_arr])
    y = -delta_rho / fluxes
    slope, intercept = np.polyfit(L_arr, y, 1)
    D = 1.0 / slope
    residual = float(np.sqrt(np.mean((slope * L_arr + intercept - y) ** 2)))
    g = delta_rho / L_arr
    D_fick = float(-(fluxes @ g) / (g @ g))
    logger.info(f"Diffusivity: D={D:.5f}, delta={intercept * D:.4f}, D_fick={D_fick:.5f}")
    return DiffusivityEstimate(
        D=float(D),
        delta=float(intercept * D),
        D_fick=D_fick,
        residual=residual,
        L_values=L_arr.tolist(),
        fluxes=fluxes.tolist(),
        short_channel_warning=short,
    )


def ballistic_ratio(
    L: float, spectrum: Spectrum, delta_rho: float = 1.0
) -> Dict[str, float]:
    """짧은 채널에서 d/Δρ가 L에 거의 무관한지 (L과 L/2 비교)."""
    values = {}
    for key, length in (("d_over_delta_L", L), ("d_over_delta_half_L", L / 2.0)):
        spec = spectrum.spec.with_L(length).with_boundary_data(
            BoundaryData(1.0, 1.0 + delta_rho)
        )
        sol = neumann_solve(spec, spectrum, build_operators(spectrum, length))
        values[key] = sol.d / delta_rho
    full, half = values["d_over_delta_L"], values["d_over_delta_half_L"]
    values["relative_change"] = abs(full - half) / abs(full)
    values["L"] = L
    return values
