"""수렴 진단: ‖W_{L,N}‖, ‖P‖, 거듭제곱 법칙 적합, 항등식 점검, 하한."""

import logging
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
from scipy.optimize import curve_fit

from .exceptions import FitError, GridError, PreconditionError
from .models import LMode
from .operators import OperatorSet, apply_W
from .periodic import lambda_R
from .problems import ProblemFactory
from .spectral import Spectrum, solve_spectrum

logger = logging.getLogger(__name__)


@dataclass
class PowerLawFit:
    """y ≈ A0 − B0 N^{−ν}."""

    A0: float
    B0: float
    nu: float
    residual: float
    n_points: int

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class NormEstimate:
    N_values: List[int]
    norms_squared: List[float]
    gram_A: np.ndarray
    gram_S: np.ndarray
    L_mode: LMode
    L: Optional[float] = None
    fit: Optional[PowerLawFit] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "N_values": list(self.N_values),
            "norms_squared": list(self.norms_squared),
            "L_mode": self.L_mode.value,
            "L": self.L,
            "fit": self.fit.to_dict() if self.fit else None,
        }


@dataclass
class PNormAnalytic:
    """주기 cos 문제의 ‖P‖ 닫힌 형태와 중간량."""

    L: float
    sigma1: float
    sigma2: float
    r1: float
    r2: float
    rho_sup: float
    value: float
    extras: Dict[str, float] = field(default_factory=dict)


def gram_matrices(
    spectrum: Spectrum, L_mode: LMode = LMode.DROP_TRANSCENDENTAL, L: Optional[float] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """
    ‖W u‖²/‖u‖² 극값 문제의 (A, S) 행렬.

    A_jk = ⟨v_j, v_k⟩ (|h| 가중), S_jk = ∫_{sgn(λ_j)h<0} v_j v_k |h| (같은 부호 쌍만).
    include_L 모드는 S에 (1 − e^{−|λ_j|L})(1 − e^{−|λ_k|L})를 곱합니다.
    """
    grid = spectrum.grid
    V = spectrum.values
    A = V.T @ (grid.abs_h_weights[:, None] * V)
    S = np.zeros_like(A)
    signs = spectrum.signs
    for sign, region in ((1.0, grid.neg_mask), (-1.0, grid.pos_mask)):
        cols = signs == sign
        w = np.where(region, grid.abs_h_weights, 0.0)
        S[np.ix_(cols, cols)] = V[:, cols].T @ (w[:, None] * V[:, cols])
    if L_mode == LMode.INCLUDE_L:
        if L is None:
            raise PreconditionError("include_L 모드에는 L이 필요합니다")
        E = 1.0 - np.exp(-np.abs(spectrum.eigenvalues) * L)
        S = S * np.outer(E, E)
    return A, S


def _largest_generalized(S: np.ndarray, A: np.ndarray) -> float:
    try:
        return float(scipy.linalg.eigh(S, A, eigvals_only=True)[-1])
    except np.linalg.LinAlgError as e:
        raise GridError(f"Gram 행렬이 양의 정부호가 아닙니다 (구적 실패): {e}")


def _leading_block(N_max: int, N: int) -> np.ndarray:
    return np.arange(N_max - N, N_max + N)


def wln_norm(
    spectrum: Spectrum,
    ops: Optional[OperatorSet] = None,
    N: Optional[int] = None,
    L_mode: LMode = LMode.DROP_TRANSCENDENTAL,
    L: Optional[float] = None,
) -> float:
    """‖W_{L,N}‖: S u = μ A u 의 최대 고유값의 제곱근."""
    if L is None and ops is not None:
        L = ops.L
    A, S = gram_matrices(spectrum, L_mode, L)
    N = N or spectrum.N
    block = np.ix_(_leading_block(spectrum.N, N), _leading_block(spectrum.N, N))
    return float(np.sqrt(max(_largest_generalized(S[block], A[block]), 0.0)))


def wln_norm_sweep(
    spectrum: Spectrum,
    N_values: Sequence[int],
    L_mode: LMode = LMode.DROP_TRANSCENDENTAL,
    L: Optional[float] = None,
    fit: bool = False,
) -> NormEstimate:
    """한 번 만든 Gram 행렬을 잘라 여러 N에서 ‖W_{L,N}‖²를 계산합니다."""
    N_values = sorted(int(n) for n in N_values)
    if N_values[-1] > spectrum.N:
        raise PreconditionError(
            "스펙트럼 모드 수가 부족합니다", requested=N_values[-1], available=spectrum.N
        )
    A, S = gram_matrices(spectrum, L_mode, L)
    squared = []
    for N in N_values:
        idx = _leading_block(spectrum.N, N)
        block = np.ix_(idx, idx)
        squared.append(_largest_generalized(S[block], A[block]))
    logger.info(
        f"‖W_N‖² for '{spectrum.spec.name}' ({L_mode.value}): "
        + ", ".join(f"N={n}: {s:.5f}" for n, s in zip(N_values, squared))
    )
    estimate = NormEstimate(
        N_values=N_values, norms_squared=squared, gram_A=A, gram_S=S, L_mode=L_mode, L=L
    )
    if fit:
        estimate.fit = powerlaw_fit(N_values, squared)
    return estimate


def _powerlaw(N: np.ndarray, A0: float, B0: float, nu: float) -> np.ndarray:
    return A0 - B0 * N ** (-nu)


def powerlaw_fit(N_values: Sequence[float], norms_squared: Sequence[float]) -> PowerLawFit:
    """
    A0 − B0 N^{−ν} 비선형 최소제곱 적합 (초기값 ν = 1).

    Raises:
        FitError: 점이 5개 미만, N이 순증가하지 않음, 또는 적합 실패
    """
    N = np.asarray(N_values, dtype=float)
    y = np.asarray(norms_squared, dtype=float)
    if N.size < 5:
        raise FitError("적합에는 최소 5개의 점이 필요합니다", n_points=int(N.size))
    if np.any(np.diff(N) <= 0):
        raise FitError("N 값은 순증가해야 합니다", n_points=int(N.size))
    p0 = (y[-1], max((y[-1] - y[0]) * N[0], 1e-3), 1.0)
    try:
        popt, _ = curve_fit(
            _powerlaw,
            N,
            y,
            p0=p0,
            bounds=([-np.inf, -np.inf, 1e-6], [np.inf, np.inf, 10.0]),
            maxfev=20000,
        )
    except (RuntimeError, ValueError) as e:
        raise FitError(f"거듭제곱 법칙 적합이 수렴하지 않았습니다: {e}", n_points=int(N.size))
    residual = float(np.sqrt(np.mean((_powerlaw(N, *popt) - y) ** 2)))
    A0, B0, nu = (float(v) for v in popt)
    logger.info(f"Power-law fit: A0={A0:.4f}, B0={B0:.4f}, nu={nu:.4f}, rms={residual:.2e}")
    return PowerLawFit(A0=A0, B0=B0, nu=nu, residual=residual, n_points=int(N.size))


def p_norm_analytic_periodic(L: float) -> PNormAnalytic:
    """
    주기 cos 문제의 ‖P‖ = √(1 + ρ²) = 4√6/(3π) (L에 무관).

    Raises:
        PreconditionError: L ≤ 0 이거나 r₁² > r₂² 가 성립하지 않는 경우
    """
    if L <= 0:
        raise PreconditionError("L은 양수여야 합니다", L=L)
    sigma1 = float(np.sqrt(8.0 / 3.0 + np.pi * L + L**2))
    sigma2 = float(np.sqrt(8.0 / 3.0))
    r1 = 2.0 * sigma2 / np.pi
    r2 = 2.0 * sigma1 / (2.0 * L + np.pi)
    if not r1**2 > r2**2:
        raise PreconditionError("r₁² > r₂² 조건이 성립하지 않습니다", r1=r1, r2=r2)
    rho_sup = float(np.sqrt(r1**2 - 1.0))
    return PNormAnalytic(
        L=L,
        sigma1=sigma1,
        sigma2=sigma2,
        r1=float(r1),
        r2=float(r2),
        rho_sup=rho_sup,
        value=float(np.sqrt(1.0 + rho_sup**2)),
        extras={"e1_f2": 1.0 / float(r1), "e2_f1": 1.0 / float(r2)},
    )


def p_norm_numeric(ops: OperatorSet) -> float:
    """
    영 블록을 소거하는 정확한 사영 P의 |h| 노름.

    𝓗₁ = span{sgn h · φ_i}^⊥ 이므로 ‖P‖² = max_k ‖k‖² / ‖Π_F k‖² (k ∈ 영 블록,
    F = 시험 범함수의 표현 공간)로 계산합니다.
    """
    if not ops.has_null_block:
        return 1.0
    grid = ops.grid
    W = grid.abs_h_weights[:, None]
    K = ops.null_basis
    F = ops.null_tests / grid.abs_h_weights[:, None]
    gram_K = K.T @ (W * K)
    cross = K.T @ (W * F)
    gram_F = F.T @ (W * F)
    projected = cross @ np.linalg.solve(gram_F, cross.T)
    return float(np.sqrt(_largest_generalized(gram_K, 0.5 * (projected + projected.T))))


def pw_norm(ops: OperatorSet) -> float:
    """유지된 큰 모드 공간에서 ‖P_N W_{L,N}‖ (임계값 틀이면 P_{Λ,N})."""
    spectrum = ops.spectrum
    large = ops.large
    columns = np.where(ops.same_side, 0.0, spectrum.values) * (1.0 - ops.decay)
    columns = columns[:, large]
    if ops.has_null_block:
        x0 = np.linalg.solve(ops.null_matrix, ops.null_tests.T @ columns)
        columns = columns - ops.null_basis @ x0
    T = (ops.mode_tests.T @ columns)[large]
    G = ops.gram_abs[np.ix_(large, large)]
    value = _largest_generalized(T.T @ G @ T, G)
    return float(np.sqrt(max(value, 0.0)))


def identity_check(u: np.ndarray, ops: OperatorSet) -> Tuple[float, float]:
    """
    2‖Wu‖² 와 ‖u‖² − ‖u‖₁² − 2⟨P₊u, P₋u⟩ 를 독립적으로 계산합니다.

    Args:
        u: 스펙트럼 열 순서의 계수 벡터
    """
    spectrum = ops.spectrum
    grid = spectrum.grid
    Wu = apply_W(u, spectrum, ops)
    lhs = 2.0 * float(grid.abs_h_weights @ Wu**2)
    pos, neg = spectrum.positive, spectrum.negative
    G = ops.gram_abs
    cross = float(u[pos] @ G[np.ix_(pos, neg)] @ u[neg])
    rhs = float(u @ G @ u) - float(u @ u) - 2.0 * cross
    return lhs, rhs


def wlp_lower_bound(r: float, L: float, spectrum: Optional[Spectrum] = None) -> float:
    """
    cos θ − r 문제에서 ‖W_L P‖의 하한 (1 − e^{−λ_R L})·𝒩(r).

    𝒩(r)² = ∫_{cos θ<r} v_R² |h| / ∫ (v_R − 1)² |h|, v_R은 평균 1로 정규화.
    """
    if not 0 < r < 1:
        raise PreconditionError("0 < r < 1 이어야 합니다", r=r)
    lam_R, v_R, spectrum = lambda_R(r, spectrum)
    grid = spectrum.grid
    num = float(np.sum(np.where(grid.neg_mask, grid.abs_h_weights * v_R**2, 0.0)))
    den = float(grid.abs_h_weights @ (v_R - 1.0) ** 2)
    scale = np.sqrt(num / den)
    bound = (1.0 - np.exp(-lam_R * L)) * scale
    logger.debug(
        f"W_L P lower bound r={r}, L={L}: λ_R={lam_R:.6f}, 𝒩={scale:.4f}, bound={bound:.4f}"
    )
    return float(bound)


def norm_equivalence(
    ops: OperatorSet, n_samples: int = 100, seed: int = 0
) -> Dict[str, float]:
    """무작위 u에 대한 ‖u‖₁/‖u‖ 범위와 상수 C."""
    rng = np.random.default_rng(seed)
    coeffs = rng.uniform(-1.0, 1.0, size=(n_samples, 2 * ops.N))
    norm_1 = np.sqrt(np.sum(coeffs**2, axis=1))
    norm = np.sqrt(np.einsum("ij,jk,ik->i", coeffs, ops.gram_abs, coeffs))
    ratio = norm_1 / norm
    low, high = float(ratio.min()), float(ratio.max())
    return {"min_ratio": low, "max_ratio": high, "C": max(high, 1.0 / low)}


def predicted_overlap_slope(multiplicity: int) -> float:
    return -(3.0 * multiplicity + 4.0) / (4.0 * multiplicity + 8.0)


def overlap_decay_slope(spectrum: Spectrum, j: int = 1) -> Tuple[float, float]:
    """
    |⟨v_j, v_k⟩| 의 |λ_k| 에 대한 로그 기울기 (반대 부호 k, 상위 한 자릿수 구간).

    Returns:
        (적합 기울기, −(3m+4)/(4m+8))
    """
    grid = spectrum.grid
    col = spectrum.column(j)
    opposite = spectrum.signs != spectrum.signs[col]
    lam = np.abs(spectrum.eigenvalues[opposite])
    weighted = grid.abs_h_weights * spectrum.values[:, col]
    overlaps = np.abs(spectrum.values[:, opposite].T @ weighted)
    window = lam >= lam.max() / 10.0
    if window.sum() < 3:
        raise PreconditionError("기울기 적합에 필요한 모드가 부족합니다", modes=int(window.sum()))
    slope = float(np.polyfit(np.log(lam[window]), np.log(overlaps[window]), 1)[0])
    return slope, predicted_overlap_slope(spectrum.spec.weight.multiplicity)


def wn_norm_vs_r(
    r_values: Sequence[float],
    N: int,
    L_mode: LMode = LMode.DROP_TRANSCENDENTAL,
    L: Optional[float] = None,
) -> List[float]:
    """cos θ − r 계열의 ‖W_N‖."""
    values = []
    for r in r_values:
        spec = ProblemFactory.create("periodic-cos-r", {"r": float(r)})
        spectrum = solve_spectrum(spec, N)
        values.append(wln_norm(spectrum, N=N, L_mode=L_mode, L=L))
    return values
