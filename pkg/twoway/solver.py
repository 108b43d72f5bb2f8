"""Neumann 급수 해법, 직접 풀이 오라클, 해 평가와 플럭스.

해는 f(x, θ) = c + d(x + g(θ)) + Σ_{λ_j>0} a_j e^{−λ_j x} v_j + Σ_{λ_j<0} a_j e^{λ_j(L−x)} v_j
형태이며, 경계 자취는 c + d g_L + Σ a_j v̄_j 입니다.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import scipy.linalg

from .exceptions import (
    OutOfRangeError,
    PreconditionError,
    RankDeficiencyError,
    SingularSystemError,
)
from .models import DirectMethod, Framework, ProblemSpec
from .monitoring.performance import get_performance_monitor, timed
from .operators import (
    MAX_CONDITION,
    OperatorSet,
    apply_WL,
    build_operators,
    expand,
    select_framework,
)
from .quad import PANEL_ORDER, Quadrature, build_grid
from .spectral import Spectrum

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 200
BLOW_UP = 1e12


@dataclass(frozen=True, eq=False)
class OrderIncrement:
    """n차 증분 (c_n, d_n, a^n)과 그 𝓗₁ 성분의 |h| 노름."""

    order: int
    c: float
    d: float
    a: np.ndarray
    norm: float


@dataclass(frozen=True, eq=False)
class SolutionCoefficients:
    """누적 계수와 차수별 증분 기록."""

    spectrum: Spectrum
    L: float
    framework: Framework
    c: float
    d: float
    a: np.ndarray
    order_history: List[OrderIncrement] = field(default_factory=list)
    converged: bool = True
    iterations: int = 0
    observed_ratio: Optional[float] = None
    method: str = "neumann"

    @property
    def increment_norms(self) -> np.ndarray:
        return np.array([inc.norm for inc in self.order_history])

    def truncated(self, order: int) -> "SolutionCoefficients":
        """0..order 차 증분만 더한 부분합."""
        if not self.order_history:
            raise PreconditionError("차수 기록이 없는 해입니다", method=self.method)
        kept = self.order_history[: order + 1]
        return replace(
            self,
            c=float(sum(inc.c for inc in kept)),
            d=float(sum(inc.d for inc in kept)),
            a=np.sum([inc.a for inc in kept], axis=0),
            order_history=kept,
            iterations=len(kept),
        )

    def to_dict(self) -> Dict[str, Any]:
        spectrum = self.spectrum
        return {
            "c": self.c,
            "d": self.d,
            "a": [
                {"j": int(j), "lambda": float(lam), "a_j": float(a)}
                for j, lam, a in zip(spectrum.indices, spectrum.eigenvalues, self.a)
            ],
            "converged": self.converged,
            "iterations": self.iterations,
            "framework": self.framework.value,
            "method": self.method,
            "L": self.L,
            "observed_ratio": self.observed_ratio,
            "increment_norms": self.increment_norms.tolist(),
        }


def _boundary_samples(spec: ProblemSpec, grid: Quadrature) -> np.ndarray:
    return spec.w.sample(grid.nodes, grid.h_at_nodes)


def _increment(order: int, e, ops: OperatorSet) -> OrderIncrement:
    a = e.a.copy()
    large_norm = float(np.sqrt(max(a @ ops.gram_abs @ a, 0.0)))
    if e.bar.size:
        a[ops.small] = e.bar
    return OrderIncrement(order=order, c=e.c, d=e.d, a=a, norm=large_norm)


@timed("solver.neumann_solve")
def neumann_solve(
    spec: ProblemSpec,
    spectrum: Spectrum,
    ops: Optional[OperatorSet] = None,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    w: Optional[np.ndarray] = None,
) -> SolutionCoefficients:
    """
    u = Σ (P W_L)ⁿ P w 반복으로 경계값 문제를 풉니다.

    Args:
        spec: 문제 정의 (경계 데이터 w 포함)
        spectrum: 고유쌍
        ops: 연산자 모음 (None이면 spec.L과 자동 선택된 틀로 조립)
        tol: 증분 |h| 노름 수렴 기준
        max_iter: 최대 차수 수
        w: 격자 노드의 경계 데이터 (None이면 spec.w에서 표본)

    Returns:
        SolutionCoefficients (수렴하지 않으면 converged=False 인 부분합)
    """
    ops = ops or build_operators(spectrum, spec.L)
    grid = spectrum.grid
    w = _boundary_samples(spec, grid) if w is None else np.asarray(w, dtype=float)

    e = expand(w, spectrum, ops)
    history = [_increment(0, e, ops)]
    first = history[0].norm
    converged = first < tol
    ratio: Optional[float] = None

    while not converged and len(history) < max_iter:
        e = expand(apply_WL(e, spectrum, ops), spectrum, ops)
        inc = _increment(len(history), e, ops)
        prev = history[-1].norm
        history.append(inc)
        ratio = inc.norm / prev if prev > 0 else 0.0
        if inc.norm < tol:
            converged = True
        elif inc.norm > BLOW_UP * max(first, tol):
            logger.warning(f"Neumann series blew up at order {inc.order} (ratio {ratio:.3f})")
            break

    if not converged:
        logger.warning(
            f"Neumann series for '{spec.name}' did not converge after {len(history)} "
            f"orders: last increment {history[-1].norm:.3e}, observed ratio {ratio}"
        )
    get_performance_monitor().record_iteration(
        "solver.neumann", len(history), converged, history[-1].norm
    )
    logger.info(
        f"Neumann solve '{spec.name}' L={ops.L}: {len(history)} orders, "
        f"converged={converged}, framework={ops.framework.value}"
    )
    return SolutionCoefficients(
        spectrum=spectrum,
        L=ops.L,
        framework=ops.framework,
        c=float(sum(inc.c for inc in history)),
        d=float(sum(inc.d for inc in history)),
        a=np.sum([inc.a for inc in history], axis=0),
        order_history=history,
        converged=converged,
        iterations=len(history),
        observed_ratio=ratio,
    )


def _unpack(x: np.ndarray, n_base: int) -> Tuple[float, float, np.ndarray]:
    base = list(x[:n_base]) + [0.0, 0.0]
    return float(base[0]), float(base[1]), np.asarray(x[n_base:], dtype=float)


def _projected(
    spec: ProblemSpec, spectrum: Spectrum, ops: OperatorSet, w: np.ndarray
) -> np.ndarray:
    basis = np.hstack([ops.null_basis, ops.v_bar])
    tests = np.hstack([ops.null_tests, ops.mode_tests])
    M = tests.T @ basis
    condition = float(np.linalg.cond(M))
    if condition > MAX_CONDITION:
        raise SingularSystemError("사영 시스템이 특이에 가깝습니다", condition=condition)
    return np.linalg.solve(M, tests.T @ w)


def _least_squares(
    spec: ProblemSpec, spectrum: Spectrum, ops: OperatorSet, oversample: int
) -> np.ndarray:
    n_base = len(ops.null_labels)
    unknowns = n_base + 2 * spectrum.N
    fine = build_grid(spec, oversample * unknowns * PANEL_ORDER)
    nodes = fine.nodes
    same = (fine.sign_h[:, None] * spectrum.signs[None, :]) > 0
    v_bar = np.where(same, 1.0, ops.decay) * spectrum.evaluate_modes(nodes)
    columns = []
    if "c" in ops.null_labels:
        columns.append(np.ones(fine.size))
    if "d" in ops.null_labels:
        g = spectrum.evaluate_g(nodes)
        columns.append(np.where(fine.pos_mask, g, ops.L + g))
    design = np.column_stack(columns + [v_bar])
    scale = np.sqrt(fine.abs_h_weights)
    target = _boundary_samples(spec, fine)
    x, _, rank, sv = scipy.linalg.lstsq(design * scale[:, None], target * scale)
    if rank < unknowns or sv[-1] < 1e-12 * sv[0]:
        raise RankDeficiencyError(float(sv[-1]), int(rank), unknowns)
    return x


@timed("solver.direct_solve")
def direct_solve(
    spec: ProblemSpec,
    spectrum: Spectrum,
    N: Optional[int] = None,
    oversample: int = 2,
    method: DirectMethod = DirectMethod.PROJECTED,
    w: Optional[np.ndarray] = None,
) -> SolutionCoefficients:
    """
    경계 조건을 한 번에 푸는 오라클.

    projected는 전개와 같은 시험 범함수로 정방 시스템 ℓ(w − Bx) = 0 을,
    least_squares는 독립된 조밀 격자에서 |h| 가중 최소제곱 시스템을 풉니다.

    Raises:
        PreconditionError: oversample < 2 이거나 N이 1..spectrum.N 밖인 경우
        RankDeficiencyError: 최소제곱 시스템 계수 부족
    """
    if oversample < 2:
        raise PreconditionError("oversample은 2 이상이어야 합니다", oversample=oversample)
    if N is not None and not 1 <= N <= spectrum.N:
        raise PreconditionError(
            "N은 1 이상 스펙트럼 모드 수 이하여야 합니다", requested=N, available=spectrum.N
        )
    if N is not None and N < spectrum.N:
        spectrum = spectrum.truncate(N)
    framework = select_framework(spec, spectrum)
    ops = build_operators(spectrum, spec.L, framework)
    n_base = len(ops.null_labels)
    if method == DirectMethod.PROJECTED:
        samples = _boundary_samples(spec, spectrum.grid) if w is None else w
        x = _projected(spec, spectrum, ops, samples)
    else:
        x = _least_squares(spec, spectrum, ops, oversample)
    c, d, a = _unpack(x, n_base)
    if "d" not in ops.null_labels:
        d = 0.0
    logger.debug(f"Direct solve ({method.value}) '{spec.name}': c={c:.10g}, d={d:.10g}")
    return SolutionCoefficients(
        spectrum=spectrum,
        L=spec.L,
        framework=framework,
        c=c,
        d=d,
        a=a,
        method=method.value,
    )


def _mode_factors(sol: SolutionCoefficients, x: np.ndarray) -> np.ndarray:
    lam = sol.spectrum.eigenvalues
    # 지수는 항상 0 이하
    exponent = np.where(lam > 0, -lam * x[:, None], lam * (sol.L - x[:, None]))
    return np.exp(exponent)


def evaluate(
    sol: SolutionCoefficients,
    x: np.ndarray,
    theta: np.ndarray,
    spectrum: Optional[Spectrum] = None,
) -> np.ndarray:
    """
    f(x, θ)를 평가합니다.

    Returns:
        x가 스칼라이면 θ 모양의 배열, 아니면 (len(x), len(θ)) 배열

    Raises:
        OutOfRangeError: x가 [0, L] 밖인 경우
    """
    spectrum = spectrum or sol.spectrum
    scalar = np.ndim(x) == 0
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    slack = 1e-12 * max(sol.L, 1.0)
    bad = (x_arr < -slack) | (x_arr > sol.L + slack)
    if bad.any():
        raise OutOfRangeError("x", float(x_arr[bad][0]), 0.0, sol.L)
    x_arr = np.clip(x_arr, 0.0, sol.L)
    theta = np.atleast_1d(np.asarray(theta, dtype=float))

    modes = spectrum.evaluate_modes(theta)
    f = (_mode_factors(sol, x_arr) * sol.a) @ modes.T + sol.c
    if spectrum.has_g:
        f = f + sol.d * (x_arr[:, None] + spectrum.evaluate_g(theta)[None, :])
    return f[0] if scalar else f


def evaluate_on_grid(sol: SolutionCoefficients, x: float) -> np.ndarray:
    """격자 노드에서 f(x, ·) (저장된 모드 표본 사용)."""
    spectrum = sol.spectrum
    factors = _mode_factors(sol, np.array([float(x)]))[0]
    f = spectrum.values @ (factors * sol.a) + sol.c
    if spectrum.g is not None:
        f = f + sol.d * (x + spectrum.g)
    return f


def flux(
    sol: SolutionCoefficients,
    spectrum: Optional[Spectrum] = None,
    grid: Optional[Quadrature] = None,
) -> float:
    """
    ∫ f h dθ = c∫h + d∫g h (고유모드 항은 ∫v_j h = 0 으로 사라짐).

    Raises:
        PreconditionError: 영 모드가 없는 (simple 틀) 문제
    """
    spectrum = spectrum or sol.spectrum
    if not spectrum.has_zero_mode:
        raise PreconditionError(
            "영 모드가 없는 문제에서는 플럭스가 x에 무관하지 않습니다",
            framework=sol.framework.value,
        )
    grid = grid or spectrum.grid
    value = sol.c * grid.integrate(grid.h_at_nodes)
    if spectrum.g is not None:
        value += sol.d * grid.integrate(spectrum.g * grid.h_at_nodes)
    return float(value)


def quadrature_flux(sol: SolutionCoefficients, x: float) -> float:
    """격자 구적으로 계산한 ∫ f(x, θ) h(θ) dθ."""
    grid = sol.spectrum.grid
    return float(grid.signed_weights @ evaluate_on_grid(sol, x))


def boundary_residual(
    sol: SolutionCoefficients, spec: ProblemSpec, grid: Optional[Quadrature] = None
) -> Tuple[float, float]:
    """(‖f(0,·) − w‖_{h>0}, ‖f(L,·) − w‖_{h<0}) |h| 가중 노름."""
    if grid is None or grid is sol.spectrum.grid:
        grid = sol.spectrum.grid
        f0 = evaluate_on_grid(sol, 0.0)
        fL = evaluate_on_grid(sol, sol.L)
    else:
        f0 = evaluate(sol, 0.0, grid.nodes)
        fL = evaluate(sol, sol.L, grid.nodes)
    w = _boundary_samples(spec, grid)
    res_in = np.sum(np.where(grid.pos_mask, grid.abs_h_weights * (f0 - w) ** 2, 0.0))
    res_out = np.sum(np.where(grid.neg_mask, grid.abs_h_weights * (fL - w) ** 2, 0.0))
    return float(np.sqrt(res_in)), float(np.sqrt(res_out))


def density_profile(sol: SolutionCoefficients, x_values: np.ndarray) -> np.ndarray:
    """채널 방향 밀도 ∫ f(x, θ) dθ."""
    grid = sol.spectrum.grid
    return np.array([grid.integrate(evaluate_on_grid(sol, float(x))) for x in x_values])


@dataclass(frozen=True)
class ExitDistribution:
    """유출면 분포: x = 0 에서 h < 0, x = L 에서 h > 0 (|h| 가중 적분 1로 정규화)."""

    theta: np.ndarray
    at_entrance: np.ndarray
    at_exit: np.ndarray


def exit_distribution(sol: SolutionCoefficients) -> ExitDistribution:
    grid = sol.spectrum.grid
    f0 = np.where(grid.neg_mask, evaluate_on_grid(sol, 0.0), np.nan)
    fL = np.where(grid.pos_mask, evaluate_on_grid(sol, sol.L), np.nan)

    def normalize(values: np.ndarray) -> np.ndarray:
        total = np.nansum(grid.abs_h_weights * values)
        return values / total if total != 0 else values

    return ExitDistribution(theta=grid.nodes, at_entrance=normalize(f0), at_exit=normalize(fL))
