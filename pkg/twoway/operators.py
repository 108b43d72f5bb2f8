"""기저 {1, g_L, v_j} 전개와 유한 N 연산자 (Q±, P±, M_L, V, W, W_L, P, P_Λ).

경계 자취 공간을 영 블록 𝓗₀ (상수, g_L, 임계값 아래 모드의 v̄_s)과
고유모드 블록 𝓗₁로 나눕니다. 시험 범함수
    ℓ_c(f) = ∫ f h,  ℓ_d(f) = ∫ f g h,  ℓ_k(f) = sgn(λ_k) ∫ f v_k h
에 대해 고유모드는 영 블록 범함수에 직교하므로 전개는 블록 하삼각 풀이가 됩니다.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import List, Optional, Tuple

import numpy as np

from .exceptions import PreconditionError, SingularSystemError, ThresholdError
from .models import Framework, ProblemSpec, Weight, WeightKind
from .spectral import Spectrum, solve_spectrum

logger = logging.getLogger(__name__)

MAX_CONDITION = 1e12


@dataclass(frozen=True, eq=False)
class Expansion:
    """w ≈ c + d g_L + Σ_s b_s v̄_s + Σ_j a_j v_j.

    a는 스펙트럼 열 순서를 따르며 임계값 아래 모드의 성분은 0이고,
    그 모드들의 계수는 bar (v̄_s 계수)에 담깁니다.
    """

    c: float
    d: float
    a: np.ndarray
    framework: Framework
    bar: np.ndarray = field(default_factory=lambda: np.zeros(0))


def select_framework(
    spec: ProblemSpec, spectrum: Optional[Spectrum] = None, threshold: Optional[float] = None
) -> Framework:
    """경계 조건과 임계값 요청으로 전개 틀을 고릅니다."""
    if threshold is not None:
        return Framework.THRESHOLDED
    if not spec.has_zero_mode:
        return Framework.SIMPLE
    return Framework.EXTENDED


def default_threshold(spec: ProblemSpec, n_modes: int = 4) -> float:
    """cos − r 문제는 r = 0 문제의 최소 양의 고유값 절반, 그 외에는 자기 스펙트럼 기준."""
    reference = spec
    if spec.weight.kind == WeightKind.COS_MINUS_R:
        reference = ProblemSpec(
            a=spec.a,
            b=spec.b,
            weight=Weight(kind=WeightKind.COS),
            bc=spec.bc,
            L=spec.L,
            p=spec.p,
            w=spec.w,
            name=f"{spec.name}-r0",
        )
    lam = solve_spectrum(reference, n_modes).eigenvalues
    return float(0.5 * lam[lam > 0].min())


@dataclass(frozen=True, eq=False)
class OperatorSet:
    """고정된 스펙트럼, L, 전개 틀에 대한 연산자 모음 (조립 후 불변)."""

    spectrum: Spectrum
    L: float
    framework: Framework
    threshold: Optional[float]
    decay: np.ndarray
    small: np.ndarray
    g_L: Optional[np.ndarray]
    null_labels: Tuple[str, ...]
    null_basis: np.ndarray
    null_tests: np.ndarray
    null_matrix: np.ndarray
    condition: float

    @property
    def N(self) -> int:
        return self.spectrum.N

    @property
    def grid(self):
        return self.spectrum.grid

    @property
    def large(self) -> np.ndarray:
        return ~self.small

    @property
    def has_null_block(self) -> bool:
        return bool(self.null_labels)

    @cached_property
    def mode_tests(self) -> np.ndarray:
        """ℓ_k 가중 벡터 (n × 2N)."""
        return self.spectrum.values * self.grid.signed_weights[:, None] * self.spectrum.signs

    @cached_property
    def gram_abs(self) -> np.ndarray:
        V = self.spectrum.values
        return V.T @ (self.grid.abs_h_weights[:, None] * V)

    @cached_property
    def q_plus_gram(self) -> np.ndarray:
        V = self.spectrum.values
        w = np.where(self.grid.pos_mask, self.grid.abs_h_weights, 0.0)
        return V.T @ (w[:, None] * V)

    @cached_property
    def q_minus_gram(self) -> np.ndarray:
        V = self.spectrum.values
        w = np.where(self.grid.neg_mask, self.grid.abs_h_weights, 0.0)
        return V.T @ (w[:, None] * V)

    @cached_property
    def same_side(self) -> np.ndarray:
        """sgn(λ_j) h > 0 인 노드 마스크 (n × 2N)."""
        return (self.grid.sign_h[:, None] * self.spectrum.signs[None, :]) > 0

    @cached_property
    def v_bar(self) -> np.ndarray:
        """v̄_j: sgn(λ_j)h > 0 에서 v_j, 반대쪽에서 e^{−|λ_j|L} v_j."""
        return np.where(self.same_side, 1.0, self.decay) * self.spectrum.values

    @cached_property
    def signed_identity_error(self) -> float:
        """max |sgn(λ_j)⟨v_j, v_k⟩_h − δ_jk| (⟨,⟩₁ 정규직교성 점검)."""
        signed = self.spectrum.signs[:, None] * (self.q_plus_gram - self.q_minus_gram)
        return float(np.abs(signed - np.eye(2 * self.N)).max())

    def with_threshold(self, threshold: float) -> "OperatorSet":
        return build_operators(self.spectrum, self.L, Framework.THRESHOLDED, threshold)


def build_operators(
    spectrum: Spectrum,
    L: Optional[float] = None,
    framework: Optional[Framework] = None,
    threshold: Optional[float] = None,
) -> OperatorSet:
    """
    영 블록 기저와 시험 범함수를 조립합니다.

    Raises:
        PreconditionError: 영 모드가 없는데 extended를 요청한 경우
        ThresholdError: Λ가 모든 |λ_j|보다 큰 경우
        SingularSystemError: 영 블록 시스템의 조건수가 1e12를 넘는 경우
    """
    spec = spectrum.spec
    L = spec.L if L is None else L
    if L < 0:
        raise PreconditionError("L은 음수일 수 없습니다", L=L)
    framework = framework or select_framework(spec, spectrum, threshold)
    if framework == Framework.EXTENDED and not spectrum.has_zero_mode:
        raise PreconditionError(
            "extended 틀은 영 모드가 있는 문제에만 쓸 수 있습니다", problem=spec.name
        )
    if framework == Framework.THRESHOLDED and threshold is None:
        threshold = default_threshold(spec)

    grid = spectrum.grid
    lam = spectrum.eigenvalues
    decay = np.exp(-np.abs(lam) * L)
    small = np.zeros(lam.size, dtype=bool)
    if framework == Framework.THRESHOLDED:
        assert threshold is not None
        if threshold > np.abs(lam).max():
            raise ThresholdError(threshold, float(np.abs(lam).max()))
        small = np.abs(lam) < threshold

    g_L = None
    if spectrum.g is not None:
        g_L = np.where(grid.pos_mask, spectrum.g, L + spectrum.g)

    labels: List[str] = []
    basis_cols: List[np.ndarray] = []
    test_cols: List[np.ndarray] = []
    if framework != Framework.SIMPLE and spectrum.has_zero_mode:
        labels.append("c")
        basis_cols.append(np.ones(grid.size))
        test_cols.append(grid.signed_weights)
        if g_L is not None:
            labels.append("d")
            basis_cols.append(g_L)
            test_cols.append(grid.signed_weights * spectrum.g)
    if small.any():
        same = (grid.sign_h[:, None] * spectrum.signs[None, small]) > 0
        v_small = spectrum.values[:, small]
        bar = np.where(same, 1.0, decay[small]) * v_small
        for col, j in enumerate(spectrum.indices[small]):
            labels.append(f"v{j}")
            basis_cols.append(bar[:, col])
            test_cols.append(
                grid.signed_weights * v_small[:, col] * np.sign(lam[small][col])
            )

    n_nodes = grid.size
    null_basis = np.column_stack(basis_cols) if basis_cols else np.zeros((n_nodes, 0))
    null_tests = np.column_stack(test_cols) if test_cols else np.zeros((n_nodes, 0))
    null_matrix = null_tests.T @ null_basis
    condition = float(np.linalg.cond(null_matrix)) if labels else 1.0
    if condition > MAX_CONDITION:
        raise SingularSystemError(
            f"영 블록 시스템 {labels}이 특이에 가깝습니다", condition=condition
        )
    logger.debug(
        f"Operators for '{spec.name}': framework={framework.value}, L={L}, "
        f"null block {labels}, cond={condition:.3e}"
    )
    return OperatorSet(
        spectrum=spectrum,
        L=L,
        framework=framework,
        threshold=threshold,
        decay=decay,
        small=small,
        g_L=g_L,
        null_labels=tuple(labels),
        null_basis=null_basis,
        null_tests=null_tests,
        null_matrix=null_matrix,
        condition=condition,
    )


def _null_coefficients(w: np.ndarray, ops: OperatorSet) -> np.ndarray:
    if not ops.has_null_block:
        return np.zeros((0,) + w.shape[1:])
    return np.linalg.solve(ops.null_matrix, ops.null_tests.T @ w)


def expand(w: np.ndarray, spectrum: Spectrum, ops: OperatorSet) -> Expansion:
    """
    노드 표본 w를 {1, g_L, v̄_s, v_j} 기저로 전개합니다.

    Args:
        w: 격자 노드 표본
        spectrum: ops와 같은 스펙트럼
        ops: 연산자 모음

    Returns:
        Expansion
    """
    w = np.asarray(w, dtype=float)
    x0 = _null_coefficients(w, ops)
    remainder = w - ops.null_basis @ x0
    a = ops.mode_tests.T @ remainder
    a[ops.small] = 0.0
    values = dict(zip(ops.null_labels, x0))
    n_base = sum(1 for label in ops.null_labels if label in ("c", "d"))
    return Expansion(
        c=float(values.get("c", 0.0)),
        d=float(values.get("d", 0.0)),
        a=a,
        framework=ops.framework,
        bar=np.asarray(x0[n_base:], dtype=float),
    )


def reconstruct(e: Expansion, ops: OperatorSet) -> np.ndarray:
    """전개를 노드 표본으로 되돌립니다."""
    out = ops.spectrum.values @ e.a
    if ops.has_null_block:
        base = [e.c, e.d][: sum(1 for label in ops.null_labels if label in ("c", "d"))]
        out = out + ops.null_basis @ np.concatenate([base, e.bar])
    return out


def apply_WL(e: Expansion, spectrum: Spectrum, ops: OperatorSet) -> np.ndarray:
    """
    W_L = W − W M_L 적용.

    h > 0 에서 Σ_{λ_j<0} a_j(1 − e^{λ_j L}) v_j, h < 0 에서 Σ_{λ_j>0} a_j(1 − e^{−λ_j L}) v_j.
    """
    weighted = np.where(ops.small, 0.0, e.a * (1.0 - ops.decay))
    negative = spectrum.values @ np.where(spectrum.negative, weighted, 0.0)
    positive = spectrum.values @ np.where(spectrum.positive, weighted, 0.0)
    return np.where(spectrum.grid.pos_mask, negative, positive)


def apply_P(w: np.ndarray, spectrum: Spectrum, ops: OperatorSet) -> np.ndarray:
    """P_N w: 전개 후 𝓗₁ 성분만 남깁니다."""
    return spectrum.values @ expand(w, spectrum, ops).a


def project_out_null(w: np.ndarray, ops: OperatorSet) -> np.ndarray:
    """모드 절단 없는 정확한 P: w − (영 블록 성분)."""
    w = np.asarray(w, dtype=float)
    return w - ops.null_basis @ _null_coefficients(w, ops)


def apply_P_lambda(
    w: np.ndarray, threshold: float, spectrum: Spectrum, ops: OperatorSet
) -> np.ndarray:
    """P_Λ: span{1, g_L, v̄_s (|λ_s| < Λ)}를 소거하는 사영."""
    if threshold <= 0:
        raise PreconditionError("Λ는 양수여야 합니다", threshold=threshold)
    if ops.framework != Framework.THRESHOLDED or ops.threshold != threshold:
        ops = ops.with_threshold(threshold)
    return apply_P(w, spectrum, ops)


def assemble_VW(ops: OperatorSet, spectrum: Spectrum) -> Tuple[np.ndarray, np.ndarray]:
    """
    span{v_j} 위의 V = Q₊P₊ + Q₋P₋, W = Q₊P₋ + Q₋P₊ 계수 행렬.

    [V]_kj = sgn(λ_k) ∫ Q_same(j) v_j v_k h, [W]_kj = sgn(λ_k) ∫ Q_opp(j) v_j v_k h.
    """
    V = spectrum.values
    hw = spectrum.grid.signed_weights[:, None]
    same = ops.same_side
    v_matrix = spectrum.signs[:, None] * (V.T @ (hw * np.where(same, V, 0.0)))
    w_matrix = spectrum.signs[:, None] * (V.T @ (hw * np.where(same, 0.0, V)))
    return v_matrix, w_matrix


def apply_W(a: np.ndarray, spectrum: Spectrum, ops: OperatorSet) -> np.ndarray:
    """u = Σ a_j v_j 에 대한 W u 의 노드 표본 (반대쪽 반구간 제한)."""
    return np.where(ops.same_side, 0.0, spectrum.values) @ a


def apply_M_L(a: np.ndarray, ops: OperatorSet) -> np.ndarray:
    """M_L 대각 감쇠 e^{−|λ_j| L}."""
    return ops.decay * a
