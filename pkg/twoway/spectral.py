"""부정 가중치 Sturm–Liouville 고유값 문제 A u = λ h u.

Galerkin 기저 위에서 대칭 pencil K c = λ H c 를 만들고 H c = μ K c (μ = 1/λ)
형태로 scipy.linalg.eigh에 넘깁니다. 주기 문제는 삼각함수 기저, 분리형 경계
조건은 전환점에서 끊어지는 Legendre 스펙트럴 요소 기저를 사용합니다.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np
import scipy.linalg
from numpy.polynomial.legendre import legder, leggauss, legvander

from .exceptions import PreconditionError, SpectrumError, ZeroModeError
from .models import ProblemSpec, WeightKind
from .monitoring.performance import timed
from .quad import DEFAULT_NODES, Quadrature, build_grid

logger = logging.getLogger(__name__)

DEFAULT_RESIDUAL_TOL = 1e-6
ELEMENT_DEGREE = 24
MAX_REFINEMENTS = 4
EVAL_CHUNK = 2048


class ModalBasis(ABC):
    """Galerkin 기저의 공통 인터페이스."""

    @property
    @abstractmethod
    def size(self) -> int:
        """자유도 수."""

    @abstractmethod
    def evaluate(
        self, theta: np.ndarray, coefficients: np.ndarray, derivative: int = 0
    ) -> np.ndarray:
        """계수 행렬 (size × m)로 주어진 전개를 θ 점들에서 평가합니다."""

    @abstractmethod
    def matrices(
        self, spec: ProblemSpec
    ) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """(K, H, F, m): ∫pφ′φ′ (+경계항), ∫hφφ, ∫hφ, ∫φ."""

    @abstractmethod
    def constant_vector(self) -> Optional[np.ndarray]:
        """상수 함수 1의 계수 (표현 불가능하면 None)."""

    def half_period_shift(self, coefficients: np.ndarray) -> Optional[np.ndarray]:
        """θ → θ + T/2 이동의 계수 표현 (지원하지 않으면 None)."""
        return None


class TrigBasis(ModalBasis):
    """주기 삼각함수 기저 [1, cos kωθ, sin kωθ], k = 1..M."""

    def __init__(self, a: float, b: float, n_harmonics: int):
        self.a = a
        self.b = b
        self.n_harmonics = n_harmonics
        self.omega = 2.0 * np.pi / (b - a)
        self.k = np.arange(1, n_harmonics + 1, dtype=float)

    @property
    def size(self) -> int:
        return 2 * self.n_harmonics + 1

    def _columns(self, theta: np.ndarray, derivative: int) -> np.ndarray:
        kw = self.k * self.omega
        phase = np.outer(theta, kw)
        c, s = np.cos(phase), np.sin(phase)
        first = np.full((theta.size, 1), 1.0 if derivative == 0 else 0.0)
        if derivative == 0:
            return np.hstack([first, c, s])
        if derivative == 1:
            return np.hstack([first, -kw * s, kw * c])
        return np.hstack([first, -(kw**2) * c, -(kw**2) * s])

    def evaluate(
        self, theta: np.ndarray, coefficients: np.ndarray, derivative: int = 0
    ) -> np.ndarray:
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        out = np.empty((theta.size,) + coefficients.shape[1:])
        for start in range(0, theta.size, EVAL_CHUNK):
            block = slice(start, start + EVAL_CHUNK)
            out[block] = self._columns(theta[block], derivative) @ coefficients
        return out

    def _analytic(self, spec: ProblemSpec) -> bool:
        return (
            spec.weight.is_cosine
            and spec.p.is_constant
            and abs(spec.period - 2.0 * np.pi) < 1e-12
        )

    def matrices(
        self, spec: ProblemSpec
    ) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        if not self._analytic(spec):
            return _matrices_by_quadrature(self, spec)
        M = self.n_harmonics
        p = spec.p.constant
        r = spec.weight.r
        k2 = self.k**2
        K = np.diag(np.concatenate([[0.0], p * np.pi * k2, p * np.pi * k2]))
        mass = np.diag(np.concatenate([[2.0 * np.pi], np.full(2 * M, np.pi)]))
        # cos θ 곱셈은 k ± 1 조화항만 결합
        H = np.zeros((self.size, self.size))
        if M >= 1:
            H[0, 1] = H[1, 0] = np.pi
        band = np.full(max(M - 1, 0), 0.5 * np.pi)
        cos_block = np.diag(band, 1) + np.diag(band, -1)
        H[1 : M + 1, 1 : M + 1] = cos_block
        H[M + 1 :, M + 1 :] = cos_block
        H = H - r * mass
        F = np.zeros(self.size)
        F[0] = -2.0 * np.pi * r
        if M >= 1:
            F[1] = np.pi
        m = np.zeros(self.size)
        m[0] = 2.0 * np.pi
        return K, H, F, m

    def constant_vector(self) -> Optional[np.ndarray]:
        z = np.zeros(self.size)
        z[0] = 1.0
        return z

    def half_period_shift(self, coefficients: np.ndarray) -> Optional[np.ndarray]:
        parity = (-1.0) ** self.k
        factor = np.concatenate([[1.0], parity, parity])
        return coefficients * factor.reshape((-1,) + (1,) * (coefficients.ndim - 1))


class ElementBasis(ModalBasis):
    """연속 Legendre 스펙트럴 요소 기저 (꼭짓점 hat + 적분 Legendre bubble).

    bubble ψ_k = (L_{k+1} − L_{k−1}) / √(2(2k+1)), k = 1..P−1 이며
    ψ_k′ = √((2k+1)/2) L_k 입니다. Dirichlet 끝점의 꼭짓점 자유도는 제거됩니다.
    """

    def __init__(self, spec: ProblemSpec, n_elements: int, degree: int = ELEMENT_DEGREE):
        breaks = spec.breakpoints()
        lengths = np.diff(breaks)
        counts = np.maximum(1, np.rint(n_elements * lengths / spec.period)).astype(int)
        edges = [breaks[:1]]
        for left, right, count in zip(breaks[:-1], breaks[1:], counts):
            edges.append(np.linspace(left, right, count + 1)[1:])
        self.edges = np.concatenate(edges)
        self.n_elements = self.edges.size - 1
        self.degree = degree
        self.bc = spec.bc
        n_vertices = self.n_elements + 1
        self.n_full = n_vertices + self.n_elements * (degree - 1)
        removed = []
        if spec.bc.is_dirichlet_at(0):
            removed.append(0)
        if spec.bc.is_dirichlet_at(1):
            removed.append(n_vertices - 1)
        self.free = np.setdiff1d(np.arange(self.n_full), removed)
        norm = np.sqrt(2.0 * (2.0 * np.arange(1, degree) + 1.0))
        self._bubble_norm = norm
        self._legder = legder(np.eye(degree + 1), axis=0)

    @property
    def size(self) -> int:
        return int(self.free.size)

    def _local_dofs(self, e: int) -> np.ndarray:
        n_vertices = self.n_elements + 1
        bubbles = n_vertices + e * (self.degree - 1) + np.arange(self.degree - 1)
        return np.concatenate([[e, e + 1], bubbles])

    def _local_shapes(self, t: np.ndarray, derivative: int) -> np.ndarray:
        """기준 요소 [−1, 1]에서 국소 형상함수 (t에 대한 도함수)."""
        P = self.degree
        shapes = np.zeros((t.size, P + 1))
        if derivative == 0:
            leg = legvander(t, P)
            shapes[:, 0] = 0.5 * (1.0 - t)
            shapes[:, 1] = 0.5 * (1.0 + t)
            shapes[:, 2:] = (leg[:, 2:] - leg[:, : P - 1]) / self._bubble_norm
        elif derivative == 1:
            leg = legvander(t, P)
            shapes[:, 0] = -0.5
            shapes[:, 1] = 0.5
            shapes[:, 2:] = leg[:, 1:P] * np.sqrt(np.arange(3, 2 * P, 2) / 2.0)
        else:
            dleg = legvander(t, P - 1) @ self._legder
            shapes[:, 2:] = dleg[:, 1:P] * np.sqrt(np.arange(3, 2 * P, 2) / 2.0)
        return shapes

    def _full(self, coefficients: np.ndarray) -> np.ndarray:
        full = np.zeros((self.n_full,) + coefficients.shape[1:])
        full[self.free] = coefficients
        return full

    def evaluate(
        self, theta: np.ndarray, coefficients: np.ndarray, derivative: int = 0
    ) -> np.ndarray:
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        full = self._full(coefficients)
        owner = np.clip(
            np.searchsorted(self.edges, theta, side="right") - 1, 0, self.n_elements - 1
        )
        out = np.zeros((theta.size,) + coefficients.shape[1:])
        for e in np.unique(owner):
            idx = np.nonzero(owner == e)[0]
            left, right = self.edges[e], self.edges[e + 1]
            t = (2.0 * theta[idx] - (left + right)) / (right - left)
            jac = (2.0 / (right - left)) ** derivative
            out[idx] = jac * (self._local_shapes(t, derivative) @ full[self._local_dofs(e)])
        return out

    def matrices(
        self, spec: ProblemSpec
    ) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        n = self.n_full
        K = np.zeros((n, n))
        H = np.zeros((n, n))
        F = np.zeros(n)
        m = np.zeros(n)
        t, w = leggauss(self.degree + 4)
        phi = self._local_shapes(t, 0)
        dphi = self._local_shapes(t, 1)
        for e in range(self.n_elements):
            left, right = self.edges[e], self.edges[e + 1]
            half = 0.5 * (right - left)
            theta = 0.5 * (left + right) + half * t
            weights = half * w
            h = spec.h(theta)
            p = spec.p(theta)
            dofs = self._local_dofs(e)
            grad = dphi / half
            K[np.ix_(dofs, dofs)] += grad.T @ ((weights * p)[:, None] * grad)
            H[np.ix_(dofs, dofs)] += phi.T @ ((weights * h)[:, None] * phi)
            F[dofs] += phi.T @ (weights * h)
            m[dofs] += phi.T @ weights
        K[0, 0] += self.bc.robin_coefficient(0)
        last = self.n_elements
        K[last, last] -= self.bc.robin_coefficient(1)
        sel = np.ix_(self.free, self.free)
        return K[sel], H[sel], F[self.free], m[self.free]

    def constant_vector(self) -> Optional[np.ndarray]:
        if self.free.size < self.n_full:
            return None
        z = np.zeros(self.n_full)
        z[: self.n_elements + 1] = 1.0
        return z


def _matrices_by_quadrature(
    basis: ModalBasis, spec: ProblemSpec
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    grid = build_grid(spec, max(DEFAULT_NODES, 8 * basis.size))
    eye = np.eye(basis.size)
    n = basis.size
    K = np.zeros((n, n))
    H = np.zeros((n, n))
    F = np.zeros(n)
    m = np.zeros(n)
    for start in range(0, grid.size, EVAL_CHUNK):
        block = slice(start, start + EVAL_CHUNK)
        phi = basis.evaluate(grid.nodes[block], eye, 0)
        dphi = basis.evaluate(grid.nodes[block], eye, 1)
        wp = grid.weights[block] * grid.p_at_nodes[block]
        wh = grid.signed_weights[block]
        K += dphi.T @ (wp[:, None] * dphi)
        H += phi.T @ (wh[:, None] * phi)
        F += phi.T @ wh
        m += phi.T @ grid.weights[block]
    return K, H, F, m


def make_basis(spec: ProblemSpec, size: int) -> ModalBasis:
    if spec.periodic:
        return TrigBasis(spec.a, spec.b, max(1, size // 2))
    return ElementBasis(spec, max(1, int(np.ceil(size / ELEMENT_DEGREE))))


def _householder_complement(z: np.ndarray) -> np.ndarray:
    """z의 직교여공간 정규직교 기저 (n × (n−1))."""
    z = z / np.linalg.norm(z)
    e1 = np.zeros_like(z)
    e1[0] = 1.0
    u = z - e1
    norm = np.linalg.norm(u)
    if norm < 1e-14:
        return np.eye(z.size)[:, 1:]
    u = u / norm
    reflector = np.eye(z.size) - 2.0 * np.outer(u, u)
    return reflector[:, 1:]


def solve_pencil(
    K: np.ndarray, H: np.ndarray, z: Optional[np.ndarray]
) -> Tuple[np.ndarray, np.ndarray]:
    """
    K c = λ H c 를 풉니다 (K 양의 준정부호, 영공간은 z로 주어짐).

    Returns:
        (λ, C): μ = 1/λ가 0이 아닌 고유쌍만
    """
    try:
        if z is None:
            mu, C = scipy.linalg.eigh(H, K)
        else:
            z = z / np.linalg.norm(z)
            Q = _householder_complement(z)
            Kt = Q.T @ K @ Q
            Ht = Q.T @ H @ Q
            b = Q.T @ (H @ z)
            Hzz = float(z @ H @ z)
            if abs(Hzz) <= 1e-10 * max(np.abs(H).max(), 1.0):
                R = _householder_complement(b)
                mu, Y = scipy.linalg.eigh(R.T @ Ht @ R, R.T @ Kt @ R)
                Y = R @ Y
                gamma = b @ (Kt @ Y * mu - Ht @ Y) / (b @ b)
            else:
                mu, Y = scipy.linalg.eigh(Ht - np.outer(b, b) / Hzz, Kt)
                gamma = -(b @ Y) / Hzz
            C = np.outer(z, gamma) + Q @ Y
    except np.linalg.LinAlgError as e:
        raise SpectrumError(
            f"고유값 문제 풀이 실패 (강성 행렬이 양의 정부호가 아님): {e}",
            requested=0,
            resolved=0,
            basis_size=K.shape[0],
        )
    keep = np.abs(mu) > 1e-13 * np.abs(mu).max()
    return 1.0 / mu[keep], C[:, keep]


@dataclass(frozen=True, eq=False)
class Spectrum:
    """정렬·정규화된 고유쌍 {λ_j, v_j}와 영 모드 보조 함수 g.

    열 순서는 j = −N..−1, 1..N (λ 오름차순)입니다.
    """

    spec: ProblemSpec
    grid: Quadrature
    basis: ModalBasis
    eigenvalues: np.ndarray
    coefficients: np.ndarray
    values: np.ndarray
    derivatives: np.ndarray
    residuals: np.ndarray
    has_zero_mode: bool
    g: Optional[np.ndarray] = None
    g_derivative: Optional[np.ndarray] = None
    g_coefficients: Optional[np.ndarray] = None
    mirrored: bool = False

    @property
    def N(self) -> int:
        return self.eigenvalues.size // 2

    @property
    def indices(self) -> np.ndarray:
        N = self.N
        return np.concatenate([np.arange(-N, 0), np.arange(1, N + 1)])

    @property
    def signs(self) -> np.ndarray:
        return np.sign(self.eigenvalues)

    @property
    def positive(self) -> np.ndarray:
        return self.eigenvalues > 0

    @property
    def negative(self) -> np.ndarray:
        return self.eigenvalues < 0

    @property
    def has_g(self) -> bool:
        return self.g is not None

    def column(self, j: int) -> int:
        if j == 0 or abs(j) > self.N:
            raise IndexError(f"mode index {j} outside ±1..±{self.N}")
        return self.N + j if j < 0 else self.N + j - 1

    def mode(self, j: int) -> np.ndarray:
        return self.values[:, self.column(j)]

    def eigenvalue(self, j: int) -> float:
        return float(self.eigenvalues[self.column(j)])

    def evaluate_modes(self, theta: np.ndarray, derivative: int = 0) -> np.ndarray:
        return self.basis.evaluate(theta, self.coefficients, derivative)

    def evaluate_g(self, theta: np.ndarray, derivative: int = 0) -> np.ndarray:
        if self.g_coefficients is None:
            raise ZeroModeError("g가 정의되지 않은 스펙트럼입니다")
        return self.basis.evaluate(theta, self.g_coefficients[:, None], derivative)[:, 0]

    def truncate(self, N: int) -> "Spectrum":
        """절댓값이 작은 쪽부터 부호별 N개 모드만 남깁니다."""
        if N > self.N or N < 1:
            raise IndexError(f"cannot truncate {self.N} modes per sign to {N}")
        cols = np.arange(self.N - N, self.N + N)
        return replace(
            self,
            eigenvalues=self.eigenvalues[cols],
            coefficients=self.coefficients[:, cols],
            values=self.values[:, cols],
            derivatives=self.derivatives[:, cols],
            residuals=self.residuals[cols],
        )


def _fix_phase(values: np.ndarray) -> np.ndarray:
    """|v|가 최댓값의 절반을 처음 넘는 노드에서 v > 0이 되도록 부호를 정합니다."""
    peak = np.abs(values).max(axis=0)
    first = np.argmax(np.abs(values) > 0.5 * peak, axis=0)
    return np.where(values[first, np.arange(values.shape[1])] < 0, -1.0, 1.0)


def _residuals(
    spec: ProblemSpec,
    grid: Quadrature,
    lam: np.ndarray,
    v: np.ndarray,
    dv: np.ndarray,
    d2v: np.ndarray,
) -> np.ndarray:
    p = grid.p_at_nodes[:, None]
    dp = spec.p(grid.nodes, 1)[:, None]
    r = -dp * dv - p * d2v - lam * grid.h_at_nodes[:, None] * v
    r_norm = np.sqrt(grid.integrate(r**2))
    v_norm = np.sqrt(grid.integrate(v**2))
    return r_norm / (np.abs(lam) * v_norm)


def _is_half_period_antisymmetric(spec: ProblemSpec) -> bool:
    if not spec.periodic or spec.weight.kind == WeightKind.TABULATED:
        return False
    theta = np.linspace(spec.a, spec.b, 97)
    shifted = spec.h(theta + 0.5 * spec.period)
    return bool(np.allclose(shifted, -spec.h(theta), atol=1e-12)) and spec.p.is_constant


def _solve_g_coefficients(basis: ModalBasis, spec: ProblemSpec) -> np.ndarray:
    """A g = −h, ∫g = 0 을 Lagrange 승수 행과 함께 풉니다."""
    K, _, F, m = basis.matrices(spec)
    n = K.shape[0]
    system = np.zeros((n + 1, n + 1))
    system[:n, :n] = K
    system[:n, n] = m
    system[n, :n] = m
    rhs = np.concatenate([-F, [0.0]])
    return np.linalg.solve(system, rhs)[:n]


def _check_g_exists(spec: ProblemSpec, grid: Quadrature) -> None:
    if not spec.has_zero_mode:
        raise ZeroModeError("Dirichlet/Robin 경계 조건에는 영 모드가 없어 g가 없습니다")
    mean_h = grid.integrate(grid.h_at_nodes)
    if abs(mean_h) > 1e-10 * grid.integrate(np.abs(grid.h_at_nodes)):
        raise ZeroModeError(f"∫h = {mean_h:.3e} ≠ 0 이므로 A g = −h 의 해가 없습니다")


def compute_g(
    spec: ProblemSpec, grid: Quadrature, basis_size: int = 256
) -> np.ndarray:
    """
    A g = −h, ∫g dθ = 0 의 해를 격자 노드에서 반환합니다.

    Raises:
        ZeroModeError: 영 모드가 없거나 ∫h ≠ 0 인 경우
    """
    _check_g_exists(spec, grid)
    basis = make_basis(spec, basis_size)
    coefficients = _solve_g_coefficients(basis, spec)
    return basis.evaluate(grid.nodes, coefficients[:, None])[:, 0]


def _select(
    lam: np.ndarray, N: int
) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    """부호별로 |λ|가 작은 N개 후보의 인덱스 (상위 절반은 신뢰하지 않음)."""
    picked = []
    for sign in (-1.0, 1.0):
        idx = np.nonzero(np.sign(lam) == sign)[0]
        idx = idx[np.argsort(np.abs(lam[idx]), kind="stable")]
        if idx.size == 0:
            return None
        trusted = idx[np.abs(lam[idx]) <= 0.5 * np.abs(lam[idx]).max()]
        if trusted.size < N:
            return None
        picked.append(trusted[:N])
    return picked[0][::-1], picked[1]


@timed("spectral.solve_spectrum")
def solve_spectrum(
    spec: ProblemSpec,
    N: int,
    grid: Optional[Quadrature] = None,
    basis_size: Optional[int] = None,
    residual_tol: float = DEFAULT_RESIDUAL_TOL,
) -> Spectrum:
    """
    부호별 N개 고유쌍을 계산합니다.

    h(θ+π) = −h(θ) 인 주기 문제(mirrored)는 음의 모드를 v_{−j}(θ) = v_j(θ+π) 로
    만듭니다. 이 경우 위상 규칙(|v|가 최댓값의 절반을 처음 넘는 노드에서 v > 0)은
    양의 모드에만 적용되고, 음의 모드의 부호는 대칭 관계가 정합니다.

    Args:
        spec: 문제 정의
        N: 부호별 모드 수
        grid: 표본 격자 (None이면 max(1024, 32N) 노드)
        basis_size: 초기 기저 크기 (None이면 max(64, 4N)), 필요 시 두 배씩 증가
        residual_tol: 유지할 모드의 최대 상대 잔차

    Returns:
        Spectrum

    Raises:
        SpectrumError: 잔차 필터를 통과한 모드가 부족한 경우
    """
    if N < 1:
        raise PreconditionError("N은 1 이상이어야 합니다", N=N)
    grid = grid or build_grid(spec, max(DEFAULT_NODES, 32 * N))
    size = basis_size or max(64, 4 * N)
    mirror = _is_half_period_antisymmetric(spec)
    resolved = 0

    for attempt in range(MAX_REFINEMENTS):
        basis = make_basis(spec, size)
        K, H, _, _ = basis.matrices(spec)
        z = basis.constant_vector() if spec.has_zero_mode else None
        lam, C = solve_pencil(K, H, z)
        picked = _select(lam, N)
        if picked is None:
            logger.info(f"Basis size {basis.size} too small for N={N}, refining")
            size *= 2
            continue
        neg, pos = picked
        if mirror:
            shifted = basis.half_period_shift(C[:, pos[::-1]])
            assert shifted is not None
            lam_sel = np.concatenate([-lam[pos[::-1]], lam[pos]])
            coeffs = np.hstack([shifted, C[:, pos]])
        else:
            order = np.concatenate([neg, pos])
            lam_sel = lam[order]
            coeffs = C[:, order]

        values = basis.evaluate(grid.nodes, coeffs, 0)
        scale = np.sqrt(np.abs(np.sum(grid.signed_weights[:, None] * values**2, axis=0)))
        coeffs = coeffs / scale
        if mirror:
            phase = _fix_phase(basis.evaluate(grid.nodes, coeffs[:, N:], 0))
            coeffs = coeffs * np.concatenate([phase[::-1], phase])
        else:
            coeffs = coeffs * _fix_phase(basis.evaluate(grid.nodes, coeffs, 0))
        values = basis.evaluate(grid.nodes, coeffs, 0)
        derivatives = basis.evaluate(grid.nodes, coeffs, 1)
        second = basis.evaluate(grid.nodes, coeffs, 2)
        residuals = _residuals(spec, grid, lam_sel, values, derivatives, second)

        failing = residuals >= residual_tol
        if not failing.any():
            break
        neg_fail, pos_fail = failing[:N][::-1], failing[N:]
        resolved = min(
            int(np.argmax(neg_fail)) if neg_fail.any() else N,
            int(np.argmax(pos_fail)) if pos_fail.any() else N,
        )
        logger.info(
            f"Residual filter rejected {int(failing.sum())} of {2 * N} modes at basis "
            f"size {basis.size} (max residual {residuals.max():.2e}), refining"
        )
        size *= 2
    else:
        raise SpectrumError(
            f"잔차 {residual_tol:g} 이하인 모드가 부호별 {N}개에 못 미칩니다",
            requested=N,
            resolved=resolved,
            basis_size=size // 2,
        )

    g = g_derivative = g_coefficients = None
    if spec.has_zero_mode:
        try:
            _check_g_exists(spec, grid)
        except ZeroModeError:
            logger.debug(f"No g for '{spec.name}': zero mode present but ∫h ≠ 0")
        else:
            g_coefficients = _solve_g_coefficients(basis, spec)
            g = basis.evaluate(grid.nodes, g_coefficients[:, None])[:, 0]
            g_derivative = basis.evaluate(grid.nodes, g_coefficients[:, None], 1)[:, 0]

    logger.info(
        f"Spectrum for '{spec.name}': N={N}, basis={basis.size}, "
        f"λ range [{lam_sel.min():.4g}, {lam_sel.max():.4g}], "
        f"max residual {residuals.max():.2e}"
    )
    return Spectrum(
        spec=spec,
        grid=grid,
        basis=basis,
        eigenvalues=lam_sel,
        coefficients=coeffs,
        values=values,
        derivatives=derivatives,
        residuals=residuals,
        has_zero_mode=spec.has_zero_mode,
        g=g,
        g_derivative=g_derivative,
        g_coefficients=g_coefficients,
        mirrored=mirror,
    )


def half_range_moment(spectrum: Spectrum, j: int) -> float:
    """X_j = sgn(λ_j) ∫_{h>0} v_j h dθ."""
    grid = spectrum.grid
    v = spectrum.mode(j)
    weights = np.where(grid.pos_mask, grid.signed_weights, 0.0)
    return float(np.sign(spectrum.eigenvalue(j)) * weights @ v)


def half_range_moments(spectrum: Spectrum) -> np.ndarray:
    """모든 모드의 X_j (열 순서)."""
    grid = spectrum.grid
    weights = np.where(grid.pos_mask, grid.signed_weights, 0.0)
    return spectrum.signs * (weights @ spectrum.values)


def wronskian_overlap_check(spectrum: Spectrum, j: int, k: int) -> Tuple[float, float]:
    """
    부호가 반대인 두 모드의 겹침 ⟨v_j, v_k⟩와 전환점 Wronskian 표현을 비교합니다.

    Returns:
        (lhs, rhs), lhs = |⟨v_j, v_k⟩|,
        rhs = 2 p(θ₀)|v_j v_k′ − v_j′ v_k|(θ₀) / (|λ_j| + |λ_k|)

    Raises:
        PreconditionError: 같은 부호 모드이거나 전환점이 하나가 아닌 경우
    """
    spec = spectrum.spec
    lam_j, lam_k = spectrum.eigenvalue(j), spectrum.eigenvalue(k)
    if lam_j * lam_k >= 0:
        raise PreconditionError("λ_j와 λ_k의 부호가 반대여야 합니다", j=j, k=k)
    zeros = spec.turning_points()
    if spec.periodic or zeros.size != 1:
        raise PreconditionError(
            "내부 전환점이 정확히 하나인 비주기 문제여야 합니다",
            turning_points=zeros.tolist(),
        )
    theta0 = float(zeros[0])
    span = 1e-6 * spec.period
    if spec.h(np.array([theta0 - span]))[0] * spec.h(np.array([theta0 + span]))[0] >= 0:
        raise PreconditionError("전환점에서 h의 부호가 바뀌지 않습니다", theta0=theta0)
    if any(abs(spec.bc.robin_coefficient(end)) > 0 for end in (0, 1)):
        raise PreconditionError("경계항이 사라지는 Dirichlet/Neumann 조건이 필요합니다")

    grid = spectrum.grid
    lhs = abs(float(grid.abs_h_weights @ (spectrum.mode(j) * spectrum.mode(k))))
    cols = [spectrum.column(j), spectrum.column(k)]
    point = np.array([theta0])
    v = spectrum.basis.evaluate(point, spectrum.coefficients[:, cols], 0)[0]
    dv = spectrum.basis.evaluate(point, spectrum.coefficients[:, cols], 1)[0]
    p0 = float(spec.p(point)[0])
    rhs = 2.0 * p0 * abs(v[0] * dv[1] - dv[0] * v[1]) / (abs(lam_j) + abs(lam_k))
    return lhs, rhs
