"""구적 격자와 세 가지 내적 (|h| 가중, 부호 h 가중, A 에너지).

전환점(h의 영점)에서 끊어지는 복합 Gauss–Legendre 패널을 사용합니다.
|h|는 전환점에서 꺾이므로 패널 분할로 스펙트럴 정확도를 회복합니다.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Tuple, Union

import numpy as np
from numpy.polynomial.legendre import leggauss

from .exceptions import GridError, InvalidProblemError
from .models import ProblemSpec

logger = logging.getLogger(__name__)

PANEL_ORDER = 16
DEFAULT_NODES = 1024

ArrayLike = Union[np.ndarray, float]


@dataclass(frozen=True)
class Panel:
    left: float
    right: float
    start: int
    stop: int

    @property
    def width(self) -> float:
        return self.right - self.left


def _reference_differentiation(order: int) -> np.ndarray:
    """기준 구간 [−1, 1]의 Gauss 노드에서 라그랑주 보간 미분 행렬."""
    x, _ = leggauss(order)
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    bary = 1.0 / np.prod(diff, axis=1)
    D = (bary[None, :] / bary[:, None]) / diff
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))
    return D


@dataclass(frozen=True, eq=False)
class Quadrature:
    """복합 Gauss–Legendre 격자와 캐시된 h, p 표본."""

    spec: ProblemSpec
    nodes: np.ndarray
    weights: np.ndarray
    h_at_nodes: np.ndarray
    p_at_nodes: np.ndarray
    pos_mask: np.ndarray
    neg_mask: np.ndarray
    panels: Tuple[Panel, ...]
    order: int = PANEL_ORDER

    @property
    def size(self) -> int:
        return int(self.nodes.size)

    @cached_property
    def abs_h_weights(self) -> np.ndarray:
        return self.weights * np.abs(self.h_at_nodes)

    @cached_property
    def signed_weights(self) -> np.ndarray:
        return self.weights * self.h_at_nodes

    @cached_property
    def sign_h(self) -> np.ndarray:
        return np.sign(self.h_at_nodes)

    @cached_property
    def _panel_scale(self) -> np.ndarray:
        return np.array([2.0 / panel.width for panel in self.panels])

    @cached_property
    def _reference_D(self) -> np.ndarray:
        return _reference_differentiation(self.order)

    def integrate(self, values: np.ndarray) -> Union[float, np.ndarray]:
        result = np.tensordot(self.weights, np.asarray(values, dtype=float), axes=(0, 0))
        return float(result) if np.ndim(result) == 0 else result

    def differentiate(self, values: np.ndarray) -> np.ndarray:
        """패널별 다항식 미분 (노드 표본 → 도함수 표본)."""
        values = np.asarray(values, dtype=float)
        if values.shape[0] != self.size:
            raise ValueError(
                f"sample length {values.shape[0]} does not match grid size {self.size}"
            )
        n_panels = len(self.panels)
        blocks = values.reshape((n_panels, self.order) + values.shape[1:])
        derivative = np.einsum("ij,pj...->pi...", self._reference_D, blocks)
        scale = self._panel_scale.reshape((n_panels, 1) + (1,) * (values.ndim - 1))
        return (derivative * scale).reshape(values.shape)


def build_grid(
    spec: ProblemSpec, n_nodes: int = DEFAULT_NODES, order: int = PANEL_ORDER
) -> Quadrature:
    """
    전환점에서 끊어지는 복합 구적 격자를 만듭니다.

    Args:
        spec: 문제 정의
        n_nodes: 목표 노드 수 (패널 차수의 배수로 내림)
        order: 패널당 Gauss 노드 수

    Returns:
        Quadrature 인스턴스

    Raises:
        GridError: 노드 수가 너무 적은 경우
        InvalidProblemError: h의 부호가 바뀌지 않는 경우
    """
    if n_nodes < PANEL_ORDER:
        raise GridError(f"노드 수는 최소 {PANEL_ORDER}개여야 합니다", n_nodes)

    breaks = spec.breakpoints()
    lengths = np.diff(breaks)
    midpoints = 0.5 * (breaks[:-1] + breaks[1:])
    h_mid = spec.h(midpoints)
    if not (np.any(h_mid > 0) and np.any(h_mid < 0)):
        raise InvalidProblemError(
            "h의 부호가 바뀌지 않아 양방향 문제가 아닙니다", field="weight"
        )

    total_panels = n_nodes // order
    if total_panels < lengths.size:
        raise GridError(
            f"{lengths.size}개 요소를 분해하기에 노드 수가 부족합니다", n_nodes
        )
    counts = np.maximum(1, np.rint(total_panels * lengths / spec.period)).astype(int)

    x_ref, w_ref = leggauss(order)
    node_blocks = []
    weight_blocks = []
    panels = []
    start = 0
    for left_edge, right_edge, count in zip(breaks[:-1], breaks[1:], counts):
        edges = np.linspace(left_edge, right_edge, count + 1)
        for left, right in zip(edges[:-1], edges[1:]):
            half = 0.5 * (right - left)
            node_blocks.append(0.5 * (left + right) + half * x_ref)
            weight_blocks.append(half * w_ref)
            panels.append(Panel(float(left), float(right), start, start + order))
            start += order

    nodes = np.concatenate(node_blocks)
    weights = np.concatenate(weight_blocks)
    h_values = spec.h(nodes)
    logger.debug(
        f"Built grid for '{spec.name}': {nodes.size} nodes, {len(panels)} panels, "
        f"turning points {spec.turning_points().tolist()}"
    )
    return Quadrature(
        spec=spec,
        nodes=nodes,
        weights=weights,
        h_at_nodes=h_values,
        p_at_nodes=spec.p(nodes),
        pos_mask=h_values > 0,
        neg_mask=h_values < 0,
        panels=tuple(panels),
        order=order,
    )


def _bilinear(u: ArrayLike, v: ArrayLike, weights: np.ndarray) -> Union[float, np.ndarray]:
    u_arr = np.asarray(u, dtype=float)
    v_arr = np.asarray(v, dtype=float)
    if u_arr.ndim == 0:
        u_arr = np.full(weights.size, float(u_arr))
    if v_arr.ndim == 0:
        v_arr = np.full(weights.size, float(v_arr))
    if u_arr.shape[0] != weights.size or v_arr.shape[0] != weights.size:
        raise ValueError(
            f"sample shapes {u_arr.shape}, {v_arr.shape} do not match grid size "
            f"{weights.size}"
        )
    weighted = v_arr * weights.reshape((-1,) + (1,) * (v_arr.ndim - 1))
    result = np.tensordot(u_arr, weighted, axes=(0, 0))
    return float(result) if np.ndim(result) == 0 else result


def inner_abs_h(u: ArrayLike, v: ArrayLike, grid: Quadrature) -> Union[float, np.ndarray]:
    """∫ u v |h| dθ. 2차원 입력은 열 단위 Gram 행렬을 반환합니다."""
    return _bilinear(u, v, grid.abs_h_weights)


def inner_signed(u: ArrayLike, v: ArrayLike, grid: Quadrature) -> Union[float, np.ndarray]:
    """∫ u v h dθ."""
    return _bilinear(u, v, grid.signed_weights)


def inner_A(
    u: ArrayLike,
    v: ArrayLike,
    grid: Quadrature,
    du: Optional[np.ndarray] = None,
    dv: Optional[np.ndarray] = None,
) -> Union[float, np.ndarray]:
    """∫ p u′ v′ dθ. 도함수 표본이 없으면 패널 미분으로 계산합니다."""
    if du is None:
        u_arr = np.asarray(u, dtype=float)
        du = np.zeros(grid.size) if u_arr.ndim == 0 else grid.differentiate(u_arr)
    if dv is None:
        v_arr = np.asarray(v, dtype=float)
        dv = np.zeros(grid.size) if v_arr.ndim == 0 else grid.differentiate(v_arr)
    return _bilinear(du, dv, grid.weights * grid.p_at_nodes)


def norm_abs_h(u: ArrayLike, grid: Quadrature) -> float:
    return float(np.sqrt(max(float(inner_abs_h(u, u, grid)), 0.0)))
