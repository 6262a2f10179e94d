#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
η 阶 Hanning 窗、连续归一化加窗傅里叶变换（NWFT）与加窗 DFT 元素

所有频率参数都是“缩放后”的指数：v = L∘λ，因此 NWFT 只依赖差值 v - w，
不再需要单独传入周期 L。
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache

import numpy as np

from models.errors import GridError, ValidationError

logger = logging.getLogger(__name__)


class NodeLayout(Enum):
    """DFT 采样节点在一个周期内的摆放方式

    - TRAILING: j = -G, ..., -1，积分单元 [-L, 0)
    - LEADING:  j = 0, ..., G-1，积分单元 [0, L)
    - CENTERED: j = -G/2, ..., G/2-1，积分单元 [-L/2, L/2)
    """

    TRAILING = "trailing"
    LEADING = "leading"
    CENTERED = "centered"

    def node_range(self, G):
        """返回节点下标的 (start, stop)，左闭右开"""
        if self is NodeLayout.TRAILING:
            return -G, 0
        if self is NodeLayout.LEADING:
            return 0, G
        return -(G // 2), G // 2

    @classmethod
    def parse(cls, value):
        """由字符串或枚举得到布局"""
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            names = ", ".join(m.value for m in cls)
            raise ValidationError(f"未知的节点布局 {value!r}，可选: {names}", field="layout")


DEFAULT_LAYOUT = NodeLayout.TRAILING


def _double_factorial(n):
    result = 1
    while n > 1:
        result *= n
        n -= 2
    return result


@dataclass(frozen=True)
class WindowKernel:
    """η 阶 Hanning 窗

    H(x) = norm_const * (1 - cos 2πx)^η，其傅里叶系数 c_q（|q| <= η）满足 c_0 = 1。
    """

    eta: int

    def __post_init__(self):
        if isinstance(self.eta, bool) or int(self.eta) != self.eta or self.eta < 1:
            raise ValidationError(f"窗口阶数必须是正整数，收到 {self.eta!r}", field="eta")
        object.__setattr__(self, "eta", int(self.eta))

    @classmethod
    @lru_cache(maxsize=None)
    def of(cls, eta):
        return cls(eta)

    @property
    def exact_norm(self):
        """η!/(2η-1)!!（有理数精确值）"""
        return Fraction(math.factorial(self.eta), _double_factorial(2 * self.eta - 1))

    @property
    def norm_const(self):
        return float(self.exact_norm)

    @property
    def fourier_coeffs(self):
        """返回 {q: c_q}，c_q = (-1)^q · norm · C(2η, η+q) / 2^η"""
        eta = self.eta
        norm = self.exact_norm
        return {
            q: float((-1) ** (q % 2) * norm * math.comb(2 * eta, eta + q) / Fraction(2 ** eta))
            for q in range(-eta, eta + 1)
        }

    def coeff(self, q):
        """窗函数的第 q 个傅里叶系数，|q| > η 时为 0"""
        if abs(q) > self.eta:
            return 0.0
        return self.fourier_coeffs[q]

    def evaluate(self, theta):
        """norm_const · (1 - cos θ)^η，θ 可以是数组"""
        return self.norm_const * (1.0 - np.cos(theta)) ** self.eta

    @property
    def peak(self):
        """单维权重上界 2^η·norm_const（不超过 2η+1）"""
        return self.norm_const * 2 ** self.eta


def _as_vector(values, name):
    arr = np.atleast_1d(np.asarray(values, dtype=float))
    if arr.ndim != 1:
        raise ValidationError(f"{name} 必须是一维向量", field=name)
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} 含非有限值", field=name)
    return arr


def validate_grid_sizes(G, eta):
    """检查每个 G_j 为偶数且 G_j > 2η

    Raises:
        GridError: 网格不合法
    """
    for j, g in enumerate(G):
        if int(g) != g or g <= 0:
            raise GridError(f"第 {j} 维的 G={g} 不是正整数", field="G")
        if int(g) % 2:
            raise GridError(f"第 {j} 维的 G={int(g)} 不是偶数", field="G")
        if g <= 2 * eta:
            raise GridError(f"第 {j} 维的 G={int(g)} 必须大于 2η={2 * eta}", field="G")


def in_index_set(j, G):
    """判断 j 是否属于 K_G = {-G/2 <= j < G/2}^d"""
    j = np.asarray(j)
    G = np.asarray(G)
    return bool(np.all(j >= -(G // 2)) and np.all(j < G // 2))


def window_weight(j, G, kernel, layout=DEFAULT_LAYOUT):
    """窗权重 H_G^η(j) = ∏ norm·(1 - cos(2π j_ℓ/G_ℓ))^η

    Args:
        j: 整数向量
        G: 网格向量
        kernel: WindowKernel
        layout: 节点布局，与 PeriodGrid 的默认布局一致；CENTERED 即字面的 K_G

    Returns:
        float: 非负权重；j 不在该布局的节点范围内时为 0
    """
    j = np.atleast_1d(np.asarray(j, dtype=np.int64))
    G = np.atleast_1d(np.asarray(G, dtype=np.int64))
    layout = NodeLayout.parse(layout)
    for j_l, G_l in zip(j, G):
        start, stop = layout.node_range(int(G_l))
        if not start <= j_l < stop:
            return 0.0
    per_dim = kernel.evaluate(2.0 * np.pi * j / G)
    return float(np.prod(per_dim))


@lru_cache(maxsize=64)
def _layout_weights(G, eta, layout):
    start, stop = layout.node_range(G)
    nodes = np.arange(start, stop, dtype=np.int64)
    weights = WindowKernel.of(eta).evaluate(2.0 * np.pi * nodes / G)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    logger.debug("窗口权重缓存: G=%d, eta=%d, layout=%s", G, eta, layout.value)
    return nodes, weights


def discrete_window_sum(G, kernel):
    """离散窗口均值 (1/|G|) Σ_{j∈K_G} H_G^η(j)

    Raises:
        GridError: 某个 G_j <= 2η 或为奇数
    """
    G = [int(g) for g in np.atleast_1d(G)]
    validate_grid_sizes(G, kernel.eta)
    total = 1.0
    for g in G:
        _, weights = _layout_weights(g, kernel.eta, NodeLayout.CENTERED)
        total *= math.fsum(weights) / g
    return total


def _reduce(delta):
    """拆成最近整数 q 与余量 r = delta - q"""
    q = round(delta)
    return int(q), delta - q


def _nwft_leading(delta, kernel):
    """[0,1) 单元上的一维 NWFT"""
    q, r = _reduce(delta)
    eta = kernel.eta
    if r == 0.0:
        return complex(kernel.coeff(-q))
    denom = 1.0
    for j1 in range(-eta, eta + 1):
        denom *= r + (q + j1)
    sign = -1.0 if eta % 2 else 1.0
    numer = sign * math.factorial(eta) ** 2 * math.sin(math.pi * r)
    return numer * complex(math.cos(math.pi * r), math.sin(math.pi * r)) / (math.pi * denom)


def _nwft_centered(delta, kernel):
    """[-1/2,1/2) 单元上的一维 NWFT：Σ_p c_p sinc(δ+p)"""
    q, r = _reduce(delta)
    if r == 0.0:
        return complex(kernel.coeff(-q))
    s = math.sin(math.pi * r) / math.pi
    total = 0.0
    for p, c in kernel.fourier_coeffs.items():
        sign = -1.0 if (q + p) % 2 else 1.0
        total += c * sign * s / (r + (q + p))
    return complex(total)


def nwft_factor(delta, kernel, layout=NodeLayout.LEADING):
    """一维 NWFT 因子 φ(δ)，δ 为缩放后的频率差

    Args:
        delta: 实数
        kernel: WindowKernel
        layout: 积分单元对应的节点布局

    Returns:
        complex
    """
    delta = float(delta)
    if layout is NodeLayout.TRAILING:
        return _nwft_leading(-delta, kernel)
    if layout is NodeLayout.CENTERED:
        return _nwft_centered(delta, kernel)
    return _nwft_leading(delta, kernel)


def nwft_exponential(v, w, kernel, layout=NodeLayout.LEADING):
    """e^{i2πv·x/L} 在频率 w/L 处的连续归一化加窗傅里叶变换

    按维度乘积计算。差值为 0 时因子为 1；为非零整数 q 且 |q| <= η 时取窗口系数 c_{-q}；
    更大的整数为 0；其余情况用闭式。

    Args:
        v: 缩放指数（实向量）
        w: 缩放频率（实向量）
        kernel: WindowKernel
        layout: 积分单元，默认 [0, L)

    Returns:
        complex
    """
    v = _as_vector(v, "v")
    w = _as_vector(w, "w")
    if v.shape != w.shape:
        raise ValidationError("v 与 w 维数不一致", field="w")
    result = 1.0 + 0.0j
    for dv in v - w:
        result *= nwft_factor(dv, kernel, layout)
    return result


def _check_exponent(hs, G):
    if not in_index_set(np.round(hs), G):
        raise GridError(f"指数 {np.asarray(hs).tolist()} 不在 K_G 内（G={list(map(int, G))}）", field="G")


def _dft_factor(delta, G, eta, layout):
    """一维加窗 DFT 和 (1/G) Σ_m H(m) e^{i2πδm/G}，补偿求和"""
    delta = delta - G * round(delta / G)
    nodes, weights = _layout_weights(G, eta, layout)
    terms = weights * np.exp(2j * np.pi * (delta * nodes / G))
    return complex(math.fsum(terms.real), math.fsum(terms.imag)) / G


def dft_entry(vt, hs, grid):
    """加窗 DFT 元素 u_st = (1/|G|) Σ_{j} H_G^η(j) e^{i2π(v_t - h_s)·j/G}

    按维度分离求和。

    Args:
        vt: 缩放指数 v_t
        hs: 整数指数 h_s，须在 K_G 内
        grid: PeriodGrid（使用其 G、eta、layout）

    Returns:
        complex

    Raises:
        GridError: h_s 不在 K_G 内
    """
    vt = _as_vector(vt, "vt")
    hs = _as_vector(hs, "hs")
    G = grid.G
    _check_exponent(hs, G)
    result = 1.0 + 0.0j
    for delta, g in zip(vt - hs, G):
        result *= _dft_factor(float(delta), int(g), grid.eta, grid.layout)
    return result


def dft_entry_bruteforce(vt, hs, grid):
    """在完整网格上直接求和的 DFT 元素（测试用的对照实现）"""
    vt = _as_vector(vt, "vt")
    hs = _as_vector(hs, "hs")
    G = [int(g) for g in grid.G]
    _check_exponent(hs, G)
    axes = [np.arange(*grid.layout.node_range(g)) for g in G]
    mesh = np.meshgrid(*axes, indexing="ij")
    kernel = WindowKernel.of(grid.eta)
    weight = np.ones(mesh[0].shape)
    phase = np.zeros(mesh[0].shape)
    for k, g in enumerate(G):
        weight = weight * kernel.evaluate(2.0 * np.pi * mesh[k] / g)
        phase = phase + (vt[k] - hs[k]) * mesh[k] / g
    return complex(np.sum(weight * np.exp(2j * np.pi * phase))) / float(np.prod(G))


def alias_partial_sum(delta, G, kernel, layout, n_alias):
    """一维混叠像的部分和 Σ_{|ℓ|<=n} φ(δ + ℓG)

    居中布局下窗口在单元边界不为零，附加端点修正项 -i·H(1/2)·sin(πδ)/G。
    """
    delta = delta - G * round(delta / G)
    total = sum(nwft_factor(delta + ell * G, kernel, layout) for ell in range(-n_alias, n_alias + 1))
    if layout is NodeLayout.CENTERED:
        total -= 1j * kernel.peak * math.sin(math.pi * delta) / G
    return total


def aliasing_check(vt, hs, grid, n_alias):
    """DFT 与 NWFT 加混叠像之差 |u_st - Σ_{‖ℓ‖∞<=n} φ(v_t - h_s + ℓ∘G)|

    Args:
        vt: 缩放指数
        hs: 整数指数
        grid: PeriodGrid
        n_alias: 每维混叠项个数，>= 1

    Returns:
        float: 绝对差
    """
    if int(n_alias) != n_alias or n_alias < 1:
        raise ValidationError("n_alias 必须是正整数", field="n_alias")
    vt = _as_vector(vt, "vt")
    hs = _as_vector(hs, "hs")
    kernel = WindowKernel.of(grid.eta)
    model = 1.0 + 0.0j
    for delta, g in zip(vt - hs, grid.G):
        model *= alias_partial_sum(float(delta), int(g), kernel, grid.layout, int(n_alias))
    return abs(dft_entry(vt, hs, grid) - model)
