#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
拟周期三角多项式 f(x) = Σ a_ℓ e^{i2πλ_ℓ·x}（λ_ℓ = P·k_ℓ）与离散周期网格
"""

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from models.errors import ValidationError
from models.window import DEFAULT_LAYOUT, NodeLayout, validate_grid_sizes


def _readonly(arr):
    arr.setflags(write=False)
    return arr


def _coerce_marks(marks, D, d):
    """rational_marks 统一为 D×d 的 Fraction/None 元组"""
    if marks is None:
        return None
    if len(marks) != D:
        raise ValidationError(f"需要 {D} 行标注，收到 {len(marks)} 行", field="rational_marks")
    rows = []
    for i, row in enumerate(marks):
        if row is None:
            rows.append((None,) * d)
            continue
        if len(row) != d:
            raise ValidationError(f"第 {i} 行需要 {d} 个标注", field="rational_marks")
        entries = []
        for item in row:
            if item is None:
                entries.append(None)
                continue
            try:
                entries.append(Fraction(item))
            except (TypeError, ValueError, ZeroDivisionError):
                raise ValidationError(f"第 {i} 行的标注 {item!r} 不是有理数", field="rational_marks")
        rows.append(tuple(entries))
    return tuple(rows)


@dataclass(frozen=True, eq=False)
class QuasiperiodicSpec:
    """拟周期函数的定义

    Args:
        P: d×n 投影矩阵
        lattice: D 个 n 维整数格向量 k_ℓ
        coefficients: D 个复系数 a_ℓ
        N: 截断参数，|k_ℓ,j| <= N
        C_a: Diophantine 常数
        tau: Diophantine 指数
        rational_marks: 可选，D×d 的精确有理标注（None 表示未标注）

    Raises:
        ValidationError: 维数不匹配、格向量越界或投影后指数重复
    """

    P: np.ndarray
    lattice: np.ndarray
    coefficients: np.ndarray
    N: int
    C_a: float
    tau: float
    rational_marks: tuple = None
    exponents: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        P = np.atleast_2d(np.asarray(self.P, dtype=float))
        if P.ndim != 2 or P.size == 0:
            raise ValidationError("投影矩阵必须是非空二维矩阵", field="P")
        if not np.all(np.isfinite(P)):
            raise ValidationError("投影矩阵含非有限值", field="P")
        d, n = P.shape
        if d > n:
            raise ValidationError(f"要求 d <= n，当前 d={d}, n={n}", field="P")

        try:
            lattice = np.asarray(self.lattice, dtype=float)
        except (TypeError, ValueError):
            raise ValidationError("格向量必须是整数向量列表", field="lattice")
        if lattice.ndim != 2 or lattice.shape[1] != n or lattice.shape[0] == 0:
            raise ValidationError(f"需要 D×{n} 的整数格向量", field="lattice")
        if not np.all(lattice == np.round(lattice)):
            raise ValidationError("格向量分量必须是整数", field="lattice")
        lattice = lattice.astype(np.int64)

        coeffs = np.asarray(self.coefficients, dtype=complex).reshape(-1)
        if coeffs.shape[0] != lattice.shape[0]:
            raise ValidationError(
                f"系数个数 {coeffs.shape[0]} 与格向量个数 {lattice.shape[0]} 不一致", field="coefficients")
        if not np.all(np.isfinite(coeffs)):
            raise ValidationError("系数含非有限值", field="coefficients")

        if int(self.N) != self.N or self.N < 1:
            raise ValidationError("N 必须是正整数", field="N")
        too_big = np.abs(lattice) > self.N
        if np.any(too_big):
            row = int(np.argwhere(too_big)[0][0])
            raise ValidationError(f"第 {row} 个格向量 {lattice[row].tolist()} 超出 N={self.N}", field="lattice")
        if len({tuple(k) for k in lattice.tolist()}) != lattice.shape[0]:
            raise ValidationError("格向量必须互不相同", field="lattice")
        if not (self.C_a > 0 and self.tau > 0):
            raise ValidationError("C_a 与 tau 必须为正", field="diophantine")

        marks = _coerce_marks(self.rational_marks, lattice.shape[0], d)

        object.__setattr__(self, "P", _readonly(P))
        object.__setattr__(self, "lattice", _readonly(lattice))
        object.__setattr__(self, "coefficients", _readonly(coeffs))
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "C_a", float(self.C_a))
        object.__setattr__(self, "tau", float(self.tau))
        object.__setattr__(self, "rational_marks", marks)
        object.__setattr__(self, "exponents", _readonly(build_exponents(self)))

    @property
    def dim(self):
        return self.P.shape[0]

    @property
    def rank(self):
        return self.P.shape[1]

    @property
    def size(self):
        """指数个数 D"""
        return self.lattice.shape[0]

    @property
    def p_norm_1(self):
        """‖P‖₁：列绝对值和的最大值"""
        return float(np.max(np.sum(np.abs(self.P), axis=0)))

    def mark(self, row, col):
        if self.rational_marks is None:
            return None
        return self.rational_marks[row][col]


def build_exponents(spec):
    """λ_ℓ = P·k_ℓ，按输入顺序返回 D×d 数组

    Raises:
        ValidationError: 投影后出现重复指数，或有理标注与数值不符
    """
    lam = spec.lattice.astype(float) @ spec.P.T
    marks = spec.rational_marks
    if marks is not None:
        for i, row in enumerate(marks):
            for j, m in enumerate(row):
                if m is None:
                    continue
                if abs(float(m) - lam[i, j]) > 1e-9 * max(1.0, abs(lam[i, j])):
                    raise ValidationError(
                        f"标注 {m} 与 λ[{i}][{j}]={lam[i, j]!r} 不符", field="rational_marks")
                lam[i, j] = float(m)
    D = lam.shape[0]
    scale = np.maximum(1.0, np.abs(lam))
    for s in range(D):
        close = np.all(np.abs(lam[s + 1:] - lam[s]) <= 1e-12 * scale[s + 1:], axis=1)
        if np.any(close):
            t = s + 1 + int(np.argmax(close))
            raise ValidationError(
                f"格向量 {spec.lattice[s].tolist()} 与 {spec.lattice[t].tolist()} 投影后指数相同", field="lattice")
    return lam


def evaluate_f(spec, x):
    """f(x) = Σ a_ℓ e^{i2πλ_ℓ·x}

    Args:
        spec: QuasiperiodicSpec
        x: 形如 (d,) 的点或 (..., d) 的点集

    Returns:
        complex 或复数数组
    """
    x = np.asarray(x, dtype=float)
    single = x.ndim <= 1
    pts = x.reshape(-1, spec.dim)
    phases = np.exp(2j * np.pi * (pts @ spec.exponents.T))
    values = phases @ spec.coefficients
    if single:
        return complex(values[0])
    return values.reshape(x.shape[:-1])


@dataclass(frozen=True)
class PeriodGrid:
    """周期 L、离散节点数 G、窗口阶数 η 与节点布局

    Raises:
        GridError: G_j 不是偶数或 G_j <= 2η
        ValidationError: L 不是正整数向量
    """

    L: tuple
    G: tuple
    eta: int = 1
    layout: NodeLayout = DEFAULT_LAYOUT

    def __post_init__(self):
        L = tuple(np.atleast_1d(self.L).tolist())
        G = tuple(np.atleast_1d(self.G).tolist())
        if len(L) == 0 or len(L) != len(G):
            raise ValidationError("L 与 G 的维数必须一致且非空", field="G")
        for j, value in enumerate(L):
            if int(value) != value or value < 1:
                raise ValidationError(f"第 {j} 维的 L={value} 不是正整数", field="L")
        if int(self.eta) != self.eta or self.eta < 1:
            raise ValidationError("eta 必须是正整数", field="eta")
        validate_grid_sizes(G, int(self.eta))
        object.__setattr__(self, "L", tuple(int(v) for v in L))
        object.__setattr__(self, "G", tuple(int(v) for v in G))
        object.__setattr__(self, "eta", int(self.eta))
        object.__setattr__(self, "layout", NodeLayout.parse(self.layout))

    @property
    def dim(self):
        return len(self.L)

    @property
    def L_min(self):
        return min(self.L)

    @property
    def L_max(self):
        return max(self.L)

    @property
    def G_min(self):
        return min(self.G)
