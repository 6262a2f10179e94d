#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
缩放指数 v_ℓ = L∘λ_ℓ、取整 h_ℓ = [v_ℓ] 与有理性分类
"""

import logging
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from models.errors import ValidationError
from utils.settings import DEFAULT_SETTINGS

logger = logging.getLogger(__name__)


def round_half_away(values):
    """最近整数，半整数远离零取整"""
    values = np.asarray(values, dtype=float)
    return np.where(values >= 0, np.floor(values + 0.5), -np.floor(-values + 0.5))


def integer_mask(values, int_eps):
    """|v - round(v)| < int_eps·max(1,|v|) 的元素视为整数"""
    values = np.asarray(values, dtype=float)
    return np.abs(values - np.round(values)) < int_eps * np.maximum(1.0, np.abs(values))


def count_distinct_mod1(values, dist_eps):
    """模 1 约化后按圆周距离去重计数"""
    if len(values) == 0:
        return 0
    frac = np.sort(np.mod(np.asarray(values, dtype=float), 1.0))
    count = 1 + int(np.sum(np.diff(frac) > dist_eps))
    if count > 1 and (frac[0] + 1.0 - frac[-1]) <= dist_eps:
        count -= 1
    return count


@dataclass(frozen=True, eq=False)
class ScaledExponentSet:
    """分类后的缩放指数集合（行已重排：全整数行在前）

    Attributes:
        L: 周期向量
        V: D×d，v_ℓ = L∘λ_ℓ
        H: D×d 整数，h_ℓ = [v_ℓ]
        deltaV: D×d，h_ℓ - v_ℓ
        integer: D×d 布尔，元素是否为整数
        order: 内部第 i 行对应输入中的第 order[i] 行
        zeta: 全整数行个数 ζ
        r: 每行整数元素个数 r_s
        alpha: D×D，无理行之间相等分量的个数 α_st（其余为 0）
        d_m, d_M: min r_s 与 max α_st（仅无理行）
        s_per_dim: 每列不同无理元素的个数 s_j
        notes: 分类过程中的提示
    """

    L: tuple
    V: np.ndarray
    H: np.ndarray
    deltaV: np.ndarray
    integer: np.ndarray
    order: np.ndarray
    zeta: int
    r: np.ndarray
    alpha: np.ndarray
    d_m: int
    d_M: int
    s_per_dim: tuple
    notes: tuple = ()

    @property
    def size(self):
        return self.V.shape[0]

    @property
    def dim(self):
        return self.V.shape[1]

    @property
    def irrational_rows(self):
        return range(self.zeta, self.size)

    @property
    def row_residual_inf(self):
        """每行 ‖v_s - h_s‖_∞"""
        return np.max(np.abs(self.deltaV), axis=1)

    def to_input_order(self, values):
        """把内部顺序的向量恢复为输入顺序"""
        values = np.asarray(values)
        restored = np.empty_like(values)
        restored[self.order] = values
        return restored

    def to_internal_order(self, values):
        """把输入顺序的向量换成内部顺序"""
        return np.asarray(values)[self.order]

    def H_input_order(self):
        return self.to_input_order(self.H)


def classify(spec, L, settings=DEFAULT_SETTINGS):
    """计算 V、H、ΔV 与有理性统计量

    Args:
        spec: QuasiperiodicSpec
        L: 周期向量（正整数）
        settings: 容差配置

    Returns:
        ScaledExponentSet

    Raises:
        ValidationError: L 维数不符或不是正整数
    """
    L = tuple(int(v) for v in np.atleast_1d(L))
    d = spec.dim
    if len(L) != d:
        raise ValidationError(f"L 需要 {d} 个分量，收到 {len(L)}", field="L")
    if any(v < 1 for v in L):
        raise ValidationError("L 的分量必须是正整数", field="L")

    lam = spec.exponents
    Lvec = np.asarray(L, dtype=float)
    V = lam * Lvec
    is_int = integer_mask(V, settings.int_eps)
    notes = []

    # 有理标注优先
    if spec.rational_marks is not None:
        for i, row in enumerate(spec.rational_marks):
            for j, mark in enumerate(row):
                if mark is None:
                    continue
                exact = mark * L[j]
                V[i, j] = float(exact)
                is_int[i, j] = exact.denominator == 1

    H = round_half_away(V)
    H[is_int] = np.round(V[is_int])
    V[is_int] = H[is_int]

    frac = np.abs(V - np.floor(V) - 0.5)
    ties = (~is_int) & (frac <= settings.tie_eps)
    for i, j in np.argwhere(ties):
        msg = f"v[{int(i)}][{int(j)}]={V[i, j]!r} 接近半整数，已远离零取整"
        notes.append(msg)
        logger.warning(msg)

    rational_row = np.all(is_int, axis=1)
    order = np.concatenate([np.flatnonzero(rational_row), np.flatnonzero(~rational_row)])
    V, H, is_int = V[order], H[order].astype(np.int64), is_int[order]
    deltaV = H - V
    deltaV[is_int] = 0.0
    zeta = int(np.sum(rational_row))
    D = V.shape[0]

    r = np.sum(is_int, axis=1).astype(int)
    alpha = np.zeros((D, D), dtype=int)
    for s in range(zeta, D):
        for t in range(zeta, D):
            if s == t:
                continue
            tol = settings.dist_eps * np.maximum(1.0, np.abs(V[s]))
            alpha[s, t] = int(np.sum(np.abs(V[s] - V[t]) <= tol))
    if D - zeta >= 1:
        d_m = int(np.min(r[zeta:]))
    else:
        d_m = 0
    d_M = int(np.max(alpha)) if D - zeta >= 2 else 0

    s_per_dim = tuple(
        count_distinct_mod1(V[~is_int[:, j], j], settings.dist_eps) for j in range(d))

    if np.max(np.abs(deltaV), initial=0.0) > 0.5:
        raise ValidationError("取整残差超过 1/2", field="L")

    for arr in (V, H, deltaV, is_int, order, r, alpha):
        arr.setflags(write=False)
    logger.debug("classify L=%s: zeta=%d, d_m=%d, d_M=%d, s=%s", L, zeta, d_m, d_M, s_per_dim)
    return ScaledExponentSet(
        L=L, V=V, H=H, deltaV=deltaV, integer=is_int, order=order, zeta=zeta,
        r=r, alpha=alpha, d_m=d_m, d_M=d_M, s_per_dim=s_per_dim, notes=tuple(notes))


def exact_residual(value, L):
    """有理数 λ 的精确残差 |Lλ - [Lλ]|"""
    scaled = Fraction(value) * L
    nearest = Fraction(int(round_half_away(float(scaled))))
    return float(abs(scaled - nearest))
