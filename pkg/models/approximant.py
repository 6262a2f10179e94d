#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
周期逼近函数 f_p(x) = Σ b_ℓ e^{i2π h_ℓ·x/L}，基本区域 Ω = [0,L_1)×…×[0,L_d)
"""

from dataclasses import dataclass

import numpy as np

from models.errors import ValidationError


@dataclass(frozen=True, eq=False)
class PeriodicApproximant:
    """周期逼近函数

    Args:
        L: 周期向量
        exponents: D×d 整数指数 h_ℓ
        coefficients: D 个复系数 b_ℓ
    """

    L: tuple
    exponents: np.ndarray
    coefficients: np.ndarray

    def __post_init__(self):
        L = tuple(int(v) for v in np.atleast_1d(self.L))
        H = np.atleast_2d(np.asarray(self.exponents, dtype=np.int64))
        b = np.asarray(self.coefficients, dtype=complex).reshape(-1)
        if H.shape[1] != len(L):
            raise ValidationError("指数维数与 L 不一致", field="exponents")
        if H.shape[0] != b.shape[0]:
            raise ValidationError("指数个数与系数个数不一致", field="coefficients")
        if len({tuple(h) for h in H.tolist()}) != H.shape[0]:
            raise ValidationError("周期逼近的指数必须互不相同", field="exponents")
        H.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "exponents", H)
        object.__setattr__(self, "coefficients", b)

    @property
    def frequencies(self):
        """h_ℓ / L，逐维除"""
        return self.exponents / np.asarray(self.L, dtype=float)

    def __call__(self, x):
        return evaluate_fp(self, x)


def evaluate_fp(approx, x):
    """f_p(x) = Σ b_ℓ e^{i2π h_ℓ·x/L}

    Args:
        approx: PeriodicApproximant
        x: (d,) 的点或 (..., d) 的点集

    Returns:
        complex 或复数数组
    """
    x = np.asarray(x, dtype=float)
    d = len(approx.L)
    single = x.ndim <= 1
    pts = x.reshape(-1, d)
    # 先对 L 取模，避免大坐标下相位精度损失
    pts = np.mod(pts, np.asarray(approx.L, dtype=float))
    phases = np.exp(2j * np.pi * (pts @ approx.frequencies.T))
    values = phases @ approx.coefficients
    if single:
        return complex(values[0])
    return values.reshape(x.shape[:-1])
