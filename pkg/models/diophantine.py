#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Diophantine 逼近：列残差 e(L)、最佳同时逼近序列、Dirichlet 界与 Diophantine 条件检查
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from models.errors import ValidationError
from models.exponents import exact_residual, integer_mask
from utils.settings import DEFAULT_SETTINGS

logger = logging.getLogger(__name__)


def _split_column(lambda_col, int_eps):
    """拆成浮点无理元素与精确有理元素；浮点整数元素直接丢弃"""
    floats, fractions = [], []
    for value in lambda_col:
        if isinstance(value, Fraction):
            if value.denominator != 1:
                fractions.append(value)
        else:
            value = float(value)
            if not integer_mask(value, int_eps):
                floats.append(value)
    return np.asarray(floats, dtype=float), fractions


def column_error(lambda_col, L, settings=DEFAULT_SETTINGS):
    """e(L) = Σ |L·λ - [L·λ]|，整数元素贡献 0

    Args:
        lambda_col: 一列指数（float 或 Fraction）
        L: 正整数

    Returns:
        float
    """
    if int(L) != L or L < 1:
        raise ValidationError("L 必须是正整数", field="L")
    floats, fractions = _split_column(lambda_col, settings.int_eps)
    scaled = floats * int(L)
    total = float(np.sum(np.abs(scaled - np.round(scaled))))
    for value in fractions:
        total += exact_residual(value, int(L))
    return total


def _errors_for(Ls, floats, fractions):
    scaled = Ls[:, None].astype(float) * floats[None, :]
    e = np.sum(np.abs(scaled - np.round(scaled)), axis=1)
    for value in fractions:
        p, q = value.numerator, value.denominator
        rem = np.mod(Ls * p, q)
        e = e + np.minimum(rem, q - rem) / q
    return e


@dataclass(frozen=True)
class BestApproxSequence:
    """最佳同时逼近序列

    Attributes:
        dim_index: 列号 j
        entries: ((t_k, E_k), ...)，t_k 递增、E_k 严格递减
        search_start: 扫描窗口下界 L_min
        search_limit: 扫描窗口上界 L_max
    """

    dim_index: int
    entries: tuple
    search_start: int
    search_limit: int

    @property
    def ts(self):
        return [t for t, _ in self.entries]

    @property
    def errors(self):
        return [e for _, e in self.entries]

    def __len__(self):
        return len(self.entries)


def _validate_range(L_min, L_max, settings):
    if int(L_min) != L_min or int(L_max) != L_max:
        raise ValidationError("扫描区间端点必须是整数", field="range")
    if L_min < 1 or L_min > L_max:
        raise ValidationError(f"扫描区间 [{L_min}, {L_max}] 为空", field="range")
    if L_max > settings.scan_max_L:
        raise ValidationError(f"L_max={L_max} 超过上限 {settings.scan_max_L}", field="range")


def iter_scan(lambda_col, L_min, L_max, settings=DEFAULT_SETTINGS):
    """按块扫描 L = 1..L_max，产出窗口内的 (L, e(L), is_record)

    记录从 L=1 开始维护：窗口内首个记录是第一个不劣于此前全部 L 的点，
    其后只在 e 严格下降时记录。

    Yields:
        (Ls, e, is_record) 三个等长数组
    """
    _validate_range(L_min, L_max, settings)
    floats, fractions = _split_column(lambda_col, settings.int_eps)
    best = math.inf
    found = False
    chunk = max(1, int(settings.scan_chunk))
    for start in range(1, int(L_max) + 1, chunk):
        stop = min(start + chunk, int(L_max) + 1)
        Ls = np.arange(start, stop, dtype=np.int64)
        e = _errors_for(Ls, floats, fractions)
        prev_min = np.minimum.accumulate(np.concatenate(([best], e[:-1])))
        in_window = Ls >= L_min
        is_record = np.zeros(Ls.shape, dtype=bool)
        if np.any(in_window):
            strict = (e < prev_min) & in_window
            if not found:
                weak = np.flatnonzero((e <= prev_min) & in_window)
                if weak.size:
                    first = int(weak[0])
                    is_record[first] = True
                    strict[: first + 1] = False
                    is_record |= strict
                    found = True
            else:
                is_record |= strict
            logger.info("扫描进度 %d/%d，当前最小 e=%.6g", stop - 1, L_max, min(best, float(e.min())))
            yield Ls[in_window], e[in_window], is_record[in_window]
        best = min(best, float(e.min()))


def scan_errors(lambda_col, L_min, L_max, settings=DEFAULT_SETTINGS):
    """窗口内全部 e(L) 及记录标记

    Returns:
        (Ls, e, is_record)
    """
    parts = list(iter_scan(lambda_col, L_min, L_max, settings))
    return tuple(np.concatenate([p[k] for p in parts]) for k in range(3))


def best_sequence(lambda_col, L_min, L_max, dim_index=0, settings=DEFAULT_SETTINGS):
    """在 [L_min, L_max] 内搜索最佳同时逼近序列（线性扫描）

    Raises:
        ValidationError: 区间为空或超过扫描上限
    """
    entries = []
    for Ls, e, is_record in iter_scan(lambda_col, L_min, L_max, settings):
        for idx in np.flatnonzero(is_record):
            entries.append((int(Ls[idx]), float(e[idx])))
    return BestApproxSequence(
        dim_index=int(dim_index), entries=tuple(entries),
        search_start=int(L_min), search_limit=int(L_max))


def dirichlet_bound(s, L):
    """Dirichlet 同时逼近界 C_s·L^{-1/s}，C_s = s/(s+1)"""
    if int(s) != s or s < 1:
        raise ValidationError("s 必须是正整数", field="s")
    if L <= 0:
        raise ValidationError("L 必须为正", field="L")
    return s / (s + 1.0) * float(L) ** (-1.0 / s)


def diophantine_margin(value, k_norm, C_a, tau):
    """|λ| - C_a/‖k‖_∞^{2+τ}；‖k‖ = 0 时没有有限下界，返回 -inf"""
    if k_norm <= 0:
        return -math.inf
    return abs(value) - C_a / float(k_norm) ** (2.0 + tau)


@dataclass(frozen=True)
class DiophantineEntry:
    row: int
    col: int
    value: float
    k_norm: int
    bound: float
    margin: float

    @property
    def passed(self):
        return self.margin > 0


@dataclass(frozen=True)
class DiophantineReport:
    C_a: float
    tau: float
    entries: tuple

    @property
    def all_passed(self):
        return all(e.passed for e in self.entries)

    def rows_passed(self):
        """每个指数 λ_ℓ 是否全部无理分量通过"""
        result = {}
        for e in self.entries:
            result[e.row] = result.get(e.row, True) and e.passed
        return result

    def failures(self):
        return [e for e in self.entries if not e.passed]


def check_diophantine(spec, settings=DEFAULT_SETTINGS):
    """逐个无理分量检查 |λ_ℓ,j| > C_a/‖k_ℓ‖_∞^{2+τ}

    只检查 p=0、q=‖k‖_∞ 这一特例；不通过记为数据，不抛异常。

    Returns:
        DiophantineReport
    """
    entries = []
    lam = spec.exponents
    for i in range(spec.size):
        k_norm = int(np.max(np.abs(spec.lattice[i])))
        for j in range(spec.dim):
            mark = spec.mark(i, j)
            if mark is not None:
                continue
            value = float(lam[i, j])
            if integer_mask(value, settings.int_eps):
                continue
            margin = diophantine_margin(value, k_norm, spec.C_a, spec.tau)
            bound = math.inf if k_norm == 0 else spec.C_a / float(k_norm) ** (2.0 + spec.tau)
            entries.append(DiophantineEntry(i, j, value, k_norm, bound, margin))
    report = DiophantineReport(spec.C_a, spec.tau, tuple(entries))
    for e in report.failures():
        logger.info("λ[%d][%d]=%.6g 不满足 Diophantine 条件，余量 %.3g", e.row, e.col, e.value, e.margin)
    return report


def delta_v_norm(exponent_set):
    """‖ΔV‖_e = Σ_ℓ Σ_j |h_ℓ,j - v_ℓ,j|"""
    return float(np.sum(np.abs(exponent_set.deltaV)))


def decay_slope(ts, errors):
    """log e 对 log t 的最小二乘斜率（零误差点忽略）"""
    ts = np.asarray(ts, dtype=float)
    errors = np.asarray(errors, dtype=float)
    keep = (ts > 0) & (errors > 0)
    if np.sum(keep) < 2:
        raise ValidationError("至少需要两个正误差点才能拟合斜率", field="errors")
    slope, _ = np.polyfit(np.log(ts[keep]), np.log(errors[keep]), 1)
    return float(slope)


def growth_diagnostics(ts):
    """序列增长率诊断：t_k^{1/k} 与 ln(t_k)/k（k 从 1 开始）"""
    rows = []
    for k, t in enumerate(ts, start=1):
        rows.append({"k": k, "t": int(t), "root": float(t) ** (1.0 / k), "log_rate": math.log(t) / k})
    return rows
