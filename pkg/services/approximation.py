#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
周期逼近流程：组装加窗 DFT 矩阵 M、M_p，求解系数，构造 f_p 并估计 ε₀
"""

import logging
import string
import warnings
from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg
from scipy.optimize import minimize_scalar

from models.approximant import PeriodicApproximant
from models.errors import GridError, NumericalFailureError, ValidationError
from models.exponents import classify
from models.quasiperiodic import PeriodGrid
from models.window import dft_entry, in_index_set
from utils.settings import DEFAULT_SETTINGS

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GridRule:
    """G 的选取规则：G_j = scale·L_j + offset，或 use_max 时 G_j = scale·L_max + offset"""

    scale: int
    offset: int = 0
    use_max: bool = False

    def __post_init__(self):
        if self.scale < 0 or (self.scale == 0 and self.offset <= 0):
            raise ValidationError("G 规则必须给出正的网格大小", field="G_rule")

    @property
    def text(self):
        base = f"{self.scale}{'Lmax' if self.use_max else 'L'}"
        if self.offset > 0:
            return f"{base}+{self.offset}"
        if self.offset < 0:
            return f"{base}{self.offset}"
        return base

    def apply(self, L):
        """展开为 G 向量；结果为奇数时加 1"""
        L = [int(v) for v in np.atleast_1d(L)]
        base = [max(L)] * len(L) if self.use_max else L
        G = []
        for value in base:
            g = self.scale * value + self.offset
            if g % 2:
                logger.warning("G 规则 %s 在 L=%d 处给出奇数 %d，改用 %d", self.text, value, g, g + 1)
                g += 1
            G.append(g)
        return tuple(G)


TEN_L = GridRule(scale=10)
TWO_LMAX_PLUS_10 = GridRule(scale=2, offset=10, use_max=True)
NAMED_GRID_RULES = {"10L": TEN_L, "2Lmax+10": TWO_LMAX_PLUS_10}


def norm_1(matrix):
    """矩阵 1-范数：列绝对值和的最大值"""
    return float(np.max(np.sum(np.abs(matrix), axis=0)))


def norm_e(matrix):
    """逐元素绝对值之和"""
    return float(np.sum(np.abs(matrix)))


def _lu(matrix, name):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(matrix)
    diag = np.abs(np.diag(lu))
    if diag.size == 0 or diag.min() <= np.finfo(float).eps * max(diag.max(), 1.0) * diag.size:
        raise NumericalFailureError(f"矩阵 {name} 在工作精度下奇异（L/G 可能不满足条件）")
    return lu, piv


def inverse_matrix(matrix, name="M"):
    """通过 LU 逐列求逆

    Raises:
        NumericalFailureError: 矩阵奇异
    """
    lu = _lu(matrix, name)
    return scipy.linalg.lu_solve(lu, np.eye(matrix.shape[0], dtype=complex))


@dataclass(frozen=True, eq=False)
class CoefficientSystem:
    """M·y = M_p·y_p 的系数矩阵（行列按内部顺序，有理指数在前）

    Attributes:
        M: u_st = dft_entry(v_t, h_s)
        M_p: u^p_st = dft_entry(h_t, h_s)
        exponents: 对应的 ScaledExponentSet
        grid: PeriodGrid
    """

    M: np.ndarray
    M_p: np.ndarray
    exponents: object
    grid: PeriodGrid

    @property
    def size(self):
        return self.M.shape[0]

    @property
    def zeta(self):
        return self.exponents.zeta

    def blocks(self):
        """(M11, M12, M21, U)"""
        z = self.zeta
        return self.M[:z, :z], self.M[:z, z:], self.M[z:, :z], self.M[z:, z:]

    def residual(self, y, y_p):
        """‖M y - M_p y_p‖₁，向量按输入顺序"""
        yi = self.exponents.to_internal_order(y)
        ypi = self.exponents.to_internal_order(y_p)
        return float(np.sum(np.abs(self.M @ yi - self.M_p @ ypi)))

    def structure_defects(self):
        """(‖M_p - I‖_max, 有理列与单位列的最大偏差)"""
        eye = np.eye(self.size)
        mp_defect = float(np.max(np.abs(self.M_p - eye)))
        z = self.zeta
        rational_defect = float(np.max(np.abs(self.M[:, :z] - eye[:, :z]))) if z else 0.0
        return mp_defect, rational_defect


def build_system(spec, grid, exponent_set):
    """用加窗 DFT 元素填充 M 与 M_p

    Raises:
        GridError: 某个 h_s 不在 K_G 内
    """
    if tuple(grid.L) != tuple(exponent_set.L):
        raise ValidationError(f"网格周期 {grid.L} 与分类所用 L={exponent_set.L} 不一致", field="L")
    V, H = exponent_set.V, exponent_set.H
    for s in range(H.shape[0]):
        if not in_index_set(H[s], grid.G):
            row = int(exponent_set.order[s])
            raise GridError(
                f"网格太小：指数 h={H[s].tolist()}（格向量 {spec.lattice[row].tolist()}）"
                f"不在 K_G 内，G={list(grid.G)}，需要 G_j > 2·max|h_j|", field="G")
    D = H.shape[0]
    M = np.empty((D, D), dtype=complex)
    M_p = np.empty((D, D), dtype=complex)
    for s in range(D):
        for t in range(D):
            M[s, t] = dft_entry(V[t], H[s], grid)
            M_p[s, t] = dft_entry(H[t], H[s], grid)
    M.setflags(write=False)
    M_p.setflags(write=False)
    logger.debug("组装系数矩阵 D=%d, L=%s, G=%s", D, grid.L, grid.G)
    return CoefficientSystem(M=M, M_p=M_p, exponents=exponent_set, grid=grid)


def _check_residual(system, y, y_p):
    res = system.residual(y, y_p)
    scale = float(np.sum(np.abs(y)))
    if res > 1e-10 * max(scale, 1e-300):
        logger.warning("求解残差 %.3e 超过 1e-10·‖y‖₁ = %.3e", res, 1e-10 * scale)
    return res


def solve_periodic_coefficients(system, y):
    """y_p = M_p^{-1}·M·y（输入顺序进、输入顺序出）

    Raises:
        NumericalFailureError: M_p 奇异
    """
    yi = system.exponents.to_internal_order(np.asarray(y, dtype=complex))
    lu = _lu(system.M_p, "M_p")
    y_p = system.exponents.to_input_order(scipy.linalg.lu_solve(lu, system.M @ yi))
    _check_residual(system, y, y_p)
    return y_p


def solve_quasiperiodic_coefficients(system, y_p):
    """y = M^{-1}·M_p·y_p

    Raises:
        NumericalFailureError: M 奇异
    """
    ypi = system.exponents.to_internal_order(np.asarray(y_p, dtype=complex))
    lu = _lu(system.M, "M")
    y = system.exponents.to_input_order(scipy.linalg.lu_solve(lu, system.M_p @ ypi))
    _check_residual(system, y, y_p)
    return y


@dataclass(frozen=True, eq=False)
class ApproximationResult:
    """一次周期逼近的全部中间量（向量均为输入顺序）"""

    spec: object
    grid: PeriodGrid
    exponents: object
    system: CoefficientSystem
    y: np.ndarray
    y_p: np.ndarray
    approximant: PeriodicApproximant
    notes: tuple = ()


def approximate(spec, grid, settings=DEFAULT_SETTINGS):
    """分类 → 组装 → 求解 → 构造 f_p

    Returns:
        ApproximationResult
    """
    exponent_set = classify(spec, grid.L, settings)
    system = build_system(spec, grid, exponent_set)
    y = np.array(spec.coefficients, dtype=complex)
    y_p = solve_periodic_coefficients(system, y)
    approximant = PeriodicApproximant(L=grid.L, exponents=exponent_set.H_input_order(), coefficients=y_p)
    return ApproximationResult(
        spec=spec, grid=grid, exponents=exponent_set, system=system,
        y=y, y_p=y_p, approximant=approximant, notes=exponent_set.notes)


@dataclass(frozen=True)
class SupSamplingPolicy:
    """ε₀ 的采样策略

    默认每维 n_j = max(10·max_ℓ|h_ℓ,j|, 1000)，网格含端点 x_j = L_j；
    多维时总点数不超过 max_points。n_per_dim 给定时直接使用。
    """

    samples_per_oscillation: int = 10
    min_points: int = 1000
    max_points: int = 1_000_000
    refine_top: int = 16
    refine_sweeps: int = 3
    n_per_dim: tuple = None

    @classmethod
    def from_settings(cls, settings=DEFAULT_SETTINGS, **overrides):
        policy = cls(
            samples_per_oscillation=settings.sup_samples_per_oscillation,
            min_points=settings.sup_min_points,
            max_points=settings.sup_max_points,
            refine_top=settings.sup_refine_top,
            refine_sweeps=settings.sup_refine_sweeps,
        )
        overrides = {k: v for k, v in overrides.items() if v is not None}
        if "n_per_dim" in overrides:
            overrides["n_per_dim"] = tuple(int(n) for n in np.atleast_1d(overrides["n_per_dim"]))
        return replace(policy, **overrides)

    def resolve(self, approx):
        """每维采样区间数 n_j（网格点数为 n_j + 1）"""
        d = len(approx.L)
        if self.n_per_dim is not None:
            n = list(self.n_per_dim)
            if len(n) == 1:
                n = n * d
            if len(n) != d or min(n) < 1:
                raise ValidationError("采样数必须为正且与维数一致", field="sup_sampling")
            return tuple(int(v) for v in n)
        hmax = np.max(np.abs(approx.exponents), axis=0)
        n = [max(self.samples_per_oscillation * int(h), self.min_points) for h in hmax]
        if d > 1:
            cap = int(np.floor(self.max_points ** (1.0 / d) + 1e-9)) - 1
            n = [min(v, max(cap, 1)) for v in n]
        return tuple(n)


@dataclass(frozen=True)
class SupErrorResult:
    value: float
    argmax: tuple
    grid_max: float
    n_per_dim: tuple


def _difference_tables(spec, approx, axes):
    """逐维相位表：f_p 用 h/L，f 用 λ"""
    lam = spec.exponents
    freq_p = approx.frequencies
    tables_p, tables_f = [], []
    for j, x in enumerate(axes):
        tables_p.append(np.exp(2j * np.pi * np.outer(freq_p[:, j], x)))
        tables_f.append(np.exp(2j * np.pi * np.outer(lam[:, j], x)))
    return tables_p, tables_f


def _point_error(spec, approx, x):
    x = np.asarray(x, dtype=float)
    p = np.exp(2j * np.pi * (approx.frequencies @ x)) @ approx.coefficients
    f = np.exp(2j * np.pi * (spec.exponents @ x)) @ spec.coefficients
    return abs(p - f)


def _refine(spec, approx, x0, widths, sweeps):
    """逐坐标有界标量优化，返回 (值, 点)"""
    L = np.asarray(approx.L, dtype=float)
    x = np.array(x0, dtype=float)
    best = _point_error(spec, approx, x)
    for _ in range(sweeps):
        for j in range(len(x)):
            lo = max(0.0, x[j] - widths[j])
            hi = min(L[j], x[j] + widths[j])
            if hi <= lo:
                continue

            def objective(t, j=j):
                trial = x.copy()
                trial[j] = t
                return -_point_error(spec, approx, trial)

            res = minimize_scalar(objective, bounds=(lo, hi), method="bounded",
                                  options={"xatol": 1e-10 * max(L[j], 1.0)})
            if -res.fun > best:
                best = -res.fun
                x[j] = res.x
    return best, x


def sup_error(spec, approx, sampling=None):
    """估计 ε₀ = sup_{x∈Ω} |f_p(x) - f(x)|

    先在含端点的均匀网格上求最大值，再在前若干个网格极大点附近做逐坐标细化。
    结果是真实上确界的下界。

    Args:
        spec: QuasiperiodicSpec
        approx: PeriodicApproximant（系数顺序与 spec 一致）
        sampling: SupSamplingPolicy

    Returns:
        SupErrorResult
    """
    sampling = sampling or SupSamplingPolicy()
    d = len(approx.L)
    n = sampling.resolve(approx)
    axes = [np.linspace(0.0, float(Lj), nj + 1) for Lj, nj in zip(approx.L, n)]
    tables_p, tables_f = _difference_tables(spec, approx, axes)
    letters = string.ascii_lowercase[:d]
    subscripts = ",".join("z" + c for c in letters) + "->" + letters
    shape = tuple(len(a) for a in axes)
    inner = int(np.prod(shape[1:])) if d > 1 else 1
    rows_per_chunk = max(1, 2_000_000 // inner)
    b = approx.coefficients[:, None]
    a = spec.coefficients[:, None]

    top_k = max(int(sampling.refine_top), 1)
    cand_vals = np.empty(0)
    cand_idx = np.empty(0, dtype=np.int64)
    for start in range(0, shape[0], rows_per_chunk):
        stop = min(start + rows_per_chunk, shape[0])
        ops_p = [b * tables_p[0][:, start:stop]] + tables_p[1:]
        ops_f = [a * tables_f[0][:, start:stop]] + tables_f[1:]
        err = np.abs(np.einsum(subscripts, *ops_p) - np.einsum(subscripts, *ops_f)).reshape(-1)
        k = min(top_k, err.size)
        local = np.argpartition(-err, k - 1)[:k]
        cand_vals = np.concatenate([cand_vals, err[local]])
        cand_idx = np.concatenate([cand_idx, local + start * inner])
        keep = np.lexsort((cand_idx, -cand_vals))[:top_k]
        cand_vals, cand_idx = cand_vals[keep], cand_idx[keep]

    grid_max = float(cand_vals[0])
    best_val = grid_max
    best_x = tuple(axes[j][i] for j, i in enumerate(np.unravel_index(int(cand_idx[0]), shape)))
    if sampling.refine_top > 0 and sampling.refine_sweeps > 0:
        widths = [float(Lj) / nj for Lj, nj in zip(approx.L, n)]
        for flat in cand_idx:
            x0 = [axes[j][i] for j, i in enumerate(np.unravel_index(int(flat), shape))]
            val, x = _refine(spec, approx, x0, widths, sampling.refine_sweeps)
            if val > best_val:
                best_val, best_x = val, tuple(float(v) for v in x)
    logger.info("ε₀ 估计: 网格 %s, 网格最大 %.6e, 细化后 %.6e", n, grid_max, best_val)
    return SupErrorResult(value=float(best_val), argmax=tuple(float(v) for v in best_x),
                          grid_max=grid_max, n_per_dim=n)
