#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
误差界：容许性条件、g 函数、x 常数、ε₁ / ε₂ 以及矩阵范数界的数值诊断
"""

import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from models.diophantine import delta_v_norm
from models.errors import InadmissibleParametersError, ValidationError
from models.window import WindowKernel, nwft_factor
from services.approximation import inverse_matrix, norm_1, norm_e

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BoundInputs:
    """误差界需要的全部标量

    L_min、L_max、G_min 由网格重新计算；row_residual_inf 只含无理行。
    """

    d: int
    D: int
    zeta: int
    N: int
    eta: int
    d_m: int
    d_M: int
    r: tuple
    C_a: float
    tau: float
    L_min: int
    L_max: int
    G_min: int
    p_norm_1: float
    deltaV_e: float
    row_residual_inf: tuple
    b_max: float
    b_max_source: str = "solved"

    @classmethod
    def from_parts(cls, spec, grid, exponent_set, b_max=None):
        """由问题、网格与分类结果组装

        Args:
            b_max: 已求得的 max|b_ℓ|；为 None 时以 max|a_ℓ| 代替
        """
        source = "solved"
        if b_max is None:
            b_max = float(np.max(np.abs(spec.coefficients)))
            source = "proxy"
        z = exponent_set.zeta
        return cls(
            d=grid.dim, D=exponent_set.size, zeta=z, N=spec.N, eta=grid.eta,
            d_m=exponent_set.d_m, d_M=exponent_set.d_M,
            r=tuple(int(v) for v in exponent_set.r[z:]),
            C_a=spec.C_a, tau=spec.tau,
            L_min=min(grid.L), L_max=max(grid.L), G_min=min(grid.G),
            p_norm_1=spec.p_norm_1, deltaV_e=delta_v_norm(exponent_set),
            row_residual_inf=tuple(float(v) for v in exponent_set.row_residual_inf[z:]),
            b_max=float(b_max), b_max_source=source)

    @classmethod
    def from_result(cls, result):
        """由 ApproximationResult 组装，b_max 取自求得的 y_p"""
        return cls.from_parts(result.spec, result.grid, result.exponents,
                              b_max=float(np.max(np.abs(result.y_p))))

    @property
    def irrational_count(self):
        return self.D - self.zeta

    @property
    def lmin_margin(self):
        """L_min·C_a/(2N)^{2+τ} - 1/2 - η"""
        return self.L_min * self.C_a / (2.0 * self.N) ** (2.0 + self.tau) - 0.5 - self.eta

    @property
    def gmin_margin(self):
        """G_min - 2L_max‖P‖₁N - 1/2 - η"""
        return self.G_min - 2.0 * self.L_max * self.p_norm_1 * self.N - 0.5 - self.eta


G0_CONDITION = "L_min·C_a/(2N)^(2+τ) - 1/2 - η > 0"
G2_CONDITION = "G_min - 1/2 - η > 0"
G3_CONDITION = "G_min - 2·L_max·‖P‖₁·N - 1/2 - η > 0"


def g0(inputs, t0):
    """g0(t0) = (L_min·C_a/(2N)^{2+τ} - 1/2 - η)^{-t0}"""
    base = inputs.lmin_margin
    if base <= 0:
        raise InadmissibleParametersError(f"g0 的底数 {base:.6g} 非正", condition=G0_CONDITION)
    return base ** (-t0)


def g1(inputs, t1, t2, residual):
    """g1(t1, t2) = (t1·G_min - ‖v_s - h_t‖_∞ - η)^{-t2}"""
    base = t1 * inputs.G_min - residual - inputs.eta
    if base <= 0:
        raise InadmissibleParametersError(
            f"g1 的底数 {base:.6g} 非正", condition="t1·G_min - ‖v_s - h_t‖_∞ - η > 0")
    return base ** (-t2)


def g2(inputs, r):
    """g2 = (η(G_min - 1/2 - η)^{2η+1})^{-(d-r)}"""
    base = inputs.G_min - 0.5 - inputs.eta
    if base <= 0:
        raise InadmissibleParametersError(f"g2 的底数 {base:.6g} 非正", condition=G2_CONDITION)
    return (inputs.eta * base ** (2 * inputs.eta + 1)) ** (-(inputs.d - r))


def g3(inputs, r):
    """g3 = (η(G_min - 2L_max‖P‖₁N - 1/2 - η)^{2η+1})^{-(d-r)}"""
    base = inputs.gmin_margin
    if base <= 0:
        raise InadmissibleParametersError(f"g3 的底数 {base:.6g} 非正", condition=G3_CONDITION)
    return (inputs.eta * base ** (2 * inputs.eta + 1)) ** (-(inputs.d - r))


@dataclass(frozen=True)
class GFunctions:
    """绑定了 BoundInputs 的 g0..g3"""

    inputs: BoundInputs

    def g0(self, t0):
        return g0(self.inputs, t0)

    def g1(self, t1, t2, residual=0.0):
        return g1(self.inputs, t1, t2, residual)

    def g2(self, r):
        return g2(self.inputs, r)

    def g3(self, r):
        return g3(self.inputs, r)


def g_functions(inputs):
    return GFunctions(inputs)


@dataclass(frozen=True)
class XConstants:
    x1: float
    x2: float
    x3: float
    y2: float
    x2_m12: float
    x1_generic: float
    x1_sharpened: float
    sharpened: bool


def _x1_generic(inputs):
    k = inputs.d - inputs.d_m
    eta = inputs.eta
    return (5.0 / 3.0) ** k * math.factorial(eta) ** (-2 * k) * (0.5 + eta) ** (2 * eta * k)


def _x1_sharpened(inputs):
    eta, d = inputs.eta, inputs.d
    best = 0.0
    for res, r_s in zip(inputs.row_residual_inf, inputs.r):
        if res >= 1.0:
            raise InadmissibleParametersError(
                f"‖v_s - h_s‖_∞ = {res:.6g} 使锐化 x1 发散", condition="‖v_s - h_s‖_∞ < 1")
        k = d - r_s
        value = (res + eta) ** (2 * eta * k) * ((1.0 + res ** 2) / (1.0 - res ** 2)) ** k
        best = max(best, value)
    return best


def _r_sum(inputs, weight):
    """Σ_{r=d_m}^{d-1} (η!)^{2(d-r)} π^{-(d-r)} C(d-d_m, r-d_m) Σ_β (2η)^β C(d-r,β) · weight(r)"""
    eta, d, d_m = inputs.eta, inputs.d, inputs.d_m
    total = 0.0
    for r in range(d_m, d):
        k = d - r
        inner = sum((2 * eta) ** beta * math.comb(k, beta) for beta in range(k + 1))
        coef = math.factorial(eta) ** (2 * k) * math.pi ** (-k) * math.comb(d - d_m, r - d_m) * inner
        total += coef * weight(r)
    return total


def x_constants(inputs, sharpened=False):
    """x1, x2, x3, y2 以及 ‖M₁₂‖₁ 估计中不带 (D-ζ-1) 因子的 x2

    Args:
        inputs: BoundInputs
        sharpened: 是否使用按行锐化的 x1

    Returns:
        XConstants

    Raises:
        InadmissibleParametersError: g 函数底数非正或锐化 x1 发散
    """
    if inputs.irrational_count == 0:
        return XConstants(1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, sharpened)
    eta, d = inputs.eta, inputs.d
    off = inputs.irrational_count - 1
    x1_generic = _x1_generic(inputs)
    x1_sharp = _x1_sharpened(inputs)
    x2_m12 = math.factorial(eta) ** (2 * d) * math.pi ** (-(d - inputs.d_M)) * g0(
        inputs, (2 * eta + 1) * (d - inputs.d_M))
    x2 = off * x2_m12
    x3 = _r_sum(inputs, lambda r: g2(inputs, r) + off * g3(inputs, r))
    y2 = _r_sum(inputs, lambda r: g3(inputs, r))
    x1 = x1_sharp if sharpened else x1_generic
    return XConstants(x1, x2, x3, y2, x2_m12, x1_generic, x1_sharp, sharpened)


def epsilon1(system, exponent_set, b_max):
    """ε₁ = b_max·‖M⁻¹‖₁·‖M_p - M‖_e + 2π·b_max·‖ΔV‖_e

    Raises:
        NumericalFailureError: M 奇异
    """
    m_inv = inverse_matrix(system.M, "M")
    gap = norm_e(system.M_p - system.M)
    return b_max * norm_1(m_inv) * gap + 2.0 * math.pi * b_max * delta_v_norm(exponent_set)


def epsilon2(inputs, constants=None, sharpened=False):
    """ε₂ = 2π·b_max·(D·[1+(ζ+1)(x2'+y2)]·x1/(1 - x1(x2+x3)) + 1)·‖ΔV‖_e

    Raises:
        InadmissibleParametersError: x1(x2+x3) >= 1
    """
    if inputs.deltaV_e == 0.0:
        return 0.0
    c = constants or x_constants(inputs, sharpened=sharpened)
    denom = 1.0 - c.x1 * (c.x2 + c.x3)
    if denom <= 0:
        raise InadmissibleParametersError(
            f"x1(x2+x3) = {c.x1 * (c.x2 + c.x3):.6g}，界不适用", condition="x1(x2+x3) < 1")
    amplification = inputs.D * (1.0 + (inputs.zeta + 1) * (c.x2_m12 + c.y2)) * c.x1 / denom
    return 2.0 * math.pi * inputs.b_max * (amplification + 1.0) * inputs.deltaV_e


@dataclass(frozen=True)
class Admissibility:
    full: bool
    weak: bool
    details: dict = field(default_factory=dict)


def default_epsilons(inputs):
    """把 (3π/5)^d (1/2+η)^{-2ηd} 的预算平均分给各组项，返回 (ε, [ε_r])"""
    d, eta = inputs.d, inputs.eta
    m = inputs.irrational_count
    budget = (3.0 * math.pi / 5.0) ** d * (0.5 + eta) ** (-2 * eta * d) * (1.0 - 1e-9)
    if m == 0:
        return math.inf, [math.inf] * d
    groups = d + (1 if m > 1 else 0)
    share = budget / groups
    eps_r = [share / (m * math.factorial(eta) ** (-2 * r) * math.pi ** r) for r in range(d)]
    eps = share / (m - 1) if m > 1 else math.inf
    return eps, eps_r


def admissibility_thresholds(inputs, eps=None, eps_r=None):
    """完全条件与弱化条件下 L_min、G_min 的下界"""
    d, eta, d_M = inputs.d, inputs.eta, inputs.d_M
    if eps is None or eps_r is None:
        default_eps, default_eps_r = default_epsilons(inputs)
        eps = default_eps if eps is None else eps
        eps_r = default_eps_r if eps_r is None else list(eps_r)
    scale = (2.0 * inputs.N) ** (2.0 + inputs.tau) / inputs.C_a
    floor = max(1.0, (math.factorial(eta) ** 2 / math.pi) ** (1.0 / (2 * eta + 1)))
    eps_term = 0.0 if math.isinf(eps) else (math.pi ** d_M / eps) ** (1.0 / ((2 * eta + 1) * (d - d_M)))
    g_base = 2.0 * inputs.L_max * inputs.p_norm_1 * inputs.N + eta + 0.5
    g_full = g_base
    for r in range(d):
        if math.isinf(eps_r[r]):
            continue
        inner = sum((2 * eta) ** beta * math.comb(d - r, beta) for beta in range(d - r + 1))
        extra = ((math.comb(d, r) * inner / eps_r[r]) ** (1.0 / (d - r)) / eta) ** (1.0 / (2 * eta + 1))
        g_full = max(g_full, g_base + extra)
    return {
        "L_full": scale * (eta + 0.5 + max(floor, eps_term)),
        "G_full": g_full,
        "L_weak": scale * (eta + 0.5 + floor),
        "G_weak": g_base,
        "eps": eps,
        "eps_r": list(eps_r),
    }


def check_admissibility(inputs, eps=None, eps_r=None):
    """完全容许性与弱化容许性

    Returns:
        Admissibility，details 含各阈值
    """
    th = admissibility_thresholds(inputs, eps, eps_r)
    full = inputs.L_min > th["L_full"] and inputs.G_min > th["G_full"]
    weak = inputs.L_min > th["L_weak"] and inputs.G_min > th["G_weak"]
    if not weak:
        logger.warning("弱化容许条件不成立: L_min=%d (需 > %.4g), G_min=%d (需 > %.4g)",
                       inputs.L_min, th["L_weak"], inputs.G_min, th["G_weak"])
    return Admissibility(full=full, weak=weak, details=th)


def truncation_bound(N, alpha, kappa, seminorm, d=None):
    """截断误差的比例尺度 N^{κ-α}·|f|_α（隐去常数）

    Raises:
        InadmissibleParametersError: 不满足 α > κ（给定 d 时还要求 κ > d/2）
    """
    if not alpha > kappa:
        raise InadmissibleParametersError("截断界参数顺序错误", condition="alpha > kappa")
    if d is not None and not kappa > d / 2.0:
        raise InadmissibleParametersError("截断界参数顺序错误", condition="kappa > d/2")
    if N < 1:
        raise ValidationError("N 必须是正整数", field="N")
    return float(N) ** (kappa - alpha) * seminorm


def nwft_matrix(system):
    """不可约块的 NWFT 矩阵 𝒰，𝒰_st = Π_j φ(v_t,j - h_s,j)（与 DFT 同一积分单元）"""
    es = system.exponents
    kernel = WindowKernel.of(system.grid.eta)
    layout = system.grid.layout
    z = es.zeta
    m = es.size - z
    U_cal = np.empty((m, m), dtype=complex)
    for a in range(m):
        for b in range(m):
            value = 1.0 + 0.0j
            for delta in es.V[z + b] - es.H[z + a]:
                value *= nwft_factor(float(delta), kernel, layout)
            U_cal[a, b] = value
    return U_cal


@dataclass(frozen=True)
class MatrixDiagnostics:
    """数值范数与理论界的对照"""

    nwft_inv_norm: float
    nwft_inv_bound: float
    alias_gap_norm: float
    alias_gap_bound: float
    U_inv_norm: float
    U_inv_bound: float
    M12_norm: float
    M12_bound: float
    M_inv_norm: float
    M_inv_block_bound: float

    def as_dict(self):
        return asdict(self)


def matrix_bound_diagnostics(system, inputs):
    """计算 ‖𝒰⁻¹‖₁、‖U - 𝒰‖₁、‖U⁻¹‖₁、‖M₁₂‖₁、‖M⁻¹‖₁ 并与定理界比较（使用一般 x1）"""
    c = x_constants(inputs, sharpened=False)
    M11, M12, M21, U = system.blocks()
    m_inv_norm = norm_1(inverse_matrix(system.M, "M"))
    if inputs.irrational_count == 0:
        return MatrixDiagnostics(0, 0, 0, 0, 0, 0, 0, 0, m_inv_norm, 1.0)
    U_cal = nwft_matrix(system)
    nwft_inv = norm_1(inverse_matrix(U_cal, "𝒰"))
    U_inv = norm_1(inverse_matrix(U, "U"))
    m12 = norm_1(M12) if M12.size else 0.0

    def _ratio(x2):
        denom = 1.0 - c.x1 * x2
        return c.x1 / denom if denom > 0 else math.inf

    return MatrixDiagnostics(
        nwft_inv_norm=nwft_inv, nwft_inv_bound=_ratio(c.x2),
        alias_gap_norm=norm_1(U - U_cal), alias_gap_bound=c.x3,
        U_inv_norm=U_inv, U_inv_bound=_ratio(c.x2 + c.x3),
        M12_norm=m12, M12_bound=(inputs.zeta + 1) * (c.x2_m12 + c.y2),
        M_inv_norm=m_inv_norm, M_inv_block_bound=max(1.0, (1.0 + m12) * U_inv))


@dataclass(frozen=True)
class ErrorReport:
    """误差报告：‖ΔV‖_e、ε₀、ε₁、ε₂、容许性与中间常数"""

    deltaV_e: float
    eps0: float
    eps1: float
    eps2: float
    x1: float
    x2: float
    x3: float
    y2: float
    b_max: float
    admissible_full: bool
    admissible_weak: bool
    notes: tuple = ()
    x2_m12: float = 0.0
    thresholds: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("deltaV_e", "eps0", "eps1", "eps2", "x1", "x2", "x3", "y2", "b_max"):
            value = getattr(self, name)
            if value is None:
                continue
            if not (math.isfinite(value) and value >= 0):
                raise ValidationError(f"{name}={value!r} 必须是非负有限数", field=name)

    @property
    def ordered(self):
        """ε₀ < ε₁ < ε₂ 是否成立（缺项时为 None）"""
        if None in (self.eps0, self.eps1, self.eps2):
            return None
        return self.eps0 < self.eps1 < self.eps2

    def as_dict(self):
        data = asdict(self)
        data["notes"] = list(self.notes)
        data["ordered"] = self.ordered
        return data


def assemble_report(result, eps0=None, sharpened=False):
    """由一次求解结果组装 ErrorReport

    Args:
        result: ApproximationResult
        eps0: 已估计的 ε₀，可为 None
        sharpened: ε₂ 是否使用锐化 x1

    Raises:
        InadmissibleParametersError: ε₂ 的公式不适用
        NumericalFailureError: M 奇异
    """
    inputs = BoundInputs.from_result(result)
    admissible = check_admissibility(inputs)
    constants = x_constants(inputs, sharpened=sharpened)
    eps1 = epsilon1(result.system, result.exponents, inputs.b_max)
    eps2 = epsilon2(inputs, constants)
    notes = list(result.notes)
    if inputs.b_max_source != "solved":
        notes.append("b_max 使用 max|a_ℓ| 代替")
    report = ErrorReport(
        deltaV_e=inputs.deltaV_e, eps0=eps0, eps1=eps1, eps2=eps2,
        x1=constants.x1, x2=constants.x2, x3=constants.x3, y2=constants.y2,
        b_max=inputs.b_max, admissible_full=admissible.full, admissible_weak=admissible.weak,
        notes=tuple(notes), x2_m12=constants.x2_m12, thresholds=admissible.details)
    if admissible.full and admissible.weak and report.ordered is False:
        logger.warning("容许参数下 ε₀ < ε₁ < ε₂ 不成立: %.4e, %.4e, %.4e", eps0, eps1, eps2)
    return report
