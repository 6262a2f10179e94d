#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
逼近控制器 - 处理 approximate 与 bounds 命令
"""

import logging

from models.exponents import classify
from services.approximation import SupSamplingPolicy, approximate, sup_error
from services.bounds import (BoundInputs, assemble_report, check_admissibility, epsilon2,
                             matrix_bound_diagnostics, x_constants)
from utils.settings import DEFAULT_SETTINGS
from views.report_view import approximation_payload, bounds_payload

logger = logging.getLogger(__name__)


class ApproxController:
    """逼近控制器类，组合 services 层完成一次逼近或误差界计算"""

    def __init__(self, settings=DEFAULT_SETTINGS):
        self.settings = settings

    def run_approximation(self, problem, grid, sup_grid=None, sharpened=False, diagnostics=False):
        """周期逼近 + ε₀ 采样 + 误差界

        Args:
            problem: Problem
            grid: PeriodGrid
            sup_grid: 每维采样区间数，覆盖默认策略
            sharpened: ε₂ 是否使用锐化 x1
            diagnostics: 是否附带矩阵范数界对照

        Returns:
            dict: 渲染用的 payload
        """
        spec = problem.spec
        result = approximate(spec, grid, self.settings)
        overrides = dict(problem.sup_sampling)
        if sup_grid is not None:
            overrides["n_per_dim"] = sup_grid
        policy = SupSamplingPolicy.from_settings(self.settings, **overrides)
        sup = sup_error(spec, result.approximant, policy)
        report = assemble_report(result, eps0=sup.value, sharpened=sharpened)
        payload = approximation_payload(result, report, sup)
        if diagnostics:
            inputs = BoundInputs.from_result(result)
            payload["diagnostics"] = matrix_bound_diagnostics(result.system, inputs).as_dict()
        mp_defect, rational_defect = result.system.structure_defects()
        payload["structure"] = {"M_p_minus_I": mp_defect, "rational_columns": rational_defect}
        return payload

    def run_bounds(self, problem, grid, sharpened=False):
        """只计算容许性、x 常数与 ε₂（b_max 以 max|a| 代替，不求解）"""
        exponent_set = classify(problem.spec, grid.L, self.settings)
        inputs = BoundInputs.from_parts(problem.spec, grid, exponent_set)
        logger.warning("bounds 命令未求解 y_p，b_max 使用 max|a_ℓ| = %.6g 代替", inputs.b_max)
        admissibility = check_admissibility(inputs)
        constants = x_constants(inputs, sharpened=sharpened)
        eps2 = epsilon2(inputs, constants)
        return bounds_payload(inputs, constants, eps2, admissibility)
