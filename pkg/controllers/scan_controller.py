#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
扫描控制器 - 处理 scan 与 best-seq 命令
"""

import logging
import sys

from models.diophantine import (best_sequence, decay_slope, dirichlet_bound, growth_diagnostics,
                                iter_scan)
from models.errors import ValidationError
from models.exponents import count_distinct_mod1, integer_mask
from utils.settings import DEFAULT_SETTINGS
from views.report_view import best_sequence_payload, write_csv

logger = logging.getLogger(__name__)

SCAN_HEADER = ("L", "e", "is_record")


def exponent_column(spec, dim):
    """第 dim 列的指数；有理标注以 Fraction 给出

    Raises:
        ValidationError: dim 越界
    """
    if not 0 <= dim < spec.dim:
        raise ValidationError(f"维度下标 {dim} 超出 [0, {spec.dim - 1}]", field="dim")
    column = []
    for i in range(spec.size):
        mark = spec.mark(i, dim)
        column.append(mark if mark is not None else float(spec.exponents[i, dim]))
    return column


class ScanController:
    """扫描控制器类"""

    def __init__(self, settings=DEFAULT_SETTINGS):
        self.settings = settings

    def scan(self, problem, dim, L_min, L_max, out=None):
        """逐个 L 写出 (L, e(L), is_record) 的 CSV

        Args:
            out: 路径或文本文件对象，默认标准输出

        Returns:
            (扫描个数, [(L, e) 记录])
        """
        column = exponent_column(problem.spec, dim)
        records = []
        counter = [0]

        def rows():
            for Ls, e, is_record in iter_scan(column, L_min, L_max, self.settings):
                counter[0] += len(Ls)
                for L, err, rec in zip(Ls.tolist(), e.tolist(), is_record.tolist()):
                    if rec:
                        records.append((L, err))
                    yield L, err, rec

        write_csv(out if out is not None else sys.stdout, SCAN_HEADER, rows())
        return counter[0], records

    def best_sequence(self, problem, dim, L_min, L_max):
        """最佳同时逼近序列，附 Dirichlet 界、增长率与衰减斜率"""
        column = exponent_column(problem.spec, dim)
        seq = best_sequence(column, L_min, L_max, dim_index=dim, settings=self.settings)
        floats = [float(v) for v in column if not hasattr(v, "denominator")]
        irrational = [v for v in floats if not integer_mask(v, self.settings.int_eps)]
        s = max(count_distinct_mod1(irrational, self.settings.dist_eps), 1)
        dirichlet = [dirichlet_bound(s, t) for t in seq.ts]
        growth = growth_diagnostics(seq.ts)
        try:
            slope = decay_slope(seq.ts, seq.errors)
        except ValidationError:
            slope = None
        return best_sequence_payload(seq, dirichlet, growth, slope)
