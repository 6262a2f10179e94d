#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
随仓库发布的算例与误差表参考值，以及逐格复算比对
"""

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

from models.errors import ValidationError
from services.approximation import SupSamplingPolicy, approximate, sup_error
from services.bounds import assemble_report
from utils.problem_parser import load_problem
from utils.settings import DEFAULT_SETTINGS

logger = logging.getLogger(__name__)

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "fixtures"

EXAMPLE_1 = "example1"
EXAMPLE_2_CASE_1 = "example2_case1"
EXAMPLE_2_CASE_2 = "example2_case2"
RATIONAL_ONLY = "rational_only"
GOLDEN = "golden"


@lru_cache(maxsize=None)
def load_fixture(name):
    """按名称读取 fixtures/ 下的问题文件

    Raises:
        ValidationError: 文件不存在或内容非法
    """
    path = FIXTURE_DIR / f"{name}.json"
    if not path.is_file():
        raise ValidationError(f"找不到算例文件 {path}", field="fixture")
    return load_problem(path)


@dataclass(frozen=True)
class ReferenceRow:
    """误差表中的一行"""

    fixture: str
    L: tuple
    deltaV_e: float
    eps0: float
    eps1: float
    eps2: float


# 一维算例：G = 10L, η = 1
TABLE_1 = (
    ReferenceRow(EXAMPLE_1, (29,), 4.8773e-2, 2.7689e-2, 9.2404e-2, 3.2843e-1),
    ReferenceRow(EXAMPLE_1, (70,), 2.0203e-2, 1.1549e-2, 3.8271e-2, 1.2979e-1),
    ReferenceRow(EXAMPLE_1, (169,), 8.3682e-3, 4.7935e-3, 1.5852e-2, 5.3200e-2),
    ReferenceRow(EXAMPLE_1, (408,), 3.4662e-3, 1.9877e-3, 6.5662e-3, 2.1948e-2),
    ReferenceRow(EXAMPLE_1, (985,), 1.4357e-3, 8.2512e-4, 2.7198e-3, 9.0765e-3),
    ReferenceRow(EXAMPLE_1, (2378,), 5.9471e-4, 3.4217e-4, 1.1266e-3, 3.7571e-3),
    ReferenceRow(EXAMPLE_1, (5741,), 2.4634e-4, 1.4180e-4, 4.6665e-4, 1.5558e-3),
    ReferenceRow(EXAMPLE_1, (13860,), 1.0201e-4, 5.8747e-5, 1.9329e-4, 6.4436e-4),
)

# 三维算例：G_j = 2L_max + 10, η = 1
TABLE_2 = (
    ReferenceRow(EXAMPLE_2_CASE_1, (7, 17, 7), 1.4517e-1, 2.9179e-1, 3.0510e-1, 7.3318e-1),
    ReferenceRow(EXAMPLE_2_CASE_1, (15, 41, 15), 2.7860e-2, 5.7767e-2, 5.8709e-2, 1.2095e-1),
    ReferenceRow(EXAMPLE_2_CASE_1, (97, 99, 97), 1.2500e-2, 2.6158e-2, 2.6342e-2, 5.3508e-2),
    ReferenceRow(EXAMPLE_2_CASE_1, (209, 239, 209), 2.8605e-3, 6.0135e-3, 6.0284e-3, 1.2147e-2),
    ReferenceRow(EXAMPLE_2_CASE_2, (25, 41, 15), 5.2435e-2, 4.6980e-2, 1.1050e-1, 3.1908e-1),
    ReferenceRow(EXAMPLE_2_CASE_2, (34, 99, 97), 1.9077e-2, 1.9775e-2, 4.0205e-2, 1.0976e-1),
    ReferenceRow(EXAMPLE_2_CASE_2, (127, 99, 209), 9.7943e-3, 6.0208e-3, 1.9171e-2, 5.6053e-2),
)

TABLES = {"t1": TABLE_1, "t2": TABLE_2}

# 列容差：deltaV_e 按 4 位有效数字比较，其余为相对误差
TOLERANCES = {
    "t1": {"eps0": 0.02, "eps1": 0.01, "eps2": 0.01},
    "t2": {"eps0": 0.05, "eps1": 0.01, "eps2": 0.01},
}


@dataclass(frozen=True)
class KnownDeviation:
    """已知与参考值不一致的格子

    measured 为本实现的实测值；给出时只有复算值落在 measured 的 band 相对范围内才豁免，
    复算结果一旦漂移仍按失败报告。
    """

    note: str
    measured: float = None
    band: float = 0.01

    def covers(self, computed):
        if self.measured is None:
            return True
        return abs(computed - self.measured) <= self.band * abs(self.measured)


# (表, L, 列) -> KnownDeviation
KNOWN_DEVIATIONS = {
    ("t1", (29,), "eps0"): KnownDeviation(
        "Ω=[0,29] 上 400001 点稠密采样的最大值为 2.6441e-2，比参考值低 4.5%", measured=2.6441e-2),
    ("t1", (70,), "eps0"): KnownDeviation(
        "Ω=[0,70] 上 400001 点稠密采样的最大值为 1.1268e-2，比参考值低 2.4%", measured=1.1268e-2),
    ("t1", (29,), "eps2"): KnownDeviation(
        "参考值低于按公式组装的 ε₂（约 0.586）；小 L 时 x1(x2+x3) 不可忽略"),
    ("t2", (127, 99, 209), "eps0"): KnownDeviation(
        "复算 8.3662e-3，比参考值高 39%；换成 L 的其它排列时 ‖ΔV‖_e ≥ 0.199，可排除维序混淆", measured=8.3662e-3),
    ("t2", (127, 99, 209), "eps1"): KnownDeviation(
        "复算 1.9671e-2，比参考值高 2.6%；ΔV_e 与 ε₂ 在容差内", measured=1.9671e-2),
}

COLUMNS = ("deltaV_e", "eps0", "eps1", "eps2")


def same_significant_digits(computed, expected, digits=4):
    """两数按给定有效数字四舍五入后是否相同"""
    if expected == 0:
        return computed == 0
    fmt = f"{{:.{digits - 1}e}}"
    if fmt.format(computed) == fmt.format(expected):
        return True
    # 参考值本身多给了一位，允许最后一位的半个单位
    return abs(computed - expected) <= 0.5 * 10 ** (math.floor(math.log10(abs(expected))) - digits)


@dataclass(frozen=True)
class CellCheck:
    column: str
    expected: float
    computed: float
    tolerance: str
    passed: bool
    waived: str = ""

    @property
    def rel_error(self):
        if self.expected == 0:
            return abs(self.computed)
        return abs(self.computed - self.expected) / abs(self.expected)

    @property
    def status(self):
        if self.passed:
            return "PASS"
        return "WAIVED" if self.waived else "FAIL"


@dataclass(frozen=True)
class RowCheck:
    fixture: str
    L: tuple
    cells: tuple
    notes: tuple = ()

    @property
    def passed(self):
        return all(c.passed or c.waived for c in self.cells)


@dataclass(frozen=True)
class TableCheck:
    table: str
    rows: tuple = field(default_factory=tuple)

    @property
    def passed(self):
        return all(r.passed for r in self.rows)

    @property
    def failures(self):
        return [(r, c) for r in self.rows for c in r.cells if c.status == "FAIL"]


def compute_row(row, settings=DEFAULT_SETTINGS):
    """复算一行：周期逼近、ε₀ 采样、误差界（锐化 x1）

    Returns:
        (ApproximationResult, ErrorReport)
    """
    problem = load_fixture(row.fixture)
    grid = problem.grid(L=row.L)
    result = approximate(problem.spec, grid, settings)
    policy = SupSamplingPolicy.from_settings(settings, **problem.sup_sampling)
    eps0 = sup_error(problem.spec, result.approximant, policy).value
    report = assemble_report(result, eps0=eps0, sharpened=True)
    return result, report


def _waiver(table, L, column, computed):
    deviation = KNOWN_DEVIATIONS.get((table, tuple(L), column))
    if deviation is None:
        return ""
    if not deviation.covers(computed):
        logger.warning("%s L=%s %s: 复算值 %.5g 偏离已记录的 %.5g，不再豁免",
                       table, L, column, computed, deviation.measured)
        return ""
    logger.warning("%s L=%s %s 已豁免: %s", table, L, column, deviation.note)
    return deviation.note


def check_row(table, row, settings=DEFAULT_SETTINGS):
    _, report = compute_row(row, settings)
    tolerances = TOLERANCES[table]
    cells = []
    for column in COLUMNS:
        expected = getattr(row, column)
        computed = getattr(report, column)
        if column == "deltaV_e":
            ok = same_significant_digits(computed, expected, 4)
            tol_text = "4 位有效数字"
        else:
            tol = tolerances[column]
            ok = abs(computed - expected) <= tol * abs(expected)
            tol_text = f"{tol:.0%}"
        waived = "" if ok else _waiver(table, row.L, column, computed)
        cells.append(CellCheck(column, expected, computed, tol_text, ok, waived))
    return RowCheck(fixture=row.fixture, L=tuple(row.L), cells=tuple(cells), notes=report.notes)


def verify_table(table, settings=DEFAULT_SETTINGS):
    """逐格复算误差表

    Args:
        table: 't1' 或 't2'

    Returns:
        TableCheck
    """
    if table not in TABLES:
        raise ValidationError(f"未知的表 {table!r}，可选 {sorted(TABLES)}", field="table")
    rows = []
    for row in TABLES[table]:
        check = check_row(table, row, settings)
        logger.info("%s L=%s: %s", table, row.L, "通过" if check.passed else "未通过")
        rows.append(check)
    return TableCheck(table=table, rows=tuple(rows))
