#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
参考表控制器 - 处理 verify-table 命令
"""

import logging

from services.fixtures import verify_table
from utils.settings import DEFAULT_SETTINGS
from views.report_view import table_check_payload

logger = logging.getLogger(__name__)

CHECK_HEADER = ("fixture", "L", "column", "expected", "computed", "rel_error", "status")


class TableController:
    """复算随仓库发布的误差表"""

    def __init__(self, settings=DEFAULT_SETTINGS):
        self.settings = settings

    def verify(self, table):
        """
        Returns:
            (TableCheck, payload)
        """
        check = verify_table(table, self.settings)
        if not check.passed:
            for row, cell in check.failures:
                logger.warning("%s L=%s 列 %s: 参考 %.5g，复算 %.5g", table, row.L, cell.column,
                               cell.expected, cell.computed)
        return check, table_check_payload(check)

    @staticmethod
    def csv_rows(check):
        for r in check.rows:
            for c in r.cells:
                yield (r.fixture, "x".join(map(str, r.L)), c.column, c.expected, c.computed,
                       c.rel_error, c.status)
