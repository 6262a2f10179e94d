#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
应用控制器 - 把命令行参数分发给各个子控制器，并把领域异常映射为退出码
"""

import logging
import sys

from controllers.approx_controller import ApproxController
from controllers.table_controller import CHECK_HEADER, TableController
from controllers.scan_controller import ScanController
from models.errors import EXIT_OK, EXIT_VALIDATION, ApproximationError, exit_code_for
from models.window import NodeLayout
from utils.problem_parser import load_problem, parse_grid_rule, parse_int_vector, parse_range
from utils.settings import DEFAULT_SETTINGS
from views.report_view import (render_approximation, render_best_sequence, render_bounds, render_json,
                               render_scan_summary, render_table_check, write_csv)

logger = logging.getLogger(__name__)


class AppController:
    """应用控制器类，负责协调命令的执行与输出"""

    def __init__(self, settings=DEFAULT_SETTINGS, stdout=None, stderr=None):
        self.settings = settings
        self.stdout = stdout or sys.stdout
        self.stderr = stderr or sys.stderr
        self.approx_controller = ApproxController(settings)
        self.scan_controller = ScanController(settings)
        self.table_controller = TableController(settings)
        self._handlers = {
            "approximate": self._handle_approximate,
            "bounds": self._handle_bounds,
            "scan": self._handle_scan,
            "best-seq": self._handle_best_sequence,
            "verify-table": self._handle_verify_table,
            "verify-paper": self._handle_verify_table,
        }

    def run(self, args):
        """执行一条命令

        Args:
            args: argparse 解析结果

        Returns:
            int: 退出码
        """
        handler = self._handlers.get(args.command)
        if handler is None:
            self._print(f"未知命令: {args.command}", err=True)
            return EXIT_VALIDATION
        try:
            return handler(args)
        except ApproximationError as e:
            code = exit_code_for(e)
            logger.debug("命令 %s 失败", args.command, exc_info=True)
            self._print(f"错误: {e}", err=True)
            return code

    def _print(self, text, err=False):
        print(text, file=self.stderr if err else self.stdout)

    def _emit(self, args, payload, text):
        self._print(render_json(payload) if args.json else text)

    def _grid(self, args, problem):
        L = parse_int_vector(args.L, "L") if args.L else None
        G = parse_int_vector(args.G, "G") if args.G else None
        rule = parse_grid_rule(args.G_rule) if args.G_rule else None
        layout = NodeLayout.parse(args.layout) if args.layout else None
        return problem.grid(L=L, G=G, grid_rule=rule, eta=args.eta, layout=layout)

    def _handle_approximate(self, args):
        problem = load_problem(args.file)
        grid = self._grid(args, problem)
        sup_grid = parse_int_vector(args.sup_grid, "sup_grid") if args.sup_grid else None
        payload = self.approx_controller.run_approximation(
            problem, grid, sup_grid=sup_grid, sharpened=args.sharpened_x1, diagnostics=args.diagnostics)
        if args.csv:
            rows = []
            for i, e in enumerate(payload["exponents"]):
                rows.append([i, " ".join(map(str, e["h"])), e["b"]["re"], e["b"]["im"],
                             e["a"]["re"], e["a"]["im"]])
            write_csv(args.csv, ("index", "h", "b_re", "b_im", "a_re", "a_im"), rows)
        self._emit(args, payload, render_approximation(payload, self.settings.table_digits))
        return EXIT_OK

    def _handle_bounds(self, args):
        problem = load_problem(args.file)
        grid = self._grid(args, problem)
        payload = self.approx_controller.run_bounds(problem, grid, sharpened=args.sharpened_x1)
        self._emit(args, payload, render_bounds(payload, self.settings.table_digits))
        return EXIT_OK

    def _handle_scan(self, args):
        problem = load_problem(args.file)
        lo, hi = parse_range(args.range)
        count, records = self.scan_controller.scan(problem, args.dim, lo, hi, out=args.csv or self.stdout)
        if args.csv:
            self._print(render_scan_summary(count, records, self.settings.table_digits))
        return EXIT_OK

    def _handle_best_sequence(self, args):
        problem = load_problem(args.file)
        lo, hi = parse_range(args.range)
        payload = self.scan_controller.best_sequence(problem, args.dim, lo, hi)
        if args.csv:
            write_csv(args.csv, ("t", "e", "dirichlet", "root", "log_rate"),
                      ([x["t"], x["e"], x["dirichlet"], x["root"], x["log_rate"]] for x in payload["entries"]))
        self._emit(args, payload, render_best_sequence(payload, self.settings.table_digits))
        return EXIT_OK

    def _handle_verify_table(self, args):
        check, payload = self.table_controller.verify(args.table)
        if args.csv:
            write_csv(args.csv, CHECK_HEADER, self.table_controller.csv_rows(check))
        self._emit(args, payload, render_table_check(check, self.settings.table_digits))
        return EXIT_OK if check.passed else EXIT_VALIDATION
