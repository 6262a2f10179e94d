#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
拟周期函数周期逼近工具 - 命令行入口
"""

import argparse
import sys
from dataclasses import replace

from controllers.app_controller import AppController
from utils.logging_setup import configure_logging
from utils.settings import Settings


def _add_grid_options(parser):
    parser.add_argument("file", help="JSON 问题文件")
    parser.add_argument("--L", help="周期向量，如 13860 或 15,41,15（覆盖文件中的 L）")
    parser.add_argument("--G", help="网格节点数向量（覆盖 G 规则）")
    parser.add_argument("--G-rule", dest="G_rule", help="G 规则，如 10L、2Lmax+10")
    parser.add_argument("--eta", type=int, help="Hanning 窗阶数")
    parser.add_argument("--layout", choices=["trailing", "leading", "centered"], help="DFT 节点布局")
    parser.add_argument("--sharpened-x1", dest="sharpened_x1", action="store_true",
                        help="ε₂ 使用按行锐化的 x1")


def _add_range_options(parser):
    parser.add_argument("file", help="JSON 问题文件")
    parser.add_argument("--dim", type=int, default=0, help="列下标 j（从 0 开始）")
    parser.add_argument("--range", required=True, help="L 的区间，如 (20,14000] 或 [1,100]")


def build_parser():
    """构造命令行解析器"""
    parser = argparse.ArgumentParser(prog="qpa", description="拟周期三角多项式的周期逼近与误差界")
    parser.add_argument("--log-level", dest="log_level", help="日志级别（默认取 QPA_LOG_LEVEL 或 WARNING）")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("approximate", help="求周期逼近并报告 ε₀、ε₁、ε₂")
    _add_grid_options(p)
    p.add_argument("--sup-grid", dest="sup_grid", help="ε₀ 每维采样区间数，如 2000 或 80,80,80")
    p.add_argument("--diagnostics", action="store_true", help="附带矩阵范数与理论界对照")
    p.add_argument("--json", action="store_true", help="输出 JSON")
    p.add_argument("--csv", help="把指数与系数写入 CSV 文件")

    p = sub.add_parser("bounds", help="只计算容许性、x 常数与 ε₂")
    _add_grid_options(p)
    p.add_argument("--json", action="store_true", help="输出 JSON")

    p = sub.add_parser("scan", help="逐个 L 输出 e(L) 与记录标记（CSV）")
    _add_range_options(p)
    p.add_argument("--csv", help="CSV 输出路径，缺省写到标准输出")

    p = sub.add_parser("best-seq", help="最佳同时逼近序列")
    _add_range_options(p)
    p.add_argument("--json", action="store_true", help="输出 JSON")
    p.add_argument("--csv", help="CSV 输出路径")

    p = sub.add_parser("verify-table", aliases=["verify-paper"], help="复算随附的误差表")
    p.add_argument("table", choices=["t1", "t2"], help="t1: 一维算例；t2: 三维算例")
    p.add_argument("--json", action="store_true", help="输出 JSON")
    p.add_argument("--csv", help="差异表 CSV 输出路径")
    return parser


def main(argv=None):
    """程序入口函数"""
    args = build_parser().parse_args(argv)
    settings = Settings.from_env()
    if args.log_level:
        settings = replace(settings, log_level=args.log_level)
    configure_logging(settings.log_level)
    return AppController(settings).run(args)


if __name__ == "__main__":
    sys.exit(main())
