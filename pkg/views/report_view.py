#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
报表视图 - 把计算结果渲染为文本表格、JSON 与 CSV

文本表格保留 5 位有效数字；JSON 与 CSV 保留全精度。
两种输出都由同一个 payload 字典生成。
"""

import csv
import json
import math

import numpy as np

from utils.settings import DEFAULT_SETTINGS


def fmt(value, digits=DEFAULT_SETTINGS.table_digits):
    """按有效数字的科学计数法格式化；None 显示为 '-'"""
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "是" if value else "否"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if not math.isfinite(value):
        return str(value)
    return f"{value:.{digits - 1}e}"


def _complex(z):
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def _fmt_complex(z, digits):
    z = complex(z)
    sign = "-" if z.imag < 0 else "+"
    return f"{fmt(z.real, digits)} {sign} {fmt(abs(z.imag), digits)}i"


def _table(header, rows):
    """等宽文本表格"""
    cells = [list(map(str, header))] + [list(map(str, r)) for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(header))]
    lines = []
    for k, row in enumerate(cells):
        lines.append("  ".join(c.rjust(w) for c, w in zip(row, widths)))
        if k == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)


def approximation_payload(result, report, sup=None):
    """approximate 命令的机器可读结果（全精度）"""
    payload = {
        "L": list(result.grid.L),
        "G": list(result.grid.G),
        "eta": result.grid.eta,
        "layout": result.grid.layout.value,
        "exponents": [
            {
                "lattice": result.spec.lattice[i].tolist(),
                "lambda": result.spec.exponents[i].tolist(),
                "h": result.approximant.exponents[i].tolist(),
                "a": _complex(result.y[i]),
                "b": _complex(result.y_p[i]),
            }
            for i in range(result.spec.size)
        ],
        "zeta": result.exponents.zeta,
        "d_m": result.exponents.d_m,
        "d_M": result.exponents.d_M,
        "report": report.as_dict(),
    }
    if sup is not None:
        payload["sup"] = {
            "value": sup.value,
            "argmax": list(sup.argmax),
            "grid_max": sup.grid_max,
            "n_per_dim": list(sup.n_per_dim),
        }
    return payload


def render_approximation(payload, digits=DEFAULT_SETTINGS.table_digits):
    """approximate 命令的文本输出"""
    lines = [f"L = {payload['L']}   G = {payload['G']}   η = {payload['eta']}   节点布局 = {payload['layout']}",
             f"ζ = {payload['zeta']}   d_m = {payload['d_m']}   d_M = {payload['d_M']}", ""]
    rows = []
    for i, e in enumerate(payload["exponents"]):
        rows.append([i, e["lattice"], [round(v, 6) for v in e["lambda"]], e["h"],
                     _fmt_complex(complex(e["a"]["re"], e["a"]["im"]), digits),
                     _fmt_complex(complex(e["b"]["re"], e["b"]["im"]), digits)])
    lines.append(_table(["ℓ", "k", "λ", "h", "a", "b"], rows))
    lines.append("")
    lines.append(render_report(payload["report"], digits))
    if "sup" in payload:
        sup = payload["sup"]
        lines.append(f"ε₀ 取得于 x = {[fmt(v, digits) for v in sup['argmax']]}，"
                     f"网格 {sup['n_per_dim']}，网格最大值 {fmt(sup['grid_max'], digits)}")
    return "\n".join(lines)


def render_report(report, digits=DEFAULT_SETTINGS.table_digits):
    """ErrorReport 字典的文本输出"""
    rows = [[name, fmt(report[key], digits)] for name, key in (
        ("‖ΔV‖_e", "deltaV_e"), ("ε₀", "eps0"), ("ε₁", "eps1"), ("ε₂", "eps2"),
        ("x1", "x1"), ("x2", "x2"), ("x3", "x3"), ("y2", "y2"), ("b_max", "b_max"))]
    rows.append(["完全容许", fmt(report["admissible_full"])])
    rows.append(["弱化容许", fmt(report["admissible_weak"])])
    if report.get("ordered") is not None:
        rows.append(["ε₀<ε₁<ε₂", fmt(report["ordered"])])
    lines = [_table(["量", "值"], rows)]
    th = report.get("thresholds") or {}
    if th:
        lines.append(f"弱化条件: L_min > {fmt(th['L_weak'], digits)}, G_min > {fmt(th['G_weak'], digits)}；"
                     f"完全条件: L_min > {fmt(th['L_full'], digits)}, G_min > {fmt(th['G_full'], digits)}")
    for note in report.get("notes", []):
        lines.append(f"注: {note}")
    return "\n".join(lines)


def bounds_payload(inputs, constants, eps2, admissibility):
    return {
        "L_min": inputs.L_min,
        "L_max": inputs.L_max,
        "G_min": inputs.G_min,
        "D": inputs.D,
        "zeta": inputs.zeta,
        "d_m": inputs.d_m,
        "d_M": inputs.d_M,
        "deltaV_e": inputs.deltaV_e,
        "b_max": inputs.b_max,
        "b_max_source": inputs.b_max_source,
        "x1": constants.x1,
        "x1_generic": constants.x1_generic,
        "x1_sharpened": constants.x1_sharpened,
        "x2": constants.x2,
        "x2_m12": constants.x2_m12,
        "x3": constants.x3,
        "y2": constants.y2,
        "eps2": eps2,
        "admissible_full": admissibility.full,
        "admissible_weak": admissibility.weak,
        "thresholds": admissibility.details,
    }


def render_bounds(payload, digits=DEFAULT_SETTINGS.table_digits):
    keys = ("deltaV_e", "b_max", "x1", "x1_generic", "x1_sharpened", "x2", "x2_m12", "x3", "y2", "eps2")
    rows = [[k, fmt(payload[k], digits)] for k in keys]
    rows.append(["b_max 来源", payload["b_max_source"]])
    rows.append(["完全容许", fmt(payload["admissible_full"])])
    rows.append(["弱化容许", fmt(payload["admissible_weak"])])
    th = payload["thresholds"]
    rows.append(["L_min 弱化阈值", fmt(th["L_weak"], digits)])
    rows.append(["G_min 弱化阈值", fmt(th["G_weak"], digits)])
    rows.append(["L_min 完全阈值", fmt(th["L_full"], digits)])
    rows.append(["G_min 完全阈值", fmt(th["G_full"], digits)])
    head = (f"L_min = {payload['L_min']}  L_max = {payload['L_max']}  G_min = {payload['G_min']}  "
            f"D = {payload['D']}  ζ = {payload['zeta']}  d_m = {payload['d_m']}  d_M = {payload['d_M']}")
    return head + "\n" + _table(["量", "值"], rows)


def render_best_sequence(payload, digits=DEFAULT_SETTINGS.table_digits):
    """最佳同时逼近序列与 Dirichlet 界对照"""
    rows = []
    for k, item in enumerate(payload["entries"], start=1):
        rows.append([k, item["t"], fmt(item["e"], digits), fmt(item["dirichlet"], digits),
                     fmt(item["root"], digits), fmt(item["log_rate"], digits)])
    lo, hi = payload["range"]
    lines = [f"第 {payload['dim']} 维，区间 [{lo}, {hi}]",
             _table(["k", "t_k", "e(t_k)", "Dirichlet", "t_k^(1/k)", "ln(t_k)/k"], rows)]
    if payload["slope"] is not None:
        lines.append(f"log e 对 log t 的斜率: {fmt(payload['slope'], digits)}")
    return "\n".join(lines)


def best_sequence_payload(sequence, dirichlet, growth, slope):
    return {
        "dim": sequence.dim_index,
        "range": [sequence.search_start, sequence.search_limit],
        "entries": [{"t": t, "e": e, "dirichlet": b, **{k: g[k] for k in ("root", "log_rate")}}
                    for (t, e), b, g in zip(sequence.entries, dirichlet, growth)],
        "slope": slope,
    }


def render_scan_summary(count, records, digits=DEFAULT_SETTINGS.table_digits):
    rows = [[t, fmt(e, digits)] for t, e in records]
    return f"扫描 {count} 个 L，记录 {len(records)} 个\n" + _table(["L", "e(L)"], rows)


def write_csv(path_or_file, header, rows):
    """写 CSV：逗号分隔、表头一行、LF 换行，浮点数用最短往返表示

    Args:
        path_or_file: 路径或已打开的文本文件对象
    """
    def _cell(v):
        if isinstance(v, (bool, np.bool_)):
            return "1" if v else "0"
        if isinstance(v, (float, np.floating)):
            return repr(float(v))
        return str(v)

    if hasattr(path_or_file, "write"):
        writer = csv.writer(path_or_file, lineterminator="\n")
        writer.writerow(header)
        writer.writerows([_cell(v) for v in row] for row in rows)
        return
    with open(path_or_file, "w", encoding="utf-8", newline="") as f:
        write_csv(f, header, rows)


def table_check_payload(check):
    return {
        "table": check.table,
        "passed": check.passed,
        "rows": [
            {
                "fixture": r.fixture,
                "L": list(r.L),
                "passed": r.passed,
                "cells": [
                    {"column": c.column, "expected": c.expected, "computed": c.computed,
                     "rel_error": c.rel_error, "tolerance": c.tolerance, "status": c.status,
                     "waived": c.waived}
                    for c in r.cells
                ],
            }
            for r in check.rows
        ],
    }


def render_table_check(check, digits=DEFAULT_SETTINGS.table_digits):
    """参考表比对的差异表"""
    rows = []
    waivers = []
    for r in check.rows:
        for c in r.cells:
            rows.append([r.fixture, list(r.L), c.column, fmt(c.expected, digits), fmt(c.computed, digits),
                         f"{c.rel_error:.2%}", c.tolerance, c.status])
            if c.waived:
                waivers.append(f"{r.L} {c.column}: {c.waived}")
    lines = [_table(["算例", "L", "列", "参考值", "复算值", "相对误差", "容差", "结果"], rows)]
    for w in waivers:
        lines.append(f"已知偏差 {w}")
    lines.append(f"{check.table}: {'全部通过' if check.passed else '存在未通过的格子'}")
    return "\n".join(lines)


def render_json(payload):
    return json.dumps(payload, ensure_ascii=False, indent=2, default=_json_default)


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, complex):
        return _complex(obj)
    raise TypeError(f"无法序列化 {type(obj).__name__}")
