#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
问题文件与命令行参数解析 - JSON 问题文件，加上几种小语言：
G 规则（10L、2Lmax+10）、扫描区间（(20,14000]）、向量（7,17,7）与实数表达式（sqrt(2)/2）
"""

import json
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

from lark import Lark, Transformer, v_args
from lark.exceptions import LarkError

from models.errors import ValidationError
from models.quasiperiodic import PeriodGrid, QuasiperiodicSpec
from models.window import DEFAULT_LAYOUT, NodeLayout
from services.approximation import NAMED_GRID_RULES, GridRule

logger = logging.getLogger(__name__)

# G 规则：[a[*]](L|Lmax)[(+|-)b]
GRID_RULE_GRAMMAR = r"""
    start: [scale] base [offset]

    scale: INT ["*"]
    base: LMAX | LSINGLE
    offset: SIGN INT

    LMAX: "Lmax"
    LSINGLE: "L"
    SIGN: "+" | "-"

    %import common.INT
    %import common.WS_INLINE
    %ignore WS_INLINE
"""

# 整数区间，端点开闭由括号决定
RANGE_GRAMMAR = r"""
    start: LEFT SIGNED_INT "," SIGNED_INT RIGHT

    LEFT: "(" | "["
    RIGHT: ")" | "]"

    %import common.SIGNED_INT
    %import common.WS_INLINE
    %ignore WS_INLINE
"""

VECTOR_GRAMMAR = r"""
    start: SIGNED_NUMBER ("," SIGNED_NUMBER)*

    %import common.SIGNED_NUMBER
    %import common.WS_INLINE
    %ignore WS_INLINE
"""

# 问题文件中的实数表达式
EXPRESSION_GRAMMAR = r"""
    ?start: sum

    ?sum: product
        | sum "+" product   -> add
        | sum "-" product   -> sub

    ?product: unary
        | product "*" unary -> mul
        | product "/" unary -> div

    ?unary: atom
        | "-" unary         -> neg
        | "+" unary

    ?atom: NUMBER           -> number
        | "pi"              -> pi
        | "sqrt" "(" sum ")" -> sqrt
        | "(" sum ")"

    %import common.NUMBER
    %import common.WS_INLINE
    %ignore WS_INLINE
"""


class GridRuleTransformer(Transformer):
    """G 规则转换器"""

    def start(self, children):
        scale, offset, use_max = 1, 0, False
        for child in children:
            if isinstance(child, tuple):
                kind, value = child
                if kind == "scale":
                    scale = value
                else:
                    offset = value
            elif isinstance(child, bool):
                use_max = child
        return GridRule(scale=scale, offset=offset, use_max=use_max)

    @v_args(inline=True)
    def scale(self, token):
        return ("scale", int(token))

    @v_args(inline=True)
    def base(self, token):
        return token.type == "LMAX"

    @v_args(inline=True)
    def offset(self, sign, token):
        value = int(token)
        return ("offset", -value if str(sign) == "-" else value)


class RangeTransformer(Transformer):
    """区间转换器，返回闭区间 (lo, hi)"""

    @v_args(inline=True)
    def start(self, left, lo, hi, right):
        lo, hi = int(lo), int(hi)
        if str(left) == "(":
            lo += 1
        if str(right) == ")":
            hi -= 1
        return lo, hi


class VectorTransformer(Transformer):
    def start(self, tokens):
        return [float(t) for t in tokens]


@v_args(inline=True)
class ExpressionTransformer(Transformer):
    """实数表达式求值"""

    def number(self, token):
        return float(token)

    def pi(self):
        return math.pi

    def sqrt(self, value):
        if value < 0:
            raise ValueError(f"sqrt 的参数为负: {value}")
        return math.sqrt(value)

    def neg(self, value):
        return -value

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def div(self, a, b):
        return a / b


@lru_cache(maxsize=None)
def _parser(name):
    grammars = {
        "grid_rule": GRID_RULE_GRAMMAR,
        "range": RANGE_GRAMMAR,
        "vector": VECTOR_GRAMMAR,
        "expression": EXPRESSION_GRAMMAR,
    }
    return Lark(grammars[name], parser="lalr")


def _parse(name, text, transformer, field_name):
    try:
        tree = _parser(name).parse(str(text).strip())
        return transformer.transform(tree)
    except (LarkError, ValueError, ZeroDivisionError) as e:
        cause = e.orig_exc if hasattr(e, "orig_exc") else e
        raise ValidationError(f"无法解析 {text!r}: {cause}", field=field_name)


def parse_grid_rule(text):
    """解析 G 规则文本，如 '10L'、'2Lmax+10'、'4L-2'

    Returns:
        GridRule
    """
    if text in NAMED_GRID_RULES:
        return NAMED_GRID_RULES[text]
    return _parse("grid_rule", text, GridRuleTransformer(), "G_rule")


def parse_range(text):
    """解析整数区间，如 '(20,14000]' -> (21, 14000)

    Raises:
        ValidationError: 语法错误或区间为空
    """
    lo, hi = _parse("range", text, RangeTransformer(), "range")
    if lo > hi:
        raise ValidationError(f"区间 {text} 为空", field="range")
    return lo, hi


def parse_vector(text, field_name="vector"):
    """解析逗号分隔的实数向量"""
    return _parse("vector", text, VectorTransformer(), field_name)


def parse_int_vector(text, field_name="vector"):
    """解析逗号分隔的整数向量"""
    values = parse_vector(text, field_name)
    if any(v != int(v) for v in values):
        raise ValidationError(f"{text!r} 含非整数分量", field=field_name)
    return tuple(int(v) for v in values)


def parse_real(value, field_name):
    """数字原样返回；字符串按表达式求值"""
    if isinstance(value, bool):
        raise ValidationError("需要实数，收到布尔值", field=field_name)
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        return float(_parse("expression", value, ExpressionTransformer(), field_name))
    raise ValidationError(f"需要实数或表达式，收到 {type(value).__name__}", field=field_name)


def _parse_complex(value, field_name):
    if isinstance(value, dict):
        unknown = set(value) - {"re", "im"}
        if unknown:
            raise ValidationError(f"未知键 {sorted(unknown)}", field=field_name)
        return complex(parse_real(value.get("re", 0.0), field_name + ".re"),
                       parse_real(value.get("im", 0.0), field_name + ".im"))
    if isinstance(value, list) and len(value) == 2:
        return complex(parse_real(value[0], field_name), parse_real(value[1], field_name))
    return complex(parse_real(value, field_name), 0.0)


def _parse_mark(value, field_name):
    if value is None:
        return None
    try:
        if isinstance(value, float):
            return Fraction(value).limit_denominator()
        return Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError):
        raise ValidationError(f"{value!r} 不是有理数", field=field_name)


def _int_list(value, field_name):
    if not isinstance(value, list):
        raise ValidationError("需要整数列表", field=field_name)
    out = []
    for i, item in enumerate(value):
        if isinstance(item, bool) or not isinstance(item, (int, float)) or item != int(item):
            raise ValidationError(f"第 {i} 个分量 {item!r} 不是整数", field=field_name)
        out.append(int(item))
    return tuple(out)


SUP_SAMPLING_KEYS = ("samples_per_oscillation", "min_points", "max_points",
                     "refine_top", "refine_sweeps", "n_per_dim")
PROBLEM_KEYS = {"name", "P", "lattice", "coefficients", "N", "eta", "diophantine", "L", "G",
                "G_rule", "rational_marks", "sup_sampling", "layout"}


@dataclass(frozen=True, eq=False)
class Problem:
    """解析后的问题文件

    L、G 可缺省，由命令行补齐。
    """

    spec: QuasiperiodicSpec
    eta: int = 1
    L: tuple = None
    G: tuple = None
    grid_rule: GridRule = None
    layout: NodeLayout = DEFAULT_LAYOUT
    sup_sampling: dict = field(default_factory=dict)
    name: str = ""

    def grid(self, L=None, G=None, grid_rule=None, eta=None, layout=None):
        """组装 PeriodGrid；命令行参数优先于文件内容

        G 的来源依次为：参数 G、参数 grid_rule、文件 G（仅当 L 未被覆盖）、文件 G_rule。

        Raises:
            ValidationError: 缺少 L 或 G
        """
        L = tuple(L) if L is not None else self.L
        if L is None:
            raise ValidationError("缺少周期 L（问题文件或 --L）", field="L")
        if len(L) != self.spec.dim:
            raise ValidationError(f"L 需要 {self.spec.dim} 个分量，收到 {len(L)}", field="L")
        if G is None:
            if grid_rule is not None:
                G = grid_rule.apply(L)
            elif self.G is not None and (self.L is None or tuple(L) == tuple(self.L)):
                G = self.G
            elif self.grid_rule is not None:
                G = self.grid_rule.apply(L)
            else:
                raise ValidationError("缺少 G 或 G_rule", field="G")
        return PeriodGrid(L=tuple(L), G=tuple(G), eta=eta if eta is not None else self.eta,
                          layout=layout if layout is not None else self.layout)


def _matrix(value, field_name):
    if not isinstance(value, list) or not value:
        raise ValidationError("需要非空矩阵", field=field_name)
    rows = value if isinstance(value[0], list) else [value]
    return [[parse_real(x, f"{field_name}[{i}][{j}]") for j, x in enumerate(row)]
            for i, row in enumerate(rows)]


def problem_from_dict(data, name=""):
    """由已解码的 JSON 对象构造 Problem

    Raises:
        ValidationError: 字段缺失或非法，消息中带字段名
    """
    if not isinstance(data, dict):
        raise ValidationError("问题文件顶层必须是对象")
    unknown = set(data) - PROBLEM_KEYS
    if unknown:
        raise ValidationError(f"未知键 {sorted(unknown)}")
    for key in ("P", "lattice", "coefficients", "N", "diophantine"):
        if key not in data:
            raise ValidationError("缺少必填字段", field=key)

    P = _matrix(data["P"], "P")
    if not isinstance(data["lattice"], list):
        raise ValidationError("需要格向量列表", field="lattice")
    lattice = [_int_list(k, f"lattice[{i}]") for i, k in enumerate(data["lattice"])]
    if not isinstance(data["coefficients"], list):
        raise ValidationError("需要系数列表", field="coefficients")
    coeffs = [_parse_complex(a, f"coefficients[{i}]") for i, a in enumerate(data["coefficients"])]

    dio = data["diophantine"]
    if not isinstance(dio, dict) or "C_a" not in dio or "tau" not in dio:
        raise ValidationError("需要 {C_a, tau}", field="diophantine")

    marks = data.get("rational_marks")
    if marks is not None:
        if not isinstance(marks, list):
            raise ValidationError("需要二维列表", field="rational_marks")
        marks = [None if row is None else
                 [_parse_mark(m, f"rational_marks[{i}][{j}]") for j, m in enumerate(row)]
                 for i, row in enumerate(marks)]

    spec = QuasiperiodicSpec(
        P=P, lattice=lattice, coefficients=coeffs, N=data["N"],
        C_a=parse_real(dio["C_a"], "diophantine.C_a"),
        tau=parse_real(dio["tau"], "diophantine.tau"),
        rational_marks=marks)

    eta = data.get("eta", 1)
    if isinstance(eta, bool) or not isinstance(eta, int) or eta < 1:
        raise ValidationError("需要正整数", field="eta")
    L = _int_list(data["L"], "L") if "L" in data else None
    G = _int_list(data["G"], "G") if "G" in data else None
    rule = parse_grid_rule(data["G_rule"]) if "G_rule" in data else None
    if G is not None and rule is not None:
        raise ValidationError("G 与 G_rule 只能给出一个", field="G")

    sup = data.get("sup_sampling") or {}
    if not isinstance(sup, dict) or set(sup) - set(SUP_SAMPLING_KEYS):
        raise ValidationError(f"只允许键 {list(SUP_SAMPLING_KEYS)}", field="sup_sampling")

    layout = NodeLayout.parse(data.get("layout", DEFAULT_LAYOUT))
    problem = Problem(spec=spec, eta=eta, L=L, G=G, grid_rule=rule, layout=layout,
                      sup_sampling=dict(sup), name=str(data.get("name", name)))
    if L is not None and (G is not None or rule is not None):
        # 文件自带完整网格时立即校验
        problem.grid()
    return problem


def parse_problem(text, name=""):
    """解析 JSON 文本

    Raises:
        ValidationError: JSON 语法错误时给出行列号
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValidationError(f"第 {e.lineno} 行第 {e.colno} 列: {e.msg}", field=name or None)
    return problem_from_dict(data, name=name)


def load_problem(path):
    """读取问题文件"""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ValidationError(f"无法读取问题文件: {e}", field=str(path))
    logger.debug("读取问题文件 %s", path)
    return parse_problem(text, name=path.stem)
