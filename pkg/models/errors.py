#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
异常层级 - 逼近计算中所有可预期的失败类型
"""


class ApproximationError(Exception):
    """所有领域异常的基类"""


class ValidationError(ApproximationError, ValueError):
    """输入数据不满足约束

    Args:
        message: 错误描述
        field: 出错字段（问题文件中的键或参数名），可为None
    """

    def __init__(self, message, field=None):
        self.field = field
        if field:
            message = f"{field}: {message}"
        super().__init__(message)


class GridError(ValidationError, IndexError):
    """离散网格不合法，或指数落在 K_G 之外"""


class InadmissibleParametersError(ApproximationError):
    """误差界公式不适用（分母非正、x1(x2+x3) >= 1 等）

    Args:
        message: 错误描述
        condition: 未满足的不等式文本
    """

    def __init__(self, message, condition=None):
        self.condition = condition
        if condition:
            message = f"{message} [不满足: {condition}]"
        super().__init__(message)


class NumericalFailureError(ApproximationError, ArithmeticError):
    """矩阵在工作精度下奇异"""


# 命令行退出码
EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_INADMISSIBLE = 2
EXIT_NUMERICAL = 3


def exit_code_for(error):
    """根据异常类型给出命令行退出码

    Args:
        error: 捕获的异常

    Returns:
        int: 退出码
    """
    if isinstance(error, InadmissibleParametersError):
        return EXIT_INADMISSIBLE
    if isinstance(error, NumericalFailureError):
        return EXIT_NUMERICAL
    return EXIT_VALIDATION
