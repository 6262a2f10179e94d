#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
数值常量与运行配置

所有阈值集中在 Settings 中；可以通过 QPA_ 前缀的环境变量覆盖，
例如 QPA_INT_EPS=1e-11、QPA_SUP_MAX_POINTS=200000。
"""

import os
from dataclasses import dataclass, fields, replace


ENV_PREFIX = "QPA_"


@dataclass(frozen=True)
class Settings:
    """运行配置"""

    # 整数判定的相对容差：|v - round(v)| < int_eps * max(1, |v|)
    int_eps: float = 1e-12
    # 半整数平局窗口
    tie_eps: float = 1e-9
    # s_j 计数时模 1 约化后的去重容差
    dist_eps: float = 1e-9
    # ε0 采样：每个最短振荡的采样数、每维最少点数、多维总点数上限
    sup_samples_per_oscillation: int = 10
    sup_min_points: int = 1000
    sup_max_points: int = 1_000_000
    # 网格极值附近做局部细化的候选点个数与轮数
    sup_refine_top: int = 16
    sup_refine_sweeps: int = 3
    # 最佳逼近扫描
    scan_max_L: int = 10_000_000
    scan_chunk: int = 200_000
    # 报表有效数字
    table_digits: int = 5
    log_level: str = "WARNING"

    @classmethod
    def from_env(cls, environ=None):
        """从环境变量读取覆盖项

        Args:
            environ: 环境变量映射，默认为 os.environ

        Returns:
            Settings: 配置对象
        """
        environ = os.environ if environ is None else environ
        overrides = {}
        for f in fields(cls):
            raw = environ.get(ENV_PREFIX + f.name.upper())
            if raw is None or raw.strip() == "":
                continue
            kind = type(f.default)
            try:
                overrides[f.name] = kind(float(raw)) if kind is int else kind(raw)
            except ValueError:
                raise ValueError(f"环境变量 {ENV_PREFIX + f.name.upper()} 的值无效: {raw!r}")
        return replace(cls(), **overrides)


DEFAULT_SETTINGS = Settings()
