#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
日志配置 - 入口处调用一次
"""

import logging

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(level="WARNING"):
    """配置根日志器

    Args:
        level: 日志级别名或整数
    """
    if isinstance(level, str):
        level = getattr(logging, level.upper(), logging.WARNING)
    logging.basicConfig(level=level, format=LOG_FORMAT)
    logging.getLogger().setLevel(level)
