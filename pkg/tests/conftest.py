#!/usr/bin/env python
# -*- coding: utf-8 -*-

import os
import sys

_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, _ROOT)

import math

import pytest

from services.fixtures import (EXAMPLE_1, EXAMPLE_2_CASE_1, EXAMPLE_2_CASE_2, FIXTURE_DIR, GOLDEN,
                               RATIONAL_ONLY, load_fixture)

SQRT2 = math.sqrt(2.0)


@pytest.fixture
def example1():
    return load_fixture(EXAMPLE_1)


@pytest.fixture
def example2_case1():
    return load_fixture(EXAMPLE_2_CASE_1)


@pytest.fixture
def example2_case2():
    return load_fixture(EXAMPLE_2_CASE_2)


@pytest.fixture
def rational_only():
    return load_fixture(RATIONAL_ONLY)


@pytest.fixture
def golden():
    return load_fixture(GOLDEN)


@pytest.fixture
def fixture_path():
    def _path(name):
        return str(FIXTURE_DIR / f"{name}.json")
    return _path
