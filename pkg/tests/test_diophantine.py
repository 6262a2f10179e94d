#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
列残差 e(L)、最佳同时逼近序列与 Diophantine 检查的测试
"""

from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest

from models.diophantine import (best_sequence, check_diophantine, column_error, decay_slope,
                                delta_v_norm, dirichlet_bound, growth_diagnostics, scan_errors)
from models.errors import ValidationError
from models.exponents import classify
from utils.settings import DEFAULT_SETTINGS

EXAMPLE1_RECORDS = [29, 70, 169, 408, 985, 2378, 5741, 13860]
FIBONACCI = [1, 2, 3, 5, 8, 13, 21, 34, 55, 89]


def _column(fixture, j=0):
    return fixture.spec.exponents[:, j].tolist()


def test_column_error_example1(example1):
    assert column_error(_column(example1), 29) == pytest.approx(0.0487732, rel=1e-5)
    # 整数元素 λ=1 不贡献误差
    assert column_error(_column(example1)[1:], 29) == pytest.approx(column_error(_column(example1), 29))


def test_column_error_matches_classify(example1):
    es = classify(example1.spec, (13860,))
    assert column_error(_column(example1), 13860) == pytest.approx(delta_v_norm(es), rel=1e-9)


def test_column_error_with_fractions():
    assert column_error([Fraction(1, 3)], 4) == pytest.approx(1 / 3)
    assert column_error([Fraction(1, 3)], 3) == 0.0
    with pytest.raises(ValidationError):
        column_error([0.5], 0)


def test_best_sequence_example1(example1):
    seq = best_sequence(_column(example1), 21, 14000)
    assert seq.ts == EXAMPLE1_RECORDS
    assert all(a > b for a, b in zip(seq.errors, seq.errors[1:]))
    assert seq.search_start == 21
    assert seq.search_limit == 14000


def test_best_sequence_golden_ratio(golden):
    seq = best_sequence(_column(golden), 1, 100)
    assert seq.ts == FIBONACCI
    assert len(seq) == len(FIBONACCI)


def test_integer_column_gives_single_record():
    seq = best_sequence([1.0, 2.0, -3.0], 5, 50)
    assert seq.ts == [5]
    assert seq.errors == [0.0]


def test_scan_records_match_best_sequence(example1):
    # 分块边界不影响记录
    settings = replace(DEFAULT_SETTINGS, scan_chunk=97)
    Ls, e, is_record = scan_errors(_column(example1), 21, 3000, settings)
    assert Ls[0] == 21 and Ls[-1] == 3000
    assert len(e) == 2980
    assert Ls[is_record].tolist() == best_sequence(_column(example1), 21, 3000).ts
    assert e[Ls == 29][0] == pytest.approx(0.0487732, rel=1e-5)


def test_decay_slope_is_minus_one(example1):
    seq = best_sequence(_column(example1), 21, 14000)
    assert decay_slope(seq.ts, seq.errors) == pytest.approx(-1.0, abs=0.1)
    with pytest.raises(ValidationError):
        decay_slope([5], [0.1])


def test_dirichlet_bound():
    assert dirichlet_bound(1, 4) == pytest.approx(0.125)
    assert dirichlet_bound(2, 9) == pytest.approx(2 / 3 / 3)
    with pytest.raises(ValidationError):
        dirichlet_bound(0, 4)


def test_best_records_stay_below_dirichlet(example1):
    # 三个无理元素都是 √2 的整系数组合，按单个 √2 的界比较
    seq = best_sequence(_column(example1), 21, 14000)
    for t, e in seq.entries:
        assert e / 4 < dirichlet_bound(1, t)


def test_growth_diagnostics():
    rows = growth_diagnostics(FIBONACCI[:3])
    assert [r["k"] for r in rows] == [1, 2, 3]
    assert rows[1]["root"] == pytest.approx(np.sqrt(2))
    assert rows[2]["log_rate"] == pytest.approx(np.log(3) / 3)


def test_check_diophantine_example1(example1):
    report = check_diophantine(example1.spec)
    assert not report.all_passed
    failures = report.failures()
    assert [(f.row, f.col) for f in failures] == [(1, 0)]
    assert failures[0].margin == pytest.approx(np.sqrt(2) - 2, abs=1e-12)
    assert report.rows_passed() == {1: False, 2: True, 3: True}


def test_check_diophantine_skips_rational_marks(rational_only):
    assert check_diophantine(rational_only.spec).entries == ()


@pytest.mark.parametrize("bounds", [(10, 5), (0, 5), (1, 10**9)])
def test_scan_range_validation(bounds):
    with pytest.raises(ValidationError):
        best_sequence([np.sqrt(2)], *bounds)
