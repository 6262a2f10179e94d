#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
拟周期函数、缩放指数分类、周期逼近函数与配置/异常的测试
"""

import math
from fractions import Fraction

import numpy as np
import pytest

from conftest import SQRT2
from models.approximant import PeriodicApproximant, evaluate_fp
from models.errors import (EXIT_INADMISSIBLE, EXIT_NUMERICAL, EXIT_VALIDATION, GridError,
                           InadmissibleParametersError, NumericalFailureError, ValidationError,
                           exit_code_for)
from models.exponents import classify, count_distinct_mod1, exact_residual, round_half_away
from models.quasiperiodic import QuasiperiodicSpec, evaluate_f
from utils.settings import DEFAULT_SETTINGS, Settings


def _spec(P, lattice, coefficients=None, N=2, **kwargs):
    if coefficients is None:
        coefficients = [1.0] * len(lattice)
    return QuasiperiodicSpec(P=P, lattice=lattice, coefficients=coefficients, N=N,
                             C_a=kwargs.pop("C_a", 1.0), tau=kwargs.pop("tau", 0.1), **kwargs)


def test_example1_exponents(example1):
    lam = example1.spec.exponents[:, 0]
    assert lam == pytest.approx([1.0, SQRT2, 2 + SQRT2, 1 + 2 * SQRT2])
    assert example1.spec.dim == 1
    assert example1.spec.size == 4
    assert example1.spec.p_norm_1 == pytest.approx(SQRT2)


def test_example2_exponents(example2_case1, example2_case2):
    lam = example2_case1.spec.exponents
    assert lam[0] == pytest.approx([1.0, 0.0, math.sqrt(3) / 2])
    assert lam[1] == pytest.approx([math.sqrt(3) / 2, SQRT2 / 2, 0.0])
    assert example2_case1.spec.p_norm_1 == pytest.approx(1.0)
    lam = example2_case2.spec.exponents
    assert lam[2] == pytest.approx([math.sqrt(5) / 4, 0.0, math.sqrt(3) / 2])


def test_spec_validation():
    with pytest.raises(ValidationError, match="lattice"):
        _spec([[1.0, 1.0]], [[1, 0], [0, 1]])
    with pytest.raises(ValidationError):
        _spec([[1.0, SQRT2]], [[3, 0]], N=2)
    with pytest.raises(ValidationError):
        _spec([[1.0, SQRT2]], [[1, 0], [1, 0]])
    with pytest.raises(ValidationError):
        _spec([[1.0], [2.0]], [[1]])
    with pytest.raises(ValidationError):
        _spec([[1.0, SQRT2]], [[1, 0]], coefficients=[1.0, 2.0])
    with pytest.raises(ValidationError):
        _spec([[1.0, SQRT2]], [[1, 0]], C_a=0.0)


def test_rational_marks_must_match_values():
    spec = _spec([[1.0, 0.5]], [[0, 1]], rational_marks=[["1/2"]])
    assert spec.mark(0, 0) == Fraction(1, 2)
    with pytest.raises(ValidationError, match="rational_marks"):
        _spec([[1.0, 0.5]], [[0, 1]], rational_marks=[["1/3"]])


def test_evaluate_f_matches_direct_sum(example1):
    spec = example1.spec
    x = 0.37
    expected = sum(a * np.exp(2j * np.pi * lam * x) for a, lam in zip(spec.coefficients, spec.exponents[:, 0]))
    assert evaluate_f(spec, [x]) == pytest.approx(expected)
    values = evaluate_f(spec, np.array([[0.0], [x]]))
    assert values.shape == (2,)
    assert values[0] == pytest.approx(np.sum(spec.coefficients))


def test_round_half_away():
    assert round_half_away([0.5, -0.5, 1.5, -2.5, 0.49]).tolist() == [1.0, -1.0, 2.0, -3.0, 0.0]


def test_classify_example1_large_period(example1):
    es = classify(example1.spec, (13860,))
    assert sorted(es.H_input_order()[:, 0].tolist()) == [13860, 19601, 47321, 53062]
    assert es.H_input_order()[:, 0].tolist() == [13860, 19601, 47321, 53062]
    assert es.zeta == 1
    assert es.d_m == 0
    assert es.d_M == 0
    assert es.s_per_dim == (2,)
    # 19601² - 2·13860² = 1
    pell = 1.0 / (19601 + 13860 * SQRT2)
    assert float(np.sum(np.abs(es.deltaV))) == pytest.approx(4 * pell, rel=1e-6)


def test_classify_example1_small_period(example1):
    es = classify(example1.spec, (29,))
    assert es.H_input_order()[:, 0].tolist() == [29, 41, 99, 111]
    assert float(np.sum(np.abs(es.deltaV))) == pytest.approx(4.8773e-2, rel=1e-4)
    assert es.integer[0].all()
    assert es.order[0] == 0


def test_classify_example2(example2_case1, example2_case2):
    es = classify(example2_case1.spec, (7, 17, 7))
    assert (es.zeta, es.d_m, es.d_M) == (0, 1, 0)
    assert es.r.tolist() == [2, 1]
    es = classify(example2_case2.spec, (25, 41, 15))
    assert (es.zeta, es.d_m, es.d_M) == (1, 1, 1)


def test_classify_moves_rational_rows_first():
    spec = _spec([[1.0, SQRT2]], [[0, 1], [1, 0]])
    es = classify(spec, (5,))
    assert es.zeta == 1
    assert es.order.tolist() == [1, 0]
    assert es.to_input_order(es.H)[:, 0].tolist() == [7, 5]
    assert es.to_internal_order(np.array([10, 20])).tolist() == [20, 10]


def _permuted(spec, perm):
    return QuasiperiodicSpec(P=spec.P, lattice=spec.lattice[perm], coefficients=spec.coefficients[perm],
                             N=spec.N, C_a=spec.C_a, tau=spec.tau)


@pytest.mark.parametrize("name, L, perm", [
    ("example1", (29,), [2, 0, 3, 1]),
    ("example1", (13860,), [3, 2, 1, 0]),
    ("example2_case2", (25, 41, 15), [2, 0, 1]),
])
def test_classify_is_invariant_under_row_permutation(name, L, perm, request):
    """打乱输入行只改变行序，有理性统计量不变"""
    spec = request.getfixturevalue(name).spec
    es = classify(spec, L)
    shuffled = classify(_permuted(spec, perm), L)
    assert shuffled.H_input_order().tolist() == es.H_input_order()[perm].tolist()
    assert np.allclose(shuffled.to_input_order(shuffled.deltaV), es.to_input_order(es.deltaV)[perm])
    assert (shuffled.zeta, shuffled.d_m, shuffled.d_M) == (es.zeta, es.d_m, es.d_M)
    assert sorted(shuffled.r.tolist()) == sorted(es.r.tolist())
    assert shuffled.s_per_dim == es.s_per_dim
    assert float(np.sum(np.abs(shuffled.deltaV))) == pytest.approx(float(np.sum(np.abs(es.deltaV))))


def test_classify_with_rational_marks(rational_only):
    es = classify(rational_only.spec, (2,))
    assert es.zeta == 3
    assert not np.any(es.deltaV)
    assert es.H_input_order()[:, 0].tolist() == [2, 1, 3]
    es = classify(rational_only.spec, (3,))
    assert es.zeta == 1
    assert float(np.sum(np.abs(es.deltaV))) == pytest.approx(1.0)


def test_classify_rejects_bad_period(example1):
    with pytest.raises(ValidationError):
        classify(example1.spec, (0,))
    with pytest.raises(ValidationError):
        classify(example1.spec, (10, 10))


def test_half_integer_tie_is_noted():
    spec = _spec([[1.0, 0.5]], [[0, 1]], N=1)
    es = classify(spec, (3,))
    assert es.H[0, 0] == 2
    assert es.notes


def test_count_distinct_mod1():
    assert count_distinct_mod1([0.25, 1.25, 2.5], 1e-9) == 2
    assert count_distinct_mod1([1e-12, 1.0 - 1e-12], 1e-9) == 1
    assert count_distinct_mod1([], 1e-9) == 0


def test_exact_residual():
    assert exact_residual(Fraction(1, 3), 4) == pytest.approx(1 / 3)
    assert exact_residual(Fraction(1, 2), 4) == 0.0


def test_periodic_approximant_is_periodic():
    approx = PeriodicApproximant(L=(3,), exponents=[[1], [4]], coefficients=[1.0, 0.5j])
    assert approx([0.4]) == pytest.approx(approx([3.4]))
    assert evaluate_fp(approx, [0.0]) == pytest.approx(1.0 + 0.5j)
    assert approx.frequencies[:, 0].tolist() == pytest.approx([1 / 3, 4 / 3])
    with pytest.raises(ValidationError):
        PeriodicApproximant(L=(3,), exponents=[[1], [1]], coefficients=[1.0, 2.0])


def test_settings_from_env():
    settings = Settings.from_env({"QPA_INT_EPS": "1e-11", "QPA_SUP_MAX_POINTS": "2e5"})
    assert settings.int_eps == 1e-11
    assert settings.sup_max_points == 200000
    assert Settings.from_env({}) == DEFAULT_SETTINGS
    with pytest.raises(ValueError):
        Settings.from_env({"QPA_SCAN_CHUNK": "many"})


def test_error_hierarchy_and_exit_codes():
    err = ValidationError("必须为正", field="N")
    assert str(err).startswith("N:")
    assert isinstance(GridError("x"), IndexError)
    assert exit_code_for(err) == EXIT_VALIDATION
    assert exit_code_for(InadmissibleParametersError("x", condition="a > b")) == EXIT_INADMISSIBLE
    assert "a > b" in str(InadmissibleParametersError("x", condition="a > b"))
    assert exit_code_for(NumericalFailureError("x")) == EXIT_NUMERICAL
