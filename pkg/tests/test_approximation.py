#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
系数矩阵组装、求解与 ε₀ 估计的测试
"""

import math

import numpy as np
import pytest

from conftest import SQRT2
from models.approximant import PeriodicApproximant
from models.errors import GridError, ValidationError
from models.exponents import classify
from models.quasiperiodic import PeriodGrid, QuasiperiodicSpec
from services.approximation import (TEN_L, TWO_LMAX_PLUS_10, GridRule, SupSamplingPolicy, approximate,
                                    build_system, norm_1, norm_e, solve_periodic_coefficients,
                                    solve_quasiperiodic_coefficients, sup_error)
from services.bounds import assemble_report
from utils.settings import DEFAULT_SETTINGS


def _grid(L, rule=TEN_L, eta=1):
    return PeriodGrid(L=L, G=rule.apply(L), eta=eta)


def test_grid_rules():
    assert TEN_L.apply((29,)) == (290,)
    assert TWO_LMAX_PLUS_10.apply((7, 17, 7)) == (44, 44, 44)
    assert TWO_LMAX_PLUS_10.text == "2Lmax+10"
    assert GridRule(4, -2).text == "4L-2"


def test_odd_grid_rule_is_bumped(caplog):
    assert GridRule(3).apply((3, 4)) == (10, 12)
    assert "奇数" in caplog.text


def test_invalid_grid_rule():
    with pytest.raises(ValidationError):
        GridRule(0)


def test_norms():
    m = np.array([[1.0, -2.0], [3.0, 0.5]])
    assert norm_1(m) == 4.0
    assert norm_e(m) == 6.5


def test_grid_too_small(example1):
    grid = PeriodGrid(L=(29,), G=(100,))
    with pytest.raises(GridError, match="K_G"):
        approximate(example1.spec, grid)


def test_grid_period_mismatch(example1):
    es = classify(example1.spec, (29,))
    with pytest.raises(ValidationError):
        build_system(example1.spec, _grid((70,)), es)


def test_system_structure_example1(example1):
    result = approximate(example1.spec, _grid((29,)))
    mp_defect, rational_defect = result.system.structure_defects()
    assert mp_defect < 1e-10
    assert rational_defect < 1e-10
    M11, M12, M21, U = result.system.blocks()
    assert M11.shape == (1, 1)
    assert U.shape == (3, 3)
    assert np.max(np.abs(M21)) < 1e-10


def test_matrix_gap_bounded_by_residual(example1):
    result = approximate(example1.spec, _grid((29,)))
    gap = norm_e(result.system.M_p - result.system.M)
    deltaV_e = float(np.sum(np.abs(result.exponents.deltaV)))
    assert 0 < gap <= 2 * math.pi * result.system.size * deltaV_e


def test_solve_round_trip(example1):
    result = approximate(example1.spec, _grid((70,)))
    y = solve_quasiperiodic_coefficients(result.system, result.y_p)
    assert np.max(np.abs(y - result.y)) < 1e-10
    assert result.system.residual(result.y, result.y_p) < 1e-12


def test_periodic_coefficients_at_large_period(example1):
    result = approximate(example1.spec, _grid((13860,)))
    a = example1.spec.coefficients
    b = result.y_p
    assert result.approximant.exponents[:, 0].tolist() == [13860, 19601, 47321, 53062]
    assert abs(b[0] - a[0]) < 1e-9
    assert b[1].imag == pytest.approx(0.1 * math.pi * 2.5509e-5, rel=1e-3)
    assert b[3].imag == pytest.approx(0.02 * math.pi * 5.1018e-5, rel=1e-3)
    assert np.max(np.abs(b - a)) < 1e-4


def test_rational_problem_is_exact(rational_only):
    problem = rational_only
    result = approximate(problem.spec, problem.grid())
    assert np.allclose(result.y_p, result.y, atol=1e-13)
    sup = sup_error(problem.spec, result.approximant)
    assert sup.value <= 1e-12
    report = assemble_report(result, eps0=sup.value)
    assert report.deltaV_e == 0.0
    assert report.eps1 <= 1e-12
    assert report.eps2 == 0.0


def test_sup_error_example1(example1):
    result = approximate(example1.spec, _grid((29,)))
    sup = sup_error(example1.spec, result.approximant, SupSamplingPolicy(n_per_dim=(2000,)))
    assert sup.n_per_dim == (2000,)
    assert sup.value >= sup.grid_max > 0
    assert 0.0 <= sup.argmax[0] <= 29.0
    x = np.array(sup.argmax)
    direct = abs(result.approximant(x) - np.exp(2j * np.pi * example1.spec.exponents[:, 0] * x[0])
                 @ example1.spec.coefficients)
    assert direct == pytest.approx(sup.value, rel=1e-9)


def test_sampling_policy_resolution(example1):
    result = approximate(example1.spec, _grid((29,)))
    assert SupSamplingPolicy.from_settings(DEFAULT_SETTINGS).resolve(result.approximant) == (1110,)
    assert SupSamplingPolicy.from_settings(n_per_dim=[50]).resolve(result.approximant) == (50,)

    approx3 = PeriodicApproximant(L=(15, 41, 15), exponents=[[15, 29, 13], [13, 29, 0]],
                                  coefficients=[1.0, 1.0])
    assert SupSamplingPolicy().resolve(approx3) == (99, 99, 99)
    assert SupSamplingPolicy(n_per_dim=(7,)).resolve(approx3) == (7, 7, 7)
    with pytest.raises(ValidationError):
        SupSamplingPolicy(n_per_dim=(7, 7)).resolve(approx3)


def test_sup_grid_max_grows_with_density(example1):
    """嵌套网格加密时网格最大值不减"""
    result = approximate(example1.spec, _grid((29,)))
    values = []
    for n in (500, 1000, 2000, 4000):
        sup = sup_error(example1.spec, result.approximant, SupSamplingPolicy(n_per_dim=(n,), refine_top=0))
        assert sup.value == sup.grid_max
        values.append(sup.grid_max)
    assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))


def test_two_term_solve_matches_explicit_inverse():
    spec = QuasiperiodicSpec(P=[[1.0, SQRT2]], lattice=[[0, 1], [1, 0]], coefficients=[0.3 + 0.1j, -0.2j],
                             N=2, C_a=1.0, tau=0.1)
    result = approximate(spec, PeriodGrid(L=(5,), G=(50,)))
    system = result.system
    (p, q), (r, s) = system.M_p
    inverse = np.array([[s, -q], [-r, p]]) / (p * s - q * r)
    yi = system.exponents.to_internal_order(result.y)
    expected = system.exponents.to_input_order(inverse @ (system.M @ yi))
    assert np.max(np.abs(solve_periodic_coefficients(system, result.y) - expected)) < 1e-12
    assert np.max(np.abs(result.y_p - expected)) < 1e-12


def test_example2_case1_periodic_matrix_is_identity(example2_case1):
    result = approximate(example2_case1.spec, _grid((7, 17, 7), TWO_LMAX_PLUS_10))
    mp_defect, _ = result.system.structure_defects()
    assert mp_defect < 1e-10


def test_example2_case2_round_trip(example2_case2):
    result = approximate(example2_case2.spec, _grid((25, 41, 15), TWO_LMAX_PLUS_10))
    y = solve_quasiperiodic_coefficients(result.system, result.y_p)
    assert np.max(np.abs(y - result.y)) <= 1e-8 * np.max(np.abs(result.y))
