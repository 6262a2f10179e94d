#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
问题文件与命令行小语言解析的测试
"""

import json
import math
from fractions import Fraction

import pytest

from models.errors import ValidationError
from models.window import NodeLayout
from services.approximation import TEN_L, TWO_LMAX_PLUS_10, GridRule
from utils.problem_parser import (load_problem, parse_grid_rule, parse_int_vector, parse_problem,
                                  parse_range, parse_real, parse_vector, problem_from_dict)


def _base(**extra):
    data = {
        "P": [[1, "sqrt(2)"]],
        "lattice": [[1, 0], [0, 1]],
        "coefficients": [1, {"re": 0.5, "im": "-1/4"}],
        "N": 1,
        "diophantine": {"C_a": 1, "tau": 0.1},
    }
    data.update(extra)
    return data


@pytest.mark.parametrize("text, expected", [
    ("10L", TEN_L),
    ("2Lmax+10", TWO_LMAX_PLUS_10),
    ("4L-2", GridRule(4, -2)),
    ("3*L+4", GridRule(3, 4)),
    ("L", GridRule(1)),
    ("6 Lmax", GridRule(6, use_max=True)),
])
def test_parse_grid_rule(text, expected):
    assert parse_grid_rule(text) == expected


@pytest.mark.parametrize("text", ["10X", "L+", "", "2LL"])
def test_parse_grid_rule_errors(text):
    with pytest.raises(ValidationError) as info:
        parse_grid_rule(text)
    assert info.value.field == "G_rule"


def test_parse_range():
    assert parse_range("(20,14000]") == (21, 14000)
    assert parse_range("[1, 100]") == (1, 100)
    assert parse_range("[3,7)") == (3, 6)
    with pytest.raises(ValidationError):
        parse_range("(5,5]")
    with pytest.raises(ValidationError):
        parse_range("5,6")


def test_parse_vectors():
    assert parse_vector("1, 2.5") == [1.0, 2.5]
    assert parse_int_vector("7,17,7") == (7, 17, 7)
    assert parse_int_vector("13860") == (13860,)
    with pytest.raises(ValidationError):
        parse_int_vector("1.5", "L")
    with pytest.raises(ValidationError):
        parse_vector("1,,2")


@pytest.mark.parametrize("text, expected", [
    ("sqrt(2)/2", math.sqrt(2) / 2),
    ("(1+sqrt(5))/2", (1 + math.sqrt(5)) / 2),
    ("2*pi", 2 * math.pi),
    ("-sqrt(3)", -math.sqrt(3)),
    ("1 - 2 - 3", -4.0),
    ("1e-2", 0.01),
])
def test_parse_real_expressions(text, expected):
    assert parse_real(text, "x") == pytest.approx(expected)


def test_parse_real_errors():
    assert parse_real(3, "x") == 3.0
    for bad in ("sqrt(-1)", "1/0", "2 +", "e"):
        with pytest.raises(ValidationError):
            parse_real(bad, "x")
    with pytest.raises(ValidationError):
        parse_real(True, "x")
    with pytest.raises(ValidationError):
        parse_real([1], "x")


def test_problem_from_dict():
    problem = problem_from_dict(_base(L=[29], G_rule="10L", eta=2, layout="centered"), name="demo")
    assert problem.spec.P[0, 1] == pytest.approx(math.sqrt(2))
    assert problem.spec.coefficients[1] == 0.5 - 0.25j
    assert problem.name == "demo"
    grid = problem.grid()
    assert grid.G == (290,)
    assert grid.eta == 2
    assert grid.layout is NodeLayout.CENTERED


def test_problem_grid_overrides():
    problem = problem_from_dict(_base(L=[29], G=[400]))
    assert problem.grid().G == (400,)
    assert problem.grid(L=(30,), G=(500,)).G == (500,)
    assert problem.grid(L=(30,), grid_rule=TEN_L).G == (300,)
    with pytest.raises(ValidationError) as info:
        problem.grid(L=(30,))
    assert info.value.field == "G"
    with pytest.raises(ValidationError):
        problem.grid(L=(30, 30), G=(400, 400))


def test_problem_without_period():
    problem = problem_from_dict(_base(G_rule="10L"))
    with pytest.raises(ValidationError) as info:
        problem.grid()
    assert info.value.field == "L"
    assert problem.grid(L=(5,)).G == (50,)


def test_rational_marks_parsing():
    data = _base(P=[[1, 0.5]], rational_marks=[["1"], [0.5]])
    problem = problem_from_dict(data)
    assert problem.spec.mark(1, 0) == Fraction(1, 2)
    assert problem.spec.mark(0, 0) == Fraction(1)


@pytest.mark.parametrize("mutation, field", [
    ({"N": 0}, "N"),
    ({"eta": 0}, "eta"),
    ({"lattice": [[1, 0], [0, 1.5]]}, "lattice[1]"),
    ({"diophantine": {"C_a": 1}}, "diophantine"),
    ({"sup_sampling": {"points": 5}}, "sup_sampling"),
    ({"L": [29], "G": [400], "G_rule": "10L"}, "G"),
    ({"L": [29], "G": [99]}, "G"),
    ({"coefficients": [1, {"re": 1, "imag": 2}]}, "coefficients[1]"),
])
def test_problem_validation_fields(mutation, field):
    with pytest.raises(ValidationError) as info:
        problem_from_dict(_base(**mutation))
    assert info.value.field == field


def test_problem_missing_and_unknown_keys():
    data = _base()
    del data["P"]
    with pytest.raises(ValidationError) as info:
        problem_from_dict(data)
    assert info.value.field == "P"
    with pytest.raises(ValidationError, match="未知键"):
        problem_from_dict(_base(extra=1))
    with pytest.raises(ValidationError):
        problem_from_dict([1, 2])


def test_parse_problem_reports_position():
    with pytest.raises(ValidationError, match="第 2 行"):
        parse_problem('{\n  "P": [1,,]\n}')
    problem = parse_problem(json.dumps(_base(L=[5], G_rule="10L")))
    assert problem.L == (5,)


def test_load_problem(fixture_path, tmp_path):
    problem = load_problem(fixture_path("example1"))
    assert problem.name == "example1"
    assert problem.grid().G == (138600,)
    with pytest.raises(ValidationError):
        load_problem(tmp_path / "missing.json")
