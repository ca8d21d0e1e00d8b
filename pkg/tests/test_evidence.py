"""Tests for the verification experiments."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.errors import ConfigError, DimensionError, DomainError
from src.evidence import (
    Violation,
    audit_dominance,
    certified_level,
    char_poly_pair,
    charpoly_check,
    charpoly_grid,
    conjecture_sweep,
    monotonicity_audit,
    periodicity_check,
    product_bound_check,
    random_line_params,
    required_samples,
    symmetry_batch,
    symmetry_check,
)
from src.graph import build_complete, build_line, build_star
from src.strategies import LineParams


def test_required_samples():
    assert required_samples(0.99, 0.99) == 459
    assert required_samples(0.95, 0.99) == math.ceil(math.log(0.05) / math.log(0.99))
    with pytest.raises(DomainError):
        required_samples(1.0, 0.99)


def test_certified_level():
    assert certified_level(459) >= 0.99
    assert certified_level(458) < 0.99
    assert certified_level(5000) > 0.999
    with pytest.raises(DomainError):
        certified_level(0)


def test_sweep_four_three():
    report = conjecture_sweep(4, 3, 2000, seed=7, threads=2)
    assert report.improvements == 0
    assert report.reference_value == pytest.approx(0.25)
    assert report.best_value < 0.25
    assert report.confidence == 0.99
    assert report.level == pytest.approx(certified_level(2000))
    assert report.certifies_default
    out = report.to_dict()
    assert out["required_samples"] == 459
    assert out["certifies_default"] is True


def test_sweep_independent_of_threads():
    one = conjecture_sweep(5, 5, 2500, seed=3, threads=1)
    many = conjecture_sweep(5, 5, 2500, seed=3, threads=4)
    assert one == many


def test_sweep_reports_no_confidence_when_matched():
    report = conjecture_sweep(4, 3, 100, seed=1, tol=1.0)
    assert report.improvements == 100
    assert report.confidence is None
    assert report.level is None
    assert not report.certifies_default


def test_sweep_validation():
    with pytest.raises(DimensionError):
        conjecture_sweep(2, 2, 10, seed=0)
    with pytest.raises(DomainError):
        conjecture_sweep(4, 2, 10, seed=0)
    with pytest.raises(ConfigError):
        conjecture_sweep(4, 3, 0, seed=0)


@pytest.mark.slow
@pytest.mark.parametrize("n, tau", [(5, 8), (6, 8)])
def test_sweep_finds_nothing_better_than_half_half(n, tau):
    report = conjecture_sweep(n, tau, 5000, seed=0)
    assert report.improvements == 0
    assert report.certifies_default


def test_symmetry_examples():
    result = symmetry_check(4, LineParams((0.3, 0.7)), 4)
    assert result.passed
    assert result.difference <= 1e-12
    fixed = symmetry_check(5, LineParams((0.5, 0.5, 0.5)), 5)
    assert fixed.f_x == fixed.f_reflected


def test_symmetry_needs_matching_size():
    with pytest.raises(DimensionError):
        symmetry_check(5, LineParams((0.3, 0.7)), 5)


def test_symmetry_batch_six():
    results = symmetry_batch(6, list(range(5, 10)), 50, seed=11)
    assert len(results) == 250
    assert all(r.passed for r in results)


def test_random_line_params_range():
    params = random_line_params(5, 20, seed=2)
    assert len(params) == 20
    assert all(p.n == 5 and all(0.01 <= v <= 0.99 for v in p.x) for p in params)
    assert params == random_line_params(5, 20, seed=2)


@given(st.floats(min_value=0.01, max_value=0.99), st.floats(min_value=-2.0, max_value=2.0))
def test_char_poly_base_case(x1, lam):
    g, h = char_poly_pair(LineParams((x1,)), lam)
    assert g == pytest.approx(lam * lam - (1 - x1), abs=1e-12)
    assert h == pytest.approx(g, abs=1e-12)


def test_char_poly_examples():
    result = charpoly_check(LineParams((0.2, 0.6, 0.9)), 0.37)
    assert result.passed
    assert result.g == pytest.approx(result.h, abs=1e-12)
    g, h = char_poly_pair(LineParams((0.4, 0.8)), 0.0)
    assert g == pytest.approx(h, abs=1e-15)


def test_char_poly_grid():
    results = charpoly_grid(list(range(3, 10)), 20, 10, seed=5)
    assert len(results) == 7 * 20 * 10
    failed = [r.to_dict() for r in results if not r.passed]
    assert failed == []


def test_product_bound():
    half = product_bound_check(LineParams((0.5, 0.5)))
    assert half.passed and half.tight
    assert half.bound == 1 / 16
    skewed = product_bound_check(LineParams((0.3, 0.7)))
    assert skewed.passed and not skewed.tight
    assert skewed.product == pytest.approx(0.21 * 0.21)


@settings(max_examples=25)
@given(st.lists(st.floats(min_value=0.01, max_value=0.99), min_size=1, max_size=5))
def test_product_bound_and_periodicity_hold(x):
    params = LineParams(tuple(x))
    assert product_bound_check(params).passed
    assert periodicity_check(params).passed


def test_audit_examples_are_clean():
    assert audit_dominance(build_star(4), 3, 100, seed=0) == []
    assert audit_dominance(build_line(5), 5, 100, seed=0) == []
    assert audit_dominance(build_complete(4), 3, 50, seed=0) == []


def test_audit_tau_one_skips_leaf_checks():
    assert audit_dominance(build_star(3), 1, 20, seed=4) == []


def test_audit_validation():
    with pytest.raises(DimensionError):
        audit_dominance(build_complete(2), 2, 5, seed=0)
    with pytest.raises(DomainError):
        audit_dominance(build_star(3), 0, 5, seed=0)


@pytest.mark.parametrize("n, tau", [(3, 2), (4, 3), (5, 5), (6, 9)])
def test_monotonicity_audit_is_clean(n, tau):
    assert monotonicity_audit(n, tau, 50, seed=6) == []


def test_monotonicity_audit_validation():
    with pytest.raises(DimensionError):
        monotonicity_audit(2, 1, 5, seed=0)
    with pytest.raises(DomainError):
        monotonicity_audit(4, 3, 5, seed=0, eps=0.6)


def test_violation_dict():
    v = Violation("cut-before", 3, (1, 2), (3, 2), 0.6, 0.5)
    assert v.excess == pytest.approx(0.1)
    assert v.to_dict()["better"] == [3, 2]
    assert Violation("leaf-dominance", 0, None, None, 0.2, 0.1).to_dict()["pair"] is None
