"""Tests for the maximin search and the line solver."""

import numpy as np
import pytest

from src.chain import uniform_chain
from src.errors import ConfigError, DimensionError, DomainError, TopologyError
from src.game import GameInstance, game_value
from src.graph import TauClassification, build_complete, build_line, build_star
from src.solver import (
    SolveConfig,
    apply_leaf_dominance,
    line_matrices,
    line_objective,
    necessary_residual_line,
    solve_line,
    solve_maximin,
)
from src.strategies import LineParams, line_optimal, line_param, star_value

FAST = SolveConfig(restarts=3, max_iters=200, threads=2)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"restarts": 0},
        {"max_iters": 0},
        {"initial_step": 0.0},
        {"step_shrink": 1.0},
        {"min_step": 0.0},
        {"tol": -1.0},
        {"threads": 0},
    ],
)
def test_config_validation(kwargs):
    with pytest.raises(ConfigError):
        SolveConfig(**kwargs)


def test_config_dict_leaves_out_threads():
    out = SolveConfig(threads=3).to_dict()
    assert "threads" not in out
    assert out["restarts"] == 8


def test_leaf_dominance_rewrites_leaf_rows_only():
    g = build_star(4)
    c = apply_leaf_dominance(g, uniform_chain(g))
    np.testing.assert_array_equal(c.P[1:], [[1, 0, 0, 0]] * 3)
    np.testing.assert_allclose(c.P[0], [0.25] * 4)


def test_leaf_dominance_leaves_leafless_graphs_alone():
    for g in (build_complete(4), build_complete(2)):
        c = uniform_chain(g)
        assert apply_leaf_dominance(g, c) is c


def test_below_diameter_is_degenerate():
    report = solve_maximin(GameInstance(build_line(4), 2), FAST)
    assert report.degenerate
    assert report.value == 0.0
    assert report.classification is TauClassification.TRIVIAL_ZERO
    assert report.evaluations == 1


def test_hamiltonian_cycle_scores_one():
    report = solve_maximin(GameInstance(build_complete(3), 3), FAST)
    assert report.degenerate
    assert report.value == 1.0
    assert report.restart is None


def test_covering_walk_without_cycle_still_searches():
    report = solve_maximin(GameInstance(build_line(4), 6), SolveConfig(restarts=2, max_iters=50))
    assert report.degenerate
    assert report.classification is TauClassification.TRIVIAL_ONE
    assert 0.0 <= report.value <= 1.0 + 1e-12


@pytest.mark.slow
@pytest.mark.parametrize("tau", [2, 3, 4, 5, 6])
@pytest.mark.parametrize("n", [3, 4, 5])
def test_star_search_reaches_closed_form(n, tau):
    report = solve_maximin(GameInstance(build_star(n), tau), SolveConfig())
    assert report.value >= star_value(n, tau) - 1e-3
    assert report.value <= 1.0 + 1e-12


@pytest.mark.slow
def test_complete_four_search_reaches_bound():
    report = solve_maximin(GameInstance(build_complete(4), 2), SolveConfig())
    assert report.value >= 0.5 - 1e-3
    assert report.value <= report.bound + 1e-9


def test_search_is_deterministic_and_monotone():
    inst = GameInstance(build_star(3), 3)
    cfg = SolveConfig(restarts=2, max_iters=60, threads=2)
    first, second = solve_maximin(inst, cfg), solve_maximin(inst, cfg)
    np.testing.assert_array_equal(first.best.P, second.best.P)
    assert first.value == second.value
    assert first.restart == second.restart
    values = [v for _, v in first.trace]
    assert all(a <= b for a, b in zip(values, values[1:]))
    assert first.value == pytest.approx(values[-1], abs=1e-9)


def test_thread_count_does_not_change_result():
    inst = GameInstance(build_star(4), 4)
    one = solve_maximin(inst, SolveConfig(restarts=3, max_iters=40, threads=1, polish=False))
    many = solve_maximin(inst, SolveConfig(restarts=3, max_iters=40, threads=3, polish=False))
    np.testing.assert_array_equal(one.best.P, many.best.P)


def test_report_dict():
    report = solve_maximin(GameInstance(build_line(4), 2), FAST)
    out = report.to_dict()
    assert out["chain"]["n"] == 4
    assert out["gap"] == pytest.approx(0.5)
    assert "params" not in out


def test_line_matrices_rows_are_stochastic():
    stack = line_matrices([[0.2, 0.7], [0.5, 0.5]])
    assert stack.shape == (2, 4, 4)
    np.testing.assert_allclose(stack.sum(axis=2), 1.0)
    np.testing.assert_array_equal(stack[1], line_optimal(4).P)


def test_line_objective_at_half():
    assert line_objective([0.5, 0.5], 3) == pytest.approx(0.25)
    assert line_objective([0.5], 2) == pytest.approx(0.5)


@pytest.mark.parametrize("n, tau, value", [(3, 2, 0.5), (4, 3, 0.25)])
def test_solve_line_small(n, tau, value):
    report = solve_line(n, tau, FAST)
    assert report.value == pytest.approx(value, abs=1e-3)
    assert len(report.params) == n - 2
    assert report.to_dict()["params"] == list(report.params)


@pytest.mark.slow
def test_solve_line_five_matches_half_half():
    report = solve_line(5, 4, FAST)
    np.testing.assert_allclose(report.params, [0.5] * 3, atol=1e-2)
    assert report.value == pytest.approx(game_value(line_optimal(5), 4), abs=1e-3)


LINE_GRID = [(n, tau) for n in (3, 4, 5) for tau in range(n - 1, 2 * n - 2)]


@pytest.mark.slow
@pytest.mark.parametrize("n, tau", LINE_GRID)
def test_solve_line_never_beats_half_half(n, tau):
    report = solve_line(n, tau, SolveConfig())
    target = game_value(line_optimal(n), tau)
    assert target - 1e-3 <= report.value <= target + 1e-6
    assert all(0.0 < x < 1.0 for x in report.params)
    assert necessary_residual_line(report.best, tau) <= 1e-3


def test_solve_line_validation():
    with pytest.raises(DimensionError):
        solve_line(2, 1)
    with pytest.raises(DomainError):
        solve_line(4, 6)
    with pytest.raises(DomainError):
        solve_line(4, 2)


def test_necessary_residual():
    skewed = line_param(build_line(4), LineParams((0.7, 0.7)))
    assert necessary_residual_line(skewed, 3) == pytest.approx(0.40)
    assert necessary_residual_line(line_optimal(5), 4) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(TopologyError):
        necessary_residual_line(uniform_chain(build_star(4)), 3)
