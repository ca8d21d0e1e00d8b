"""Tests for best responses, game values, the tau/n bound and dominated pairs."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from src.chain import from_rows, random_chain
from src.errors import ConnectivityError, DimensionError, DomainError
from src.game import (
    DominanceReason,
    GameInstance,
    dominated_pairs,
    game_value,
    intruder_best_response,
    undominated_mask,
    upper_bound,
)
from src.graph import (
    DiGraph,
    TauClassification,
    build_complete,
    build_line,
    build_star,
    classify_tau,
    leaves,
)
from src.hitting import capture_matrix
from src.strategies import complete_kron, line_optimal, random_walk, star_optimal


def test_star_best_response_is_lexicographically_first_leaf_pair():
    response = intruder_best_response(star_optimal(3), 3)
    assert response.pair == (2, 2)
    assert response.value == pytest.approx(0.5)


def test_line_optimal_value():
    assert game_value(line_optimal(4), 3) == pytest.approx(0.25)


@given(st.integers(min_value=0, max_value=2**32))
def test_below_diameter_value_is_exactly_zero(seed):
    assert game_value(random_chain(build_line(4), seed), 2) == 0.0


def test_reference_values():
    assert game_value(random_walk(3), 2) == pytest.approx(5 / 9)
    assert game_value(complete_kron(4, 2), 2) == pytest.approx(0.5)


def test_reducible_chain_value_is_exactly_zero():
    assert game_value(from_rows(np.eye(3)), 5) == 0.0


def test_best_response_dict_carries_bound_and_gap():
    out = intruder_best_response(star_optimal(3), 3).to_dict(bound=1.0)
    assert out["pair"] == [2, 2]
    assert out["gap"] == pytest.approx(0.5)


@pytest.mark.parametrize("n, tau, bound", [(4, 2, 0.5), (5, 4, 0.8), (3, 1, 1 / 3)])
def test_upper_bound(n, tau, bound):
    assert upper_bound(GameInstance(build_complete(n), tau)) == pytest.approx(bound)


def test_instance_validation():
    with pytest.raises(DomainError):
        GameInstance(build_line(4), 0)
    with pytest.raises(ConnectivityError):
        GameInstance(DiGraph.from_edges(3, [(1, 2), (2, 3)]), 2)


@pytest.mark.slow
def test_value_never_exceeds_bound_on_random_chains():
    rng = np.random.default_rng(2024)
    count = 0
    for seed in range(600):
        builder = (build_star, build_line, build_complete)[rng.integers(3)]
        g = builder(int(rng.integers(3, 7)))
        tau = int(rng.integers(1, 2 * g.n))
        if classify_tau(g, tau).classification is not TauClassification.NONTRIVIAL:
            continue
        count += 1
        assert game_value(random_chain(g, seed), tau) <= tau / g.n + 1e-9
    assert count >= 150


def test_star_three_dominated_pairs():
    pairs = dominated_pairs(build_star(3), 2)
    by_pair = {}
    for entry in pairs:
        by_pair.setdefault(entry.pair, []).append(entry)
    (cut,) = [e for e in by_pair[(1, 2)] if e.reason is DominanceReason.CUT_BEFORE]
    assert cut.witness == 3
    assert cut.better_pair() == (3, 2)
    assert any(e.reason is DominanceReason.LEAF for e in by_pair[(2, 2)])


def test_leaf_pairs_need_tau_two():
    assert all(e.reason is not DominanceReason.LEAF for e in dominated_pairs(build_star(3), 1))


def test_complete_graph_has_no_cut_pairs():
    assert dominated_pairs(build_complete(3), 2) == []
    assert undominated_mask(build_complete(3), 2).all()


def test_line_end_pairs_survive():
    mask = undominated_mask(build_line(5), 4)
    assert mask[0, 4] and mask[4, 0]
    # deleting node 2 cuts node 1 off, so (2, 3) is beaten by (1, 3)
    assert not mask[1, 2]


def test_dominance_needs_three_nodes():
    with pytest.raises(DimensionError):
        dominated_pairs(build_complete(2), 2)


def test_dominated_pairs_never_lower_the_value():
    rng = np.random.default_rng(7)
    for seed in range(100):
        builder = (build_star, build_line)[seed % 2]
        g = builder(int(rng.integers(3, 7)))
        tau = int(rng.integers(2, 7))
        C = capture_matrix(random_chain(g, seed), tau)
        mask = undominated_mask(g, tau)
        assert C[mask].min() == pytest.approx(C.min(), abs=1e-12)


graphs = st.builds(
    lambda build, n: build(n),
    st.sampled_from([build_star, build_line, build_complete]),
    st.integers(min_value=3, max_value=6),
)


@given(graphs, st.integers(min_value=1, max_value=11), st.integers(min_value=0, max_value=2**32))
def test_cut_witness_is_at_least_as_good(g, tau, seed):
    C = capture_matrix(random_chain(g, seed), tau)
    for entry in dominated_pairs(g, tau):
        if entry.reason is DominanceReason.LEAF:
            continue
        (i, j), (k, m) = entry.pair, entry.better_pair()
        assert C[k - 1, m - 1] <= C[i - 1, j - 1] + 1e-12


@given(graphs, st.integers(min_value=2, max_value=11), st.integers(min_value=0, max_value=2**32))
def test_waiting_at_a_leaf_is_no_better(g, tau, seed):
    C = capture_matrix(random_chain(g, seed), tau)
    for leaf, neighbor in leaves(g).items():
        for k in range(1, g.n + 1):
            if k not in (leaf, neighbor):
                assert C[k - 1, leaf - 1] <= C[leaf - 1, leaf - 1] + 1e-12
