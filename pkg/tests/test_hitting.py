"""Tests for the hitting-time engines and their cross-checks."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.chain import from_matrix, from_rows, random_chain, stationary_distribution
from src.errors import DomainError, GuardError
from src.graph import build_complete, build_line, build_star
from src.hitting import (
    batch_capture,
    capture_column,
    capture_matrix,
    enumerate_capture_matrix,
    enumerate_hitting,
    hitting_profile,
    hitting_profile_vectorized,
    simulate_hitting,
)
from src.strategies import line_optimal, star_optimal

SWAP = [[0, 1], [1, 0]]
FAIR = [[0.5, 0.5], [0.5, 0.5]]
LINE3 = [[0, 1, 0], [0.5, 0, 0.5], [0, 1, 0]]


def test_two_cycle_captures_everything_in_two_steps():
    np.testing.assert_array_equal(capture_matrix(from_rows(SWAP), 2), [[1, 1], [1, 1]])


def test_fair_coin_capture():
    assert capture_matrix(from_rows(FAIR), 2)[0, 1] == pytest.approx(0.75)


def test_line_optimal_end_to_end():
    assert hitting_profile(line_optimal(4), 3).capture(1, 4) == pytest.approx(0.25)


def test_first_step_is_the_transition_matrix():
    profile = hitting_profile(from_rows(SWAP), 1)
    np.testing.assert_array_equal(profile.F[0], SWAP)


def test_rejects_nonpositive_tau():
    with pytest.raises(DomainError):
        hitting_profile(from_rows(FAIR), 0)


@pytest.mark.parametrize("rows", [SWAP, FAIR])
def test_vectorized_matches_recursion_small(rows):
    c = from_rows(rows)
    np.testing.assert_allclose(
        hitting_profile_vectorized(c, 2).C, hitting_profile(c, 2).C, atol=1e-12
    )


def test_vectorized_matches_recursion_random():
    c = random_chain(build_complete(4), 11)
    np.testing.assert_allclose(
        hitting_profile_vectorized(c, 5).F, hitting_profile(c, 5).F, atol=1e-12
    )


def test_enumeration_examples():
    assert enumerate_hitting(from_rows(FAIR), 1, 2, 2) == pytest.approx(0.75)
    assert enumerate_hitting(from_matrix(build_line(3), LINE3), 1, 3, 2) == pytest.approx(0.5)
    assert enumerate_hitting(from_rows(SWAP), 1, 1, 1) == 0.0


def test_enumeration_guard():
    with pytest.raises(GuardError):
        enumerate_hitting(random_chain(build_complete(10), 0), 1, 2, 9)


def test_capture_column_matches_recursion():
    c = random_chain(build_star(5), 3)
    C = capture_matrix(c, 6)
    for j in range(1, 6):
        np.testing.assert_allclose(capture_column(c, j, 6), C[:, j - 1], atol=1e-12)


def test_batch_capture_matches_individual_chains():
    chains = [random_chain(build_line(5), s) for s in range(4)]
    stacked = batch_capture(np.array([c.P for c in chains]), 5)
    for c, C in zip(chains, stacked):
        np.testing.assert_allclose(C, capture_matrix(c, 5), atol=1e-14)


def test_unreachable_pairs_are_exact_zeros():
    C = capture_matrix(line_optimal(5), 3)
    assert C[0, 4] == 0.0
    assert C[4, 0] == 0.0


def test_capture_nondecreasing_in_tau():
    c = random_chain(build_star(4), 9)
    previous = np.zeros((4, 4))
    for tau in range(1, 8):
        C = capture_matrix(c, tau)
        assert np.all(C >= previous - 1e-15)
        assert np.all(C <= 1.0 + 1e-12)
        previous = C


@pytest.mark.slow
def test_oracle_equivalence_on_fifty_chains(random_chains):
    for index, c in enumerate(random_chains):
        tau = 2 + index % 5
        recursion = hitting_profile(c, tau).C
        np.testing.assert_allclose(hitting_profile_vectorized(c, tau).C, recursion, atol=1e-12)
        np.testing.assert_allclose(enumerate_capture_matrix(c, tau), recursion, atol=1e-12)


@settings(max_examples=20)
@given(
    st.sampled_from([build_star, build_line, build_complete]),
    st.integers(min_value=3, max_value=6),
    st.integers(min_value=1, max_value=8),
    st.integers(min_value=0, max_value=2**32),
)
def test_stationary_weighted_first_hits_bounded(builder, n, tau, seed):
    c = random_chain(builder(n), seed)
    pi = stationary_distribution(c)
    F = hitting_profile(c, tau).F
    for Fk in F:
        assert np.all(pi @ Fk <= pi + 1e-10)


def test_simulation_deterministic_transition():
    estimate = simulate_hitting(from_rows(SWAP), 1, 2, 1, 10_000, seed=1)
    assert estimate.estimate == 1.0
    assert estimate.stderr == 0.0


def test_simulation_fair_coin_within_four_sigma():
    estimate = simulate_hitting(from_rows(FAIR), 1, 2, 2, 200_000, seed=5)
    assert abs(estimate.estimate - 0.75) <= 4 * estimate.stderr + 1e-12


def test_simulation_star_within_four_sigma():
    estimate = simulate_hitting(star_optimal(3), 1, 2, 3, 200_000, seed=8)
    assert abs(estimate.estimate - 0.75) <= 4 * estimate.stderr + 1e-12


def test_simulation_independent_of_threads():
    c = random_chain(build_complete(4), 2)
    one = simulate_hitting(c, 1, 3, 4, 250_000, seed=13, threads=1)
    many = simulate_hitting(c, 1, 3, 4, 250_000, seed=13, threads=4)
    assert one == many
